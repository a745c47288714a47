#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cview {

/// Fixed-width dynamic bitset backed by 64-bit blocks.
///
/// Used for object sets (extents, columns) and attribute sets (intents, rows).
/// Bits past size() are kept at zero so that word-wise comparison and
/// hashing are well defined.
class Bitset {
 public:
  using word_type = std::uint64_t;
  static constexpr std::size_t word_bits = 64;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Bitset() = default;

  explicit Bitset(std::size_t size, bool value = false)
      : size_(size), words_(word_count(size), value ? ~word_type{0} : word_type{0}) {
    trim();
  }

  static Bitset from_indices(std::size_t size, std::span<const std::size_t> indices) {
    Bitset b(size);
    for (auto i : indices) b.set(i);
    return b;
  }

  static Bitset from_indices(std::size_t size, std::initializer_list<std::size_t> indices) {
    return from_indices(size, std::span<const std::size_t>(indices.begin(), indices.size()));
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t word_size() const noexcept { return words_.size(); }
  std::span<const word_type> words() const noexcept { return words_; }

  bool test(std::size_t i) const noexcept {
    assert(i < size_);
    return (words_[i / word_bits] >> (i % word_bits)) & 1u;
  }
  bool operator[](std::size_t i) const noexcept { return test(i); }

  Bitset& set(std::size_t i) noexcept {
    assert(i < size_);
    words_[i / word_bits] |= word_type{1} << (i % word_bits);
    return *this;
  }
  Bitset& set(std::size_t i, bool value) noexcept { return value ? set(i) : reset(i); }
  Bitset& reset(std::size_t i) noexcept {
    assert(i < size_);
    words_[i / word_bits] &= ~(word_type{1} << (i % word_bits));
    return *this;
  }
  Bitset& set_all() noexcept {
    std::fill(words_.begin(), words_.end(), ~word_type{0});
    trim();
    return *this;
  }
  Bitset& reset_all() noexcept {
    std::fill(words_.begin(), words_.end(), word_type{0});
    return *this;
  }

  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](word_type w) { return w == 0; });
  }
  bool any() const noexcept { return !none(); }
  bool all() const noexcept { return count() == size_; }

  Bitset& operator&=(const Bitset& o) noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  // set difference
  Bitset& operator-=(const Bitset& o) noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  Bitset operator~() const {
    Bitset r(*this);
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
  friend Bitset operator-(Bitset a, const Bitset& b) { return a -= b; }

  bool is_subset_of(const Bitset& o) const noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool is_proper_subset_of(const Bitset& o) const noexcept { return is_subset_of(o) && *this != o; }
  bool intersects(const Bitset& o) const noexcept {
    assert(size_ == o.size_);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  // True iff both sets agree on all positions strictly below `bound`.
  bool equal_below(const Bitset& o, std::size_t bound) const noexcept {
    assert(size_ == o.size_ && bound <= size_);
    const std::size_t full = bound / word_bits;
    for (std::size_t i = 0; i < full; ++i)
      if (words_[i] != o.words_[i]) return false;
    const std::size_t rest = bound % word_bits;
    if (rest == 0) return true;
    const word_type mask = (word_type{1} << rest) - 1;
    return ((words_[full] ^ o.words_[full]) & mask) == 0;
  }

  std::size_t first() const noexcept { return next(0); }

  // Smallest set position >= from, or npos.
  std::size_t next(std::size_t from) const noexcept {
    if (from >= size_) return npos;
    std::size_t wi = from / word_bits;
    word_type w = words_[wi] & (~word_type{0} << (from % word_bits));
    while (true) {
      if (w) return wi * word_bits + static_cast<std::size_t>(std::countr_zero(w));
      if (++wi == words_.size()) return npos;
      w = words_[wi];
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      word_type w = words_[wi];
      while (w) {
        f(wi * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for_each([&](std::size_t i) { s[i] = '1'; });
    return s;
  }

  friend bool operator==(const Bitset& a, const Bitset& b) noexcept {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (auto w : words_) h ^= std::hash<word_type>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  static std::size_t word_count(std::size_t n) { return (n + word_bits - 1) / word_bits; }
  void trim() noexcept {
    const std::size_t rest = size_ % word_bits;
    if (rest != 0 && !words_.empty()) words_.back() &= (word_type{1} << rest) - 1;
  }

  std::size_t size_ = 0;
  std::vector<word_type> words_;
};

/// Lectic order on sets over {0..n-1}: A < B iff the smallest element of the
/// symmetric difference lies in B.
inline bool lectic_less(const Bitset& a, const Bitset& b) noexcept {
  assert(a.size() == b.size());
  auto wa = a.words();
  auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    const auto diff = wa[i] ^ wb[i];
    if (diff) {
      const auto low = diff & (~diff + 1);
      return (wb[i] & low) != 0;
    }
  }
  return false;
}

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const noexcept { return b.hash(); }
};

}  // namespace cview
