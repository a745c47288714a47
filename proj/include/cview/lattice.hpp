#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cview/bitset.hpp"
#include "cview/errors.hpp"
#include "cview/formal_context.hpp"

namespace cview {

struct FormalConcept {
  Bitset extent;
  Bitset intent;

  friend bool operator==(const FormalConcept&, const FormalConcept&) = default;
};

struct EnumerationOptions {
  // Bitsets chain across words, so this is a sanity bound rather than a word size.
  std::size_t attribute_limit = 65536;
  // Concepts with fewer objects than this are skipped (iceberg).
  std::size_t min_support = 0;
  bool compute_covers = true;
  std::size_t workers = 1;
};

/// Concepts of a context in lectic order of their intents, with the cover
/// relation of the extent-inclusion order. When built with a support
/// threshold the set is an order filter of the full lattice and may lack a
/// bottom element.
class ConceptLattice {
 public:
  ConceptLattice(std::shared_ptr<const FormalContext> ctx, std::vector<FormalConcept> concepts, std::size_t min_support)
      : ctx_(std::move(ctx)), concepts_(std::move(concepts)), min_support_(min_support) {
    for (std::size_t i = 0; i < concepts_.size(); ++i) {
      by_intent_.emplace(concepts_[i].intent, i);
      by_extent_.emplace(concepts_[i].extent, i);
    }
    upper_.resize(concepts_.size());
    lower_.resize(concepts_.size());
    if (auto t = find_by_extent(ctx_->all_objects())) top_ = *t;
    else if (!concepts_.empty()) top_ = find_by_intent(ctx_->closure(ctx_->empty_attributes())).value();
    bottom_ = find_by_intent(ctx_->closure(ctx_->all_attributes()));
  }

  const FormalContext& context() const noexcept { return *ctx_; }
  const std::shared_ptr<const FormalContext>& context_ptr() const noexcept { return ctx_; }
  std::size_t size() const noexcept { return concepts_.size(); }
  const std::vector<FormalConcept>& concepts() const noexcept { return concepts_; }
  const FormalConcept& operator[](std::size_t i) const { return concepts_.at(i); }
  std::size_t min_support() const noexcept { return min_support_; }

  std::size_t top() const {
    if (!top_) throw Error("lattice is empty");
    return *top_;
  }
  std::optional<std::size_t> bottom() const noexcept { return bottom_; }

  bool has_covers() const noexcept { return covers_built_; }
  // (lower, upper) index pairs, sorted.
  const std::vector<std::pair<std::size_t, std::size_t>>& covers() const noexcept { return covers_; }
  const std::vector<std::size_t>& upper_neighbors(std::size_t i) const { return upper_.at(i); }
  const std::vector<std::size_t>& lower_neighbors(std::size_t i) const { return lower_.at(i); }

  std::optional<std::size_t> find_by_intent(const Bitset& intent) const {
    auto it = by_intent_.find(intent);
    if (it == by_intent_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_by_extent(const Bitset& extent) const {
    auto it = by_extent_.find(extent);
    if (it == by_extent_.end()) return std::nullopt;
    return it->second;
  }

  // Concept i below-or-equal concept j.
  bool leq(std::size_t i, std::size_t j) const { return concepts_.at(i).extent.is_subset_of(concepts_.at(j).extent); }

  std::optional<std::size_t> object_concept(std::size_t g) const {
    return find_by_intent(ctx_->row(g));
  }
  std::optional<std::size_t> attribute_concept(std::size_t m) const {
    return find_by_extent(ctx_->column(m));
  }

  std::size_t support(std::size_t i) const { return concepts_.at(i).extent.count(); }
  double relative_support(std::size_t i) const {
    return ctx_->object_count() == 0 ? 1.0 : static_cast<double>(support(i)) / ctx_->object_count();
  }

  void set_covers(std::vector<std::pair<std::size_t, std::size_t>> covers) {
    covers_ = std::move(covers);
    std::sort(covers_.begin(), covers_.end());
    for (auto& u : upper_) u.clear();
    for (auto& l : lower_) l.clear();
    for (auto [lo, hi] : covers_) {
      upper_[lo].push_back(hi);
      lower_[hi].push_back(lo);
    }
    covers_built_ = true;
  }

 private:
  std::shared_ptr<const FormalContext> ctx_;
  std::vector<FormalConcept> concepts_;
  std::size_t min_support_ = 0;
  std::optional<std::size_t> top_;
  std::optional<std::size_t> bottom_;
  bool covers_built_ = false;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;
  std::vector<std::vector<std::size_t>> upper_, lower_;
  std::unordered_map<Bitset, std::size_t, BitsetHash> by_intent_;
  std::unordered_map<Bitset, std::size_t, BitsetHash> by_extent_;
};

namespace detail {

// Close-by-One over attributes. `emit` is called once per concept reachable
// from (A, B) through canonical extensions with attribute index >= from.
template <typename Emit>
void cbo(const FormalContext& ctx, const Bitset& extent, const Bitset& intent, std::size_t from,
         std::size_t min_support, Emit& emit) {
  emit(extent, intent);
  const std::size_t n = ctx.attribute_count();
  for (std::size_t j = from; j < n; ++j) {
    if (intent.test(j)) continue;
    Bitset c = extent & ctx.column(j);
    if (c.count() < min_support) continue;
    Bitset d = ctx.derive_attributes(c);
    if (!d.equal_below(intent, j)) continue;
    cbo(ctx, c, d, j + 1, min_support, emit);
  }
}

// Runs CbO, splitting the first level across workers. Each worker gets its own
// emitter from make_emit(worker_index).
template <typename MakeEmit>
void run_cbo(const FormalContext& ctx, std::size_t min_support, std::size_t workers, MakeEmit make_emit) {
  const Bitset top_extent = ctx.all_objects();
  if (top_extent.count() < min_support) return;
  const Bitset top_intent = ctx.derive_attributes(top_extent);

  struct Branch {
    Bitset extent, intent;
    std::size_t from;
  };
  std::vector<Branch> branches;
  for (std::size_t j = 0; j < ctx.attribute_count(); ++j) {
    if (top_intent.test(j)) continue;
    Bitset c = top_extent & ctx.column(j);
    if (c.count() < min_support) continue;
    Bitset d = ctx.derive_attributes(c);
    if (!d.equal_below(top_intent, j)) continue;
    branches.push_back({std::move(c), std::move(d), j + 1});
  }

  {
    auto emit = make_emit(0);
    emit(top_extent, top_intent);
  }
  workers = std::max<std::size_t>(1, std::min(workers, branches.size()));
  if (workers == 1) {
    auto emit = make_emit(0);
    for (const auto& b : branches) cbo(ctx, b.extent, b.intent, b.from, min_support, emit);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      auto emit = make_emit(w);
      for (std::size_t i; (i = next.fetch_add(1)) < branches.size();)
        cbo(ctx, branches[i].extent, branches[i].intent, branches[i].from, min_support, emit);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Upper covers of each concept via lower-neighbour generation over attributes.
inline std::vector<std::pair<std::size_t, std::size_t>> compute_covers(const ConceptLattice& lattice) {
  const auto& ctx = lattice.context();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& [a, b] = lattice[i];
    Bitset candidates = ~b;
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
      if (b.test(m)) continue;
      Bitset a1 = a & ctx.column(m);
      if (a1.count() < lattice.min_support()) {
        candidates.reset(m);
        continue;
      }
      Bitset b1 = ctx.derive_attributes(a1);
      Bitset extra = b1 - b;
      extra.reset(m);
      if (extra.intersects(candidates)) {
        candidates.reset(m);
      } else {
        auto lo = lattice.find_by_intent(b1);
        if (!lo) throw Error("cover target missing from lattice");
        out.emplace_back(*lo, i);
      }
    }
  }
  return out;
}

/// All concepts of ctx, lectically ordered by intent, optionally with covers.
inline ConceptLattice enumerate_concepts(std::shared_ptr<const FormalContext> ctx, const EnumerationOptions& opts = {}) {
  if (ctx->attribute_count() > opts.attribute_limit)
    throw CapacityExceeded(ctx->attribute_count(), opts.attribute_limit);
  std::vector<std::vector<FormalConcept>> parts(std::max<std::size_t>(1, opts.workers));
  detail::run_cbo(*ctx, opts.min_support, opts.workers, [&](std::size_t w) {
    return [&part = parts[w]](const Bitset& e, const Bitset& i) { part.push_back({e, i}); };
  });
  std::vector<FormalConcept> all;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(all));
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return lectic_less(x.intent, y.intent); });
  ConceptLattice lattice(std::move(ctx), std::move(all), opts.min_support);
  if (opts.compute_covers) lattice.set_covers(compute_covers(lattice));
  return lattice;
}

inline ConceptLattice enumerate_concepts(const FormalContext& ctx, const EnumerationOptions& opts = {}) {
  return enumerate_concepts(std::make_shared<const FormalContext>(ctx), opts);
}

/// Number of concepts (with at least min_support objects) without storing them.
inline std::size_t count_concepts(const FormalContext& ctx, std::size_t min_support = 0, std::size_t workers = 1) {
  std::vector<std::size_t> counts(std::max<std::size_t>(1, workers), 0);
  detail::run_cbo(ctx, min_support, workers, [&](std::size_t w) {
    return [&c = counts[w]](const Bitset&, const Bitset&) { ++c; };
  });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

/// Iceberg: concepts whose extent has at least minsupp objects.
inline ConceptLattice iceberg(std::shared_ptr<const FormalContext> ctx, std::size_t minsupp) {
  EnumerationOptions opts;
  opts.min_support = minsupp;
  return enumerate_concepts(std::move(ctx), opts);
}

inline ConceptLattice iceberg(const FormalContext& ctx, std::size_t minsupp) {
  return iceberg(std::make_shared<const FormalContext>(ctx), minsupp);
}

/// Closure of every attribute subset, deduplicated. Test oracle only.
inline std::vector<FormalConcept> brute_force_concepts(const FormalContext& ctx) {
  constexpr std::size_t limit = 20;
  const std::size_t n = ctx.attribute_count();
  if (n > limit) throw CapacityExceeded(n, limit);
  std::unordered_set<Bitset, BitsetHash> seen;
  std::vector<FormalConcept> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset b(n);
    for (std::size_t m = 0; m < n; ++m)
      if (mask >> m & 1u) b.set(m);
    Bitset e = ctx.derive_objects(b);
    Bitset i = ctx.derive_attributes(e);
    if (seen.insert(i).second) out.push_back({std::move(e), std::move(i)});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return lectic_less(x.intent, y.intent); });
  return out;
}

/// Concepts covering the bottom element.
inline std::vector<std::size_t> atoms(const ConceptLattice& lattice) {
  auto bot = lattice.bottom();
  if (!bot || !lattice.has_covers()) return {};
  return lattice.upper_neighbors(*bot);
}

/// Inclusion-minimal subsets of a closed intent whose closure is the intent.
/// Levelwise search over free sets (sets whose every proper subset has a
/// strictly larger extent), stopping below any generator found.
inline std::vector<Bitset> minimal_generators(const FormalContext& ctx, const Bitset& intent) {
  if (ctx.closure(intent) != intent) throw NotClosed("attribute set is not a closed intent");
  const Bitset target = ctx.derive_objects(intent);
  const auto members = intent.indices();
  std::vector<Bitset> generators;

  struct Candidate {
    Bitset set;
    Bitset extent;
    std::size_t last;  // index into members of the largest element, or npos
  };
  std::vector<Candidate> level{{Bitset(ctx.attribute_count()), ctx.all_objects(), Bitset::npos}};
  while (!level.empty()) {
    std::vector<Candidate> open;
    std::unordered_set<Bitset, BitsetHash> open_sets;
    for (auto& c : level) {
      if (c.extent == target) {
        generators.push_back(c.set);
      } else {
        open_sets.insert(c.set);
        open.push_back(std::move(c));
      }
    }
    std::vector<Candidate> next;
    for (const auto& c : open) {
      for (std::size_t k = c.last == Bitset::npos ? 0 : c.last + 1; k < members.size(); ++k) {
        Bitset s = c.set;
        s.set(members[k]);
        Bitset e = c.extent & ctx.column(members[k]);
        if (e == c.extent) continue;  // not free
        // Every immediate subset must be free and not a generator.
        bool ok = true;
        s.for_each([&](std::size_t x) {
          if (!ok || x == members[k]) return;
          Bitset sub = s;
          sub.reset(x);
          if (!open_sets.count(sub)) ok = false;
          else if (ctx.derive_objects(sub) == e) ok = false;
        });
        if (ok) next.push_back({std::move(s), std::move(e), k});
      }
    }
    level = std::move(next);
  }
  std::sort(generators.begin(), generators.end(), [](const Bitset& a, const Bitset& b) {
    if (a.count() != b.count()) return a.count() < b.count();
    return lectic_less(b, a);
  });
  return generators;
}

/// Concepts whose extent contains g (the principal filter of g's object
/// concept); with include_neighbors also every upper and lower neighbour of
/// those concepts.
inline std::vector<std::size_t> local_view(const ConceptLattice& lattice, std::size_t g, bool include_neighbors) {
  if (g >= lattice.context().object_count()) throw NoSuchObject("object index " + std::to_string(g) + " out of range");
  std::vector<char> in(lattice.size(), 0);
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (lattice[i].extent.test(g)) in[i] = 1;
  if (include_neighbors) {
    if (!lattice.has_covers()) throw Error("local view with neighbours needs covers");
    auto base = in;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      if (!base[i]) continue;
      for (auto u : lattice.upper_neighbors(i)) in[u] = 1;
      for (auto l : lattice.lower_neighbors(i)) in[l] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lattice.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> local_view(const ConceptLattice& lattice, const std::string& object,
                                           bool include_neighbors) {
  auto g = lattice.context().find_object(object);
  if (!g) throw NoSuchObject("no object '" + object + "'");
  return local_view(lattice, *g, include_neighbors);
}

/// Least upper bound: extent is the closure of the union of extents.
inline FormalConcept concept_join(const ConceptLattice& lattice, std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidArgument("join of an empty concept set");
  const auto& ctx = lattice.context();
  Bitset intent = lattice[members.front()].intent;
  for (auto i : members) intent &= lattice[i].intent;
  Bitset extent = ctx.derive_objects(intent);
  return {std::move(extent), std::move(intent)};
}

/// Greatest lower bound: intent is the closure of the union of intents.
inline FormalConcept concept_meet(const ConceptLattice& lattice, std::span<const std::size_t> members) {
  if (members.empty()) throw InvalidArgument("meet of an empty concept set");
  const auto& ctx = lattice.context();
  Bitset extent = lattice[members.front()].extent;
  for (auto i : members) extent &= lattice[i].extent;
  Bitset intent = ctx.derive_attributes(extent);
  return {std::move(extent), std::move(intent)};
}

/// Attribute concept of p lies below that of q, i.e. p' is a subset of q'.
inline bool dominated_by(const ConceptLattice& lattice, std::size_t p, std::size_t q) {
  const auto& ctx = lattice.context();
  if (p >= ctx.attribute_count() || q >= ctx.attribute_count()) throw UnknownAttribute("attribute index out of range");
  return ctx.column(p).is_subset_of(ctx.column(q));
}

/// Number of the given (leaf) concepts whose intent contains attribute p.
inline std::size_t leaf_coverage(const ConceptLattice& lattice, std::size_t p, std::span<const std::size_t> leaf_concepts) {
  if (p >= lattice.context().attribute_count()) throw UnknownAttribute("attribute index out of range");
  std::size_t n = 0;
  for (auto c : leaf_concepts)
    if (lattice[c].intent.test(p)) ++n;
  return n;
}

/// Set of extents, for comparing closure systems across contexts over the same objects.
inline std::unordered_set<Bitset, BitsetHash> extent_family(const ConceptLattice& lattice) {
  std::unordered_set<Bitset, BitsetHash> out;
  for (const auto& c : lattice.concepts()) out.insert(c.extent);
  return out;
}

}  // namespace cview
