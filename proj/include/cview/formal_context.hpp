#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cview/bitset.hpp"
#include "cview/errors.hpp"

namespace cview {

/// Binary context (G, M, I) held as one bitset per object (row over M) and
/// one per attribute (column over G). Immutable after construction.
class FormalContext {
 public:
  FormalContext() = default;

  // rows[g] must have size attributes.size().
  FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes, std::vector<Bitset> rows)
      : objects_(std::move(objects)), attributes_(std::move(attributes)), rows_(std::move(rows)) {
    if (rows_.size() != objects_.size()) throw InvalidArgument("row count does not match object count");
    for (const auto& r : rows_)
      if (r.size() != attributes_.size()) throw InvalidArgument("row width does not match attribute count");
    build_columns();
    index_names();
  }

  static FormalContext from_pairs(std::vector<std::string> objects, std::vector<std::string> attributes,
                                  std::span<const std::pair<std::size_t, std::size_t>> incidence) {
    std::vector<Bitset> rows(objects.size(), Bitset(attributes.size()));
    for (auto [g, m] : incidence) {
      if (g >= objects.size() || m >= attributes.size()) throw InvalidArgument("incidence index out of range");
      rows[g].set(m);
    }
    return FormalContext(std::move(objects), std::move(attributes), std::move(rows));
  }

  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::string& object(std::size_t g) const { return objects_.at(g); }
  const std::string& attribute(std::size_t m) const { return attributes_.at(m); }
  const Bitset& row(std::size_t g) const { return rows_.at(g); }
  const Bitset& column(std::size_t m) const { return columns_.at(m); }
  bool incident(std::size_t g, std::size_t m) const { return rows_.at(g).test(m); }

  std::optional<std::size_t> find_object(const std::string& name) const {
    auto it = object_index_.find(name);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_attribute(const std::string& name) const {
    auto it = attribute_index_.find(name);
    if (it == attribute_index_.end()) return std::nullopt;
    return it->second;
  }

  Bitset empty_objects() const { return Bitset(object_count()); }
  Bitset all_objects() const { return Bitset(object_count(), true); }
  Bitset empty_attributes() const { return Bitset(attribute_count()); }
  Bitset all_attributes() const { return Bitset(attribute_count(), true); }

  // A' : attributes shared by every object in A.
  Bitset derive_attributes(const Bitset& objects) const {
    const std::size_t n = objects.count();
    // pick whichever side scans fewer words
    if (n * words_per_row() <= attribute_count() * words_per_column()) {
      Bitset out = all_attributes();
      objects.for_each([&](std::size_t g) { out &= rows_[g]; });
      return out;
    }
    Bitset out = empty_attributes();
    for (std::size_t m = 0; m < attribute_count(); ++m)
      if (objects.is_subset_of(columns_[m])) out.set(m);
    return out;
  }

  // B' : objects having every attribute in B.
  Bitset derive_objects(const Bitset& attrs) const {
    Bitset out = all_objects();
    attrs.for_each([&](std::size_t m) { out &= columns_[m]; });
    return out;
  }

  Bitset closure(const Bitset& attrs) const { return derive_attributes(derive_objects(attrs)); }
  Bitset object_closure(const Bitset& objs) const { return derive_objects(derive_attributes(objs)); }

  std::vector<std::pair<std::size_t, std::size_t>> incidence_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t g = 0; g < rows_.size(); ++g) rows_[g].for_each([&](std::size_t m) { out.emplace_back(g, m); });
    return out;
  }

  FormalContext object_subcontext(std::span<const std::size_t> keep) const {
    std::vector<std::string> names;
    std::vector<Bitset> rows;
    for (auto g : keep) {
      names.push_back(objects_.at(g));
      rows.push_back(rows_.at(g));
    }
    return FormalContext(std::move(names), attributes_, std::move(rows));
  }

  FormalContext attribute_subcontext(std::span<const std::size_t> keep) const {
    std::vector<std::string> names;
    for (auto m : keep) names.push_back(attributes_.at(m));
    std::vector<Bitset> rows(object_count(), Bitset(keep.size()));
    for (std::size_t g = 0; g < object_count(); ++g)
      for (std::size_t j = 0; j < keep.size(); ++j)
        if (rows_[g].test(keep[j])) rows[g].set(j);
    return FormalContext(objects_, std::move(names), std::move(rows));
  }

  friend bool operator==(const FormalContext& a, const FormalContext& b) {
    return a.objects_ == b.objects_ && a.attributes_ == b.attributes_ && a.rows_ == b.rows_;
  }

  // Same incidence matrix, ignoring names.
  bool same_incidence(const FormalContext& o) const {
    return object_count() == o.object_count() && attribute_count() == o.attribute_count() && rows_ == o.rows_;
  }

 private:
  std::size_t words_per_row() const { return (attribute_count() + 63) / 64 + 1; }
  std::size_t words_per_column() const { return (object_count() + 63) / 64 + 1; }

  void build_columns() {
    columns_.assign(attributes_.size(), Bitset(objects_.size()));
    for (std::size_t g = 0; g < rows_.size(); ++g) rows_[g].for_each([&](std::size_t m) { columns_[m].set(g); });
  }

  void index_names() {
    for (std::size_t i = 0; i < objects_.size(); ++i) object_index_.emplace(objects_[i], i);
    for (std::size_t i = 0; i < attributes_.size(); ++i) attribute_index_.emplace(attributes_[i], i);
  }

  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<Bitset> rows_;
  std::vector<Bitset> columns_;
  std::unordered_map<std::string, std::size_t> object_index_;
  std::unordered_map<std::string, std::size_t> attribute_index_;
};

/// Apposition of contexts over the same object list: attributes side by side.
inline FormalContext apposition(std::span<const FormalContext> parts) {
  if (parts.empty()) return FormalContext();
  const auto& objects = parts.front().objects();
  std::vector<std::string> attrs;
  for (const auto& p : parts) {
    if (p.objects() != objects) throw InvalidArgument("apposition requires identical object lists");
    attrs.insert(attrs.end(), p.attributes().begin(), p.attributes().end());
  }
  std::vector<Bitset> rows(objects.size(), Bitset(attrs.size()));
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t g = 0; g < objects.size(); ++g) p.row(g).for_each([&](std::size_t m) { rows[g].set(offset + m); });
    offset += p.attribute_count();
  }
  return FormalContext(objects, std::move(attrs), std::move(rows));
}

/// Drops attributes whose column duplicates an earlier one; keeps first occurrence.
inline FormalContext clarify_attributes(const FormalContext& ctx) {
  std::unordered_map<Bitset, std::size_t, BitsetHash> seen;
  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
    if (seen.emplace(ctx.column(m), m).second) keep.push_back(m);
  return ctx.attribute_subcontext(keep);
}

/// Drops attributes incident with every object.
inline FormalContext drop_full_columns(const FormalContext& ctx) {
  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
    if (!ctx.column(m).all()) keep.push_back(m);
  return ctx.attribute_subcontext(keep);
}

}  // namespace cview
