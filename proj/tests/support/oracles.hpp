#pragma once

// Slow, obviously-correct reference implementations used to check the library.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cview.hpp"

namespace oracle {

using cview::Bitset;
using cview::FormalContext;

inline FormalContext random_context(cview::Rng& rng, std::size_t n_obj, std::size_t n_attr, double density = 0.45) {
  std::vector<std::string> g, m;
  for (std::size_t i = 0; i < n_obj; ++i) g.push_back("g" + std::to_string(i));
  for (std::size_t j = 0; j < n_attr; ++j) m.push_back("m" + std::to_string(j));
  std::vector<Bitset> rows(n_obj, Bitset(n_attr));
  const auto threshold = static_cast<std::uint64_t>(density * 1000);
  for (auto& r : rows)
    for (std::size_t j = 0; j < n_attr; ++j)
      if (rng.below(1000) < threshold) r.set(j);
  return FormalContext(g, m, rows);
}

// By value, so range-for over the result does not dangle.
inline std::vector<cview::FormalConcept> concepts_of(const FormalContext& ctx) {
  return cview::enumerate_concepts(ctx).concepts();
}

inline std::vector<cview::FormalConcept> concepts_of(const std::shared_ptr<const FormalContext>& ctx) {
  return concepts_of(*ctx);
}

// A' by scanning every attribute column cell by cell.
inline Bitset derive_attributes(const FormalContext& ctx, const Bitset& a) {
  Bitset out(ctx.attribute_count());
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m) {
    bool all = true;
    for (std::size_t g = 0; g < ctx.object_count(); ++g)
      if (a.test(g) && !ctx.incident(g, m)) all = false;
    if (all) out.set(m);
  }
  return out;
}

inline Bitset derive_objects(const FormalContext& ctx, const Bitset& b) {
  Bitset out(ctx.object_count());
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    bool all = true;
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
      if (b.test(m) && !ctx.incident(g, m)) all = false;
    if (all) out.set(g);
  }
  return out;
}

inline FormalContext transpose(const FormalContext& ctx) {
  std::vector<Bitset> rows(ctx.attribute_count(), Bitset(ctx.object_count()));
  for (std::size_t g = 0; g < ctx.object_count(); ++g)
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
      if (ctx.incident(g, m)) rows[m].set(g);
  return FormalContext(ctx.attributes(), ctx.objects(), rows);
}

// All subsets of {0..n-1} as bitsets.
inline std::vector<Bitset> power_set(std::size_t n) {
  std::vector<Bitset> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset b(n);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) b.set(i);
    out.push_back(b);
  }
  return out;
}

// Subsets of a given set.
inline std::vector<Bitset> subsets_of(const Bitset& s) {
  const auto idx = s.indices();
  std::vector<Bitset> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << idx.size()); ++mask) {
    Bitset b(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      if (mask >> i & 1u) b.set(idx[i]);
    out.push_back(b);
  }
  return out;
}

// Extents as (extent, intent) set keyed by extent bit strings.
inline std::set<std::pair<std::string, std::string>> concept_set(const std::vector<cview::FormalConcept>& cs) {
  std::set<std::pair<std::string, std::string>> s;
  for (const auto& c : cs) s.emplace(c.extent.to_string(), c.intent.to_string());
  return s;
}

inline std::set<std::string> extent_strings(const std::vector<cview::FormalConcept>& cs) {
  std::set<std::string> s;
  for (const auto& c : cs) s.insert(c.extent.to_string());
  return s;
}

inline std::set<std::string> extent_strings(const cview::ConceptLattice& l) { return extent_strings(l.concepts()); }

// Cover pairs from the full pairwise inclusion matrix: i < j with nothing in between.
inline std::set<std::pair<std::size_t, std::size_t>> covers(const std::vector<cview::FormalConcept>& cs) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  const auto n = cs.size();
  auto lt = [&](std::size_t i, std::size_t j) { return cs[i].extent.is_proper_subset_of(cs[j].extent); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!lt(i, j)) continue;
      bool between = false;
      for (std::size_t k = 0; k < n && !between; ++k) between = lt(i, k) && lt(k, j);
      if (!between) out.emplace(i, j);
    }
  return out;
}

// Every inclusion-minimal subset D of the intent with closure(D) == intent.
inline std::set<std::string> minimal_generators(const FormalContext& ctx, const Bitset& intent) {
  std::vector<Bitset> gens;
  for (const auto& d : subsets_of(intent))
    if (ctx.closure(d) == intent) gens.push_back(d);
  std::set<std::string> out;
  for (const auto& d : gens) {
    bool minimal = true;
    for (const auto& e : gens)
      if (e.is_proper_subset_of(d)) minimal = false;
    if (minimal) out.insert(d.to_string());
  }
  return out;
}

// Intersections of all subfamilies of a family of object sets (with the full set).
inline std::set<std::string> intersection_closure(std::size_t n, const std::vector<Bitset>& family) {
  std::set<std::string> seen;
  std::vector<Bitset> closed{Bitset(n, true)};
  seen.insert(closed.front().to_string());
  for (const auto& f : family) {
    const auto current = closed;
    for (const auto& c : current) {
      Bitset x = c & f;
      if (seen.insert(x.to_string()).second) closed.push_back(x);
    }
  }
  return seen;
}

// Random complete labelled many-valued context with integer-named domains.
inline cview::ManyValuedContext random_mv(cview::Rng& rng, std::size_t n_obj, std::size_t n_attr, std::size_t min_vals,
                                          std::size_t max_vals, std::size_t n_classes = 2) {
  std::vector<cview::ValueDomain> doms;
  for (std::size_t m = 0; m < n_attr; ++m) {
    const std::size_t nv = min_vals + rng.below(max_vals - min_vals + 1);
    std::vector<std::string> vals;
    for (std::size_t v = 0; v < nv; ++v) vals.push_back("v" + std::to_string(v));
    doms.emplace_back("a" + std::to_string(m), vals);
  }
  auto schema = std::make_shared<cview::Schema>(doms);
  std::vector<std::string> ids;
  std::vector<std::vector<cview::ManyValuedContext::Cell>> rows;
  std::vector<std::optional<std::string>> labels;
  for (std::size_t g = 0; g < n_obj; ++g) {
    ids.push_back(std::to_string(g));
    std::vector<cview::ManyValuedContext::Cell> r;
    for (std::size_t m = 0; m < n_attr; ++m) r.push_back(rng.below((*schema)[m].size()));
    rows.push_back(r);
    labels.push_back("c" + std::to_string(rng.below(n_classes)));
  }
  return cview::ManyValuedContext(schema, ids, rows, labels, "class");
}

}  // namespace oracle
