#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cview/errors.hpp"
#include "cview/formal_context.hpp"
#include "cview/mvcontext.hpp"
#include "cview/rng.hpp"
#include "cview/views.hpp"

namespace cview {

// ---------------------------------------------------------------------------
// Distances and clustering

/// Number of attributes on which two rows differ; two absent cells agree.
inline std::size_t hamming(const std::vector<ManyValuedContext::Cell>& a, const std::vector<ManyValuedContext::Cell>& b) {
  std::size_t d = 0;
  for (std::size_t m = 0; m < a.size(); ++m)
    if (a[m] != b[m]) ++d;
  return d;
}

/// Dense symmetric distance matrix over the objects of a context.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const ManyValuedContext& ctx) : n_(ctx.object_count()), d_(n_ * n_, 0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        auto v = static_cast<std::uint32_t>(hamming(ctx.row(i), ctx.row(j)));
        d_[i * n_ + j] = d_[j * n_ + i] = v;
      }
  }
  std::size_t size() const noexcept { return n_; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> d_;
};

struct Clustering {
  std::vector<std::size_t> medoids;     // object indices, ascending
  std::vector<std::size_t> assignment;  // per object: position in `medoids`
  std::uint64_t cost = 0;
  std::size_t swaps = 0;
};

namespace detail {

// Objects sorted by (row, id) so that results do not depend on input order.
inline std::vector<std::size_t> canonical_order(const ManyValuedContext& ctx) {
  std::vector<std::size_t> order(ctx.object_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(ctx.row(a), ctx.object(a)) < std::tie(ctx.row(b), ctx.object(b));
  });
  return order;
}

}  // namespace detail

/// PAM under Hamming distance: greedy build, then best-improvement swaps
/// (at most max_swaps). Equal-cost choices are broken by a random priority
/// drawn from rng_seed over the canonically ordered objects.
inline Clustering kmedoids(const ManyValuedContext& ctx, const DistanceMatrix& dist, std::size_t k, std::uint64_t rng_seed,
                           std::size_t max_swaps = 100) {
  const std::size_t n = ctx.object_count();
  if (k < 1) throw InvalidArgument("k must be at least 1");
  if (k > n) throw TooManyClusters("k = " + std::to_string(k) + " exceeds object count " + std::to_string(n));

  const auto order = detail::canonical_order(ctx);
  std::vector<std::size_t> rank(n);  // canonical position -> priority
  std::iota(rank.begin(), rank.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(std::span<std::size_t>(rank));
  std::vector<std::size_t> priority(n);  // object index -> priority (lower wins)
  for (std::size_t p = 0; p < n; ++p) priority[order[p]] = rank[p];

  constexpr auto inf = std::numeric_limits<std::int64_t>::max();
  std::vector<std::size_t> medoids;
  std::vector<char> is_medoid(n, 0);
  std::vector<std::int64_t> d1(n, inf), d2(n, inf);
  std::vector<std::size_t> nearest(n, 0);

  auto refresh = [&] {
    for (std::size_t o = 0; o < n; ++o) {
      d1[o] = d2[o] = inf;
      for (std::size_t i = 0; i < medoids.size(); ++i) {
        const std::int64_t d = dist(o, medoids[i]);
        if (d < d1[o]) {
          d2[o] = d1[o];
          d1[o] = d;
          nearest[o] = i;
        } else if (d < d2[o]) {
          d2[o] = d;
        }
      }
    }
  };

  // build
  while (medoids.size() < k) {
    std::optional<std::size_t> best;
    std::int64_t best_gain = -1;
    for (std::size_t x = 0; x < n; ++x) {
      if (is_medoid[x]) continue;
      std::int64_t gain = 0;
      for (std::size_t o = 0; o < n; ++o) {
        const std::int64_t d = dist(o, x);
        gain += medoids.empty() ? -d : std::max<std::int64_t>(d1[o] - d, 0);
      }
      if (!best || gain > best_gain || (gain == best_gain && priority[x] < priority[*best])) {
        best = x;
        best_gain = gain;
      }
    }
    medoids.push_back(*best);
    is_medoid[*best] = 1;
    refresh();
  }

  // swap: total change for replacing medoid i by h is shared + delta[i]
  std::size_t swaps = 0;
  std::vector<std::int64_t> delta(k);
  while (swaps < max_swaps) {
    std::int64_t best_total = 0;
    std::optional<std::pair<std::size_t, std::size_t>> best;  // (i, h)
    for (std::size_t h = 0; h < n; ++h) {
      if (is_medoid[h]) continue;
      std::fill(delta.begin(), delta.end(), 0);
      std::int64_t shared = 0;
      for (std::size_t o = 0; o < n; ++o) {
        const std::int64_t doh = dist(o, h);
        const std::int64_t stay = std::min<std::int64_t>(doh - d1[o], 0);
        shared += stay;
        const std::int64_t second = d2[o] == inf ? doh : std::min(doh, d2[o]);
        delta[nearest[o]] += (second - d1[o]) - stay;
      }
      for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t total = shared + delta[i];
        if (total >= 0) continue;
        bool better = !best || total < best_total;
        if (!better && total == best_total) {
          auto key = std::make_pair(priority[h], priority[medoids[i]]);
          auto cur = std::make_pair(priority[best->second], priority[medoids[best->first]]);
          better = key < cur;
        }
        if (better) {
          best_total = total;
          best = std::make_pair(i, h);
        }
      }
    }
    if (!best) break;
    is_medoid[medoids[best->first]] = 0;
    medoids[best->first] = best->second;
    is_medoid[best->second] = 1;
    refresh();
    ++swaps;
  }

  Clustering out;
  out.swaps = swaps;
  out.medoids = medoids;
  std::sort(out.medoids.begin(), out.medoids.end());
  out.assignment.resize(n);
  for (std::size_t o = 0; o < n; ++o) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (dist(o, out.medoids[i]) < dist(o, out.medoids[best])) best = i;
    out.assignment[o] = best;
    out.cost += dist(o, out.medoids[best]);
  }
  return out;
}

inline Clustering kmedoids(const ManyValuedContext& ctx, std::size_t k, std::uint64_t rng_seed) {
  if (k > ctx.object_count()) throw TooManyClusters("k = " + std::to_string(k) + " exceeds object count");
  DistanceMatrix dist(ctx);
  return kmedoids(ctx, dist, k, rng_seed);
}

/// Medoid objects ("center objects") of a k-medoids clustering.
inline std::vector<std::size_t> kmedoids_select(const ManyValuedContext& ctx, std::size_t k, std::uint64_t rng_seed) {
  return kmedoids(ctx, k, rng_seed).medoids;
}

/// Mean silhouette; a point alone in its cluster scores 0, and 0/0 is 0.
inline double silhouette(const DistanceMatrix& dist, std::span<const std::size_t> assignment) {
  const std::size_t n = assignment.size();
  std::map<std::size_t, std::size_t> sizes;
  for (auto c : assignment) ++sizes[c];
  if (sizes.size() < 2) throw Undefined("silhouette needs at least two non-empty clusters");
  std::vector<std::size_t> cluster_ids;
  for (auto& [c, _] : sizes) cluster_ids.push_back(c);
  double total = 0.0;
  std::vector<double> sums(cluster_ids.size());
  for (std::size_t o = 0; o < n; ++o) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      if (p == o) continue;
      auto ci = std::lower_bound(cluster_ids.begin(), cluster_ids.end(), assignment[p]) - cluster_ids.begin();
      sums[ci] += dist(o, p);
    }
    const auto own = std::lower_bound(cluster_ids.begin(), cluster_ids.end(), assignment[o]) - cluster_ids.begin();
    const std::size_t own_size = sizes[assignment[o]];
    if (own_size == 1) continue;
    const double a = sums[own] / static_cast<double>(own_size - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cluster_ids.size(); ++c)
      if (static_cast<std::ptrdiff_t>(c) != own) b = std::min(b, sums[c] / static_cast<double>(sizes[cluster_ids[c]]));
    const double denom = std::max(a, b);
    if (denom > 0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

inline double silhouette(const ManyValuedContext& ctx, std::span<const std::size_t> assignment) {
  if (assignment.size() != ctx.object_count()) throw InvalidArgument("assignment size does not match object count");
  return silhouette(DistanceMatrix(ctx), assignment);
}

struct SilhouetteSweep {
  std::vector<std::pair<std::size_t, double>> scores;  // (k, score), k ascending
  std::size_t best_k = 0;
  double best_score = 0.0;
};

/// k-medoids and silhouette for every k in [k_min, k_max]; the best k is the
/// smallest one reaching the maximal score.
inline SilhouetteSweep silhouette_sweep(const ManyValuedContext& ctx, std::size_t k_min, std::size_t k_max,
                                        std::uint64_t rng_seed, std::size_t workers = 1) {
  if (k_min < 2 || k_max < k_min) throw InvalidArgument("sweep needs 2 <= k_min <= k_max");
  k_max = std::min(k_max, ctx.object_count());
  const DistanceMatrix dist(ctx);
  SilhouetteSweep out;
  if (k_max < k_min) return out;
  out.scores.resize(k_max - k_min + 1);
  std::atomic<std::size_t> next{0};
  auto job = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < out.scores.size();) {
      const std::size_t k = k_min + i;
      auto c = kmedoids(ctx, dist, k, rng_seed);
      out.scores[i] = {k, silhouette(dist, c.assignment)};
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::max<std::size_t>(1, workers); ++w) pool.emplace_back(job);
  job();
  for (auto& t : pool) t.join();
  out.best_k = out.scores.front().first;
  out.best_score = out.scores.front().second;
  for (auto [k, s] : out.scores)
    if (s > out.best_score) {
      out.best_k = k;
      out.best_score = s;
    }
  return out;
}

// ---------------------------------------------------------------------------
// View reductions

/// View restricted to some of its objects (positions in the view, kept in the given order).
inline ViewContext select_objects(const ViewContext& view, std::span<const std::size_t> keep) {
  ViewContext out = view;
  out.context = std::make_shared<const FormalContext>(view.formal().object_subcontext(keep));
  for (auto& leaves : out.object_leaves) {
    std::vector<std::size_t> sub;
    for (auto g : keep) sub.push_back(leaves.at(g));
    leaves = std::move(sub);
  }
  return out;
}

/// View restricted to some of its columns (kept in the given order).
inline ViewContext select_columns(const ViewContext& view, std::span<const std::size_t> keep) {
  ViewContext out = view;
  out.context = std::make_shared<const FormalContext>(view.formal().attribute_subcontext(keep));
  out.columns.clear();
  for (auto j : keep) out.columns.push_back(view.columns.at(j));
  return out;
}

/// Keeps the predicate columns whose data attribute is among the top_k by
/// score (descending; equal scores by attribute name). scores is indexed by
/// schema attribute.
inline ViewContext select_attributes(const ViewContext& view, std::span<const double> scores, std::size_t top_k,
                                     std::vector<std::string>* warnings = nullptr) {
  const auto& schema = view.schema();
  if (scores.size() != schema.size()) throw InvalidArgument("one score per data attribute is required");
  std::set<std::size_t> present;
  for (const auto& c : view.columns) {
    if (!c.predicate) throw InvalidArgument("attribute selection needs predicate columns");
    present.insert(c.predicate->attribute);
  }
  if (top_k >= present.size()) {
    if (top_k > present.size() && warnings)
      warnings->push_back("top_k " + std::to_string(top_k) + " exceeds the " + std::to_string(present.size()) +
                          " attributes in the view; keeping all");
    return view;
  }
  std::vector<std::size_t> ranked(present.begin(), present.end());
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return schema[a].name() < schema[b].name();
  });
  std::set<std::size_t> kept(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top_k));
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < view.columns.size(); ++j)
    if (kept.count(view.columns[j].predicate->attribute)) cols.push_back(j);
  return select_columns(view, cols);
}

/// Object-induced subviews, one per class label. labels[g] belongs to the view's g-th object.
inline std::map<std::string, ViewContext> partition_by_class(const ViewContext& view,
                                                             std::span<const std::optional<std::string>> labels) {
  const auto& ctx = view.formal();
  if (labels.size() != ctx.object_count()) throw InvalidArgument("one label per view object is required");
  std::map<std::string, std::vector<std::size_t>> parts;
  for (std::size_t g = 0; g < labels.size(); ++g) {
    if (!labels[g]) throw MissingLabel("object '" + ctx.object(g) + "' has no label");
    parts[*labels[g]].push_back(g);
  }
  std::map<std::string, ViewContext> out;
  for (const auto& [label, keep] : parts) out.emplace(label, select_objects(view, keep));
  return out;
}

/// Labels of the view's objects, looked up by object id in a labelled context.
inline std::vector<std::optional<std::string>> view_labels(const ViewContext& view, const ManyValuedContext& ctx) {
  std::vector<std::optional<std::string>> out;
  for (const auto& id : view.formal().objects()) out.push_back(ctx.label(ctx.require_object(id)));
  return out;
}

/// Columns whose predicate has the given direction.
inline ViewContext ordinal_factor(const ViewContext& view, Direction dir) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < view.columns.size(); ++j) {
    const auto& p = view.columns[j].predicate;
    if (!p) throw InvalidArgument("ordinal factors need predicate columns");
    if (p->direction == dir) cols.push_back(j);
  }
  return select_columns(view, cols);
}

/// Ordered grades for one attribute; every domain value maps to one grade.
struct Grading {
  std::vector<std::string> grades;
  std::map<std::string, std::string> grade_of;
};

using GradeMap = std::map<std::string, Grading>;

/// Merges predicate columns whose thresholds fall in the same grade. The
/// merged column is the union of the members' columns, which on a threshold
/// chain is the column of the extreme member (largest <= threshold, smallest
/// >= threshold); that member's predicate is kept as provenance. A group of
/// one column whose grade is named like its value is left untouched.
inline ViewContext aggregate_attributes(const ViewContext& view, const GradeMap& grades) {
  const auto& schema = view.schema();
  // grade index per (attribute, value)
  std::map<std::size_t, std::vector<std::size_t>> level;
  for (const auto& [name, g] : grades) {
    const auto m = schema.require(name);
    const auto& dom = schema[m];
    std::vector<std::size_t> lv(dom.size());
    for (std::size_t v = 0; v < dom.size(); ++v) {
      auto it = g.grade_of.find(dom.value(v));
      if (it == g.grade_of.end()) throw InvalidGrades("value '" + dom.value(v) + "' of '" + name + "' has no grade");
      auto pos = std::find(g.grades.begin(), g.grades.end(), it->second);
      if (pos == g.grades.end()) throw InvalidGrades("grade '" + it->second + "' is not declared for '" + name + "'");
      lv[v] = static_cast<std::size_t>(pos - g.grades.begin());
      if (v > 0 && lv[v] < lv[v - 1]) throw InvalidGrades("grading of '" + name + "' is not order-preserving");
    }
    for (const auto& [value, _] : g.grade_of)
      if (!dom.find(value)) throw InvalidGrades("'" + value + "' is not a value of '" + name + "'");
    level[m] = std::move(lv);
  }

  const auto& ctx = view.formal();
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::tuple<std::size_t, int, std::size_t>, std::size_t> group_of;
  for (std::size_t j = 0; j < view.columns.size(); ++j) {
    const auto& p = view.columns[j].predicate;
    if (!p) throw InvalidArgument("aggregation needs predicate columns");
    auto it = level.find(p->attribute);
    if (it == level.end() || view.columns[j].grade) {
      groups.push_back({j});
      continue;
    }
    auto key = std::make_tuple(p->attribute, static_cast<int>(p->direction), it->second[p->value]);
    auto [pos, fresh] = group_of.emplace(key, groups.size());
    if (fresh) groups.push_back({j});
    else groups[pos->second].push_back(j);
  }

  ViewContext out = view;
  out.columns.clear();
  std::vector<std::string> names;
  std::vector<Bitset> cols;
  for (const auto& grp : groups) {
    const auto& first = view.columns[grp.front()];
    const auto& p0 = *first.predicate;
    auto lv = level.find(p0.attribute);
    if (lv == level.end() || first.grade) {
      out.columns.push_back(first);
      names.push_back(ctx.attribute(grp.front()));
      cols.push_back(ctx.column(grp.front()));
      continue;
    }
    const auto& grading = grades.at(schema[p0.attribute].name());
    const auto& grade = grading.grades[lv->second[p0.value]];
    if (grp.size() == 1 && grade == schema[p0.attribute].value(p0.value)) {
      out.columns.push_back(first);
      names.push_back(ctx.attribute(grp.front()));
      cols.push_back(ctx.column(grp.front()));
      continue;
    }
    Bitset merged = ctx.empty_objects();
    Predicate extreme = p0;
    for (auto j : grp) {
      merged |= ctx.column(j);
      const auto& p = *view.columns[j].predicate;
      if (p.direction == Direction::leq ? p.value > extreme.value : p.value < extreme.value) extreme = p;
    }
    out.columns.push_back(ColumnInfo{std::nullopt, std::nullopt, extreme, grade});
    names.push_back(schema[p0.attribute].name() + ":" + direction_symbol(p0.direction) + ":[" + grade + "]");
    cols.push_back(std::move(merged));
  }
  std::vector<Bitset> rows(ctx.object_count(), Bitset(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j].for_each([&](std::size_t g) { rows[g].set(j); });
  out.context = std::make_shared<const FormalContext>(ctx.objects(), std::move(names), std::move(rows));
  return out;
}

}  // namespace cview
