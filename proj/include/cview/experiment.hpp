#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cview/errors.hpp"
#include "cview/lattice.hpp"
#include "cview/mvcontext.hpp"
#include "cview/rng.hpp"
#include "cview/tree.hpp"
#include "cview/views.hpp"

namespace cview {

/// Stratified k-fold split: each class is shuffled and dealt round-robin,
/// continuing the deal across classes. Returns fold index per object.
inline std::vector<std::size_t> stratified_folds(const ManyValuedContext& ctx, std::size_t k, Rng& rng) {
  if (k < 2) throw InvalidArgument("cross-validation needs at least two folds");
  if (ctx.object_count() < k) throw InvalidArgument("fewer objects than folds");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    if (!ctx.label(g)) throw MissingLabel("object '" + ctx.object(g) + "' has no label");
    by_class[*ctx.label(g)].push_back(g);
  }
  std::vector<std::size_t> fold(ctx.object_count());
  std::size_t deal = 0;
  for (auto& [_, members] : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (auto g : members) fold[g] = deal++ % k;
  }
  return fold;
}

struct ExperimentGrid {
  std::vector<std::size_t> n_trees;
  std::vector<std::size_t> max_depths;
  std::vector<std::uint64_t> seeds;
  std::size_t folds = 4;
};

struct ViewCounts {
  std::size_t leaf = 0, tree = 0, tree_predicate = 0, interordinal_predicate = 0;
};

struct ExperimentRow {
  std::size_t nt = 0, md = 0;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  double acc_train = 0, acc_test = 0, gen_error = 0;
  ViewCounts counts;
};

/// Concept counts of the four forest views of `forest` on all objects of ctx.
inline ViewCounts forest_view_counts(const ManyValuedContext& ctx, const Forest& forest, std::size_t workers = 1) {
  auto f = std::make_shared<const Forest>(forest);
  const auto all = detail::all_indices(ctx.object_count());
  auto count = [&](ViewKind kind) { return count_concepts(*forest_view(ctx, all, f, kind).context, 0, workers); };
  return {count(ViewKind::leaf), count(ViewKind::tree), count(ViewKind::tree_predicate),
          count(ViewKind::interordinal_predicate)};
}

/// One cell of the parameter study: k-fold accuracies plus the concept
/// counts of a forest trained on all of ctx (repeated on every fold row).
inline std::vector<ExperimentRow> run_cell(const ManyValuedContext& ctx, std::size_t nt, std::size_t md,
                                           std::uint64_t seed, std::uint64_t cell_seed, std::size_t folds,
                                           const TrainConfig& base, bool with_counts = true) {
  Rng rng(cell_seed);
  const auto fold_of = stratified_folds(ctx, folds, rng);
  std::vector<std::uint64_t> fold_seeds(folds);
  for (auto& s : fold_seeds) s = rng.next();

  TrainConfig cfg = base;
  cfg.n_trees = nt;
  cfg.max_depth = md;
  cfg.workers = 1;

  ViewCounts counts;
  if (with_counts) {
    TrainConfig full = cfg;
    full.rng_seed = cell_seed;
    counts = forest_view_counts(ctx, train_forest(ctx, full));
  }
  std::vector<ExperimentRow> rows;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t g = 0; g < ctx.object_count(); ++g) (fold_of[g] == f ? test : train).push_back(g);
    const auto train_ctx = ctx.select(train);
    const auto test_ctx = ctx.select(test);
    TrainConfig c = cfg;
    c.rng_seed = fold_seeds[f];
    const auto forest = train_forest(train_ctx, c);
    ExperimentRow r;
    r.nt = nt;
    r.md = md;
    r.seed = seed;
    r.fold = f;
    r.acc_train = evaluate(forest, train_ctx).accuracy;
    r.acc_test = evaluate(forest, test_ctx).accuracy;
    r.gen_error = generalization_error(r.acc_train, r.acc_test);
    r.counts = counts;
    rows.push_back(r);
  }
  return rows;
}

/// Runs every (nt, md, seed) cell, in parallel when workers > 1. Cell i
/// (in nt, md, seed nesting order) uses seed ^ i. Rows come back sorted.
inline std::vector<ExperimentRow> run_experiment(const ManyValuedContext& ctx, const ExperimentGrid& grid,
                                                 const TrainConfig& base = {}, std::size_t workers = 1,
                                                 bool with_counts = true) {
  if (grid.n_trees.empty() || grid.max_depths.empty() || grid.seeds.empty())
    throw InvalidArgument("experiment grid ranges must be non-empty");
  struct Cell {
    std::size_t nt, md;
    std::uint64_t seed, cell_seed;
  };
  std::vector<Cell> cells;
  for (auto nt : grid.n_trees)
    for (auto md : grid.max_depths)
      for (auto s : grid.seeds) cells.push_back({nt, md, s, s ^ static_cast<std::uint64_t>(cells.size())});

  std::vector<std::vector<ExperimentRow>> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto job = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      try {
        const auto& c = cells[i];
        results[i] = run_cell(ctx, c.nt, c.md, c.seed, c.cell_seed, grid.folds, base, with_counts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::max<std::size_t>(1, workers); ++w) pool.emplace_back(job);
  job();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ExperimentRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.nt, a.md, a.seed, a.fold) < std::tie(b.nt, b.md, b.seed, b.fold);
  });
  return rows;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "nt,md,seed,fold,acc_train,acc_test,gen_error,n_concepts_leaf,n_concepts_tree,n_concepts_treepred,"
         "n_concepts_interpred\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& r : rows)
    out << r.nt << ',' << r.md << ',' << r.seed << ',' << r.fold << ',' << r.acc_train << ',' << r.acc_test << ','
        << r.gen_error << ',' << r.counts.leaf << ',' << r.counts.tree << ',' << r.counts.tree_predicate << ','
        << r.counts.interordinal_predicate << '\n';
  return out.str();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace cview
