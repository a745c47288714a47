#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "support/tennis.hpp"

using namespace cview;

TEST(Folds, StratifiedAndBalanced) {
  Rng rng(80);
  auto ctx = oracle::random_mv(rng, 103, 4, 2, 4, 3);
  Rng r(1);
  auto folds = stratified_folds(ctx, 4, r);
  std::map<std::size_t, std::size_t> sizes;
  std::map<std::pair<std::string, std::size_t>, std::size_t> per_class;
  std::map<std::string, std::size_t> class_total;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    ASSERT_LT(folds[g], 4u);
    ++sizes[folds[g]];
    ++per_class[{*ctx.label(g), folds[g]}];
    ++class_total[*ctx.label(g)];
  }
  for (auto [f, n] : sizes) EXPECT_LE(n, 103u / 4 + 1);
  for (auto [k, n] : per_class) EXPECT_LE(n, class_total[k.first] / 4 + 1);
  Rng again(1);
  EXPECT_EQ(stratified_folds(ctx, 4, again), folds);
  Rng bad(1);
  EXPECT_THROW(stratified_folds(ctx, 1, bad), InvalidArgument);
}

TEST(Experiment, SingleCellGivesOneRowPerFold) {
  ExperimentGrid g{{2}, {3}, {7}, 4};
  auto rows = run_experiment(fixture::tennis(), g, TrainConfig{}, 1, true);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t f = 0; f < 4; ++f) {
    EXPECT_EQ(rows[f].fold, f);
    EXPECT_EQ(rows[f].nt, 2u);
    EXPECT_EQ(rows[f].md, 3u);
    EXPECT_EQ(rows[f].seed, 7u);
    EXPECT_GE(rows[f].acc_test, 0.0);
    EXPECT_LE(rows[f].acc_train, 1.0);
    EXPECT_DOUBLE_EQ(rows[f].gen_error, rows[f].acc_train - rows[f].acc_test);
    EXPECT_GT(rows[f].counts.leaf, 0u);
  }
  auto csv = experiment_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "nt,md,seed,fold,acc_train,acc_test,gen_error,n_concepts_leaf,n_concepts_tree,n_concepts_treepred,"
            "n_concepts_interpred");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Experiment, ParallelEqualsSerial) {
  Rng rng(81);
  auto ctx = oracle::random_mv(rng, 60, 5, 2, 4, 2);
  ExperimentGrid g{{1, 3}, {2, 4}, {1, 2}, 3};
  auto a = experiment_csv(run_experiment(ctx, g, TrainConfig{}, 1));
  auto b = experiment_csv(run_experiment(ctx, g, TrainConfig{}, 4));
  EXPECT_EQ(a, b);
}

TEST(Experiment, CountsFollowViewExpressiveness) {
  auto f = train_forest(fixture::tennis(), TrainConfig{3, 4, 5, true, std::nullopt, 1});
  auto c = forest_view_counts(fixture::tennis(), f);
  EXPECT_LE(c.leaf, c.tree);
  EXPECT_LE(c.tree, c.tree_predicate);
  EXPECT_LE(c.tree, c.interordinal_predicate);
}

TEST(Experiment, EmptyGridRejected) {
  ExperimentGrid g{{}, {3}, {1}, 4};
  EXPECT_THROW(run_experiment(fixture::tennis(), g), InvalidArgument);
}

TEST(Median, OddAndEven) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}
