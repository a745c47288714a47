#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "support/oracles.hpp"
#include "support/tennis.hpp"

using namespace cview;

namespace {

std::vector<std::size_t> all_rows(const ManyValuedContext& ctx) {
  std::vector<std::size_t> v(ctx.object_count());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

double entropy_of(const ManyValuedContext& ctx, const std::vector<std::size_t>& rows) {
  std::map<std::string, double> c;
  for (auto g : rows) c[*ctx.label(g)] += 1;
  double h = 0;
  for (auto& [k, n] : c) h -= n / rows.size() * std::log2(n / rows.size());
  return h;
}

// Exhaustive candidate scan: best gain over all (m, <=, v) splits of `rows`.
double best_gain(const ManyValuedContext& ctx, const std::vector<std::size_t>& rows) {
  const double parent = entropy_of(ctx, rows);
  double best = 0;
  for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
    for (std::size_t v = 0; v + 1 < ctx.schema()[m].size(); ++v) {
      std::vector<std::size_t> l, r;
      for (auto g : rows) (*ctx.value(g, m) <= v ? l : r).push_back(g);
      if (l.empty() || r.empty()) continue;
      const double gain = parent - double(l.size()) / rows.size() * entropy_of(ctx, l) -
                          double(r.size()) / rows.size() * entropy_of(ctx, r);
      best = std::max(best, gain);
    }
  return best;
}

// Objects of `ctx` (by training multiset) reaching node n.
std::vector<std::size_t> rows_at(const DecisionTree& t, const ManyValuedContext& ctx, std::span<const std::size_t> rows,
                                 std::size_t n) {
  std::vector<std::size_t> out;
  for (auto g : rows) {
    auto p = decision_path(t, ctx, g);
    if (std::find(p.begin(), p.end(), n) != p.end()) out.push_back(g);
  }
  return out;
}

}  // namespace

TEST(Fixture, TennisTreeShape) {
  const auto& t = fixture::tennis_tree();
  EXPECT_EQ(t.size(), 13u);
  EXPECT_EQ(t.leaves().size(), 7u);
  EXPECT_EQ(t.depth(), 4u);
  EXPECT_FALSE(t.degenerate());
  EXPECT_EQ(predicates_of(t).size(), 8u);
  EXPECT_EQ(evaluate(t, fixture::tennis()).accuracy, 1.0);
}

TEST(Fixture, DecisionPaths) {
  const auto& ctx = fixture::tennis();
  const auto& t = fixture::tennis_tree();
  EXPECT_EQ(decision_path(t, ctx, "13"), (std::vector<std::size_t>{0, 2, 5, 9, 12}));
  EXPECT_EQ(t.leaf_name(leaf_of(t, ctx.row(0))), "l0");
  EXPECT_EQ(t.leaf_name(leaf_of(t, ctx.row(13))), "l3");
  EXPECT_EQ(predict(t, ctx.row(5)), "no");
  EXPECT_THROW(decision_path(t, ctx, "99"), NoSuchObject);
}

TEST(Fixture, MissingValueOnPath) {
  const auto& ctx = fixture::tennis();
  const auto& t = fixture::tennis_tree();
  auto row = ctx.row(13);
  row[ctx.schema().require("overlook")] = std::nullopt;
  try {
    decision_path(t, row);
    FAIL();
  } catch (const MissingValueAtNode& e) {
    EXPECT_EQ(e.node(), 2u);
    EXPECT_EQ(e.attribute(), "overlook");
  }
  // temperature is never tested, so its absence is harmless
  auto row2 = ctx.row(13);
  row2[ctx.schema().require("temperature")] = std::nullopt;
  EXPECT_EQ(leaf_of(t, row2), 12u);
}

TEST(Tree, ValidationRejectsBrokenTrees) {
  const auto& t = fixture::tennis_tree();
  auto nodes = t.nodes();
  // sibling annotations not negations
  nodes[2].predicate = fixture::pred("overlook<=rainy");
  EXPECT_THROW(DecisionTree(t.schema_ptr(), nodes), InvalidTree);
  // leaf without label
  nodes = t.nodes();
  nodes[6].label.reset();
  EXPECT_THROW(DecisionTree(t.schema_ptr(), nodes), InvalidTree);
  // root-only tree has no split
  std::vector<TreeNode> lone{TreeNode{0, std::nullopt, std::nullopt, std::string("yes"), {}, std::nullopt}};
  EXPECT_THROW(DecisionTree(t.schema_ptr(), lone), InvalidTree);
  // unary node
  nodes = t.nodes();
  nodes[0].children = {1};
  EXPECT_THROW(DecisionTree(t.schema_ptr(), nodes), InvalidTree);
}

TEST(Tree, StumpPathsHaveLengthTwo) {
  const auto& ctx = fixture::tennis();
  TrainConfig cfg;
  cfg.max_depth = 1;
  auto t = train_tree(ctx, cfg);
  EXPECT_EQ(t.size(), 3u);
  for (std::size_t g = 0; g < ctx.object_count(); ++g) EXPECT_EQ(decision_path(t, ctx, g).size(), 2u);
}

TEST(Tree, PredicatesMatchScan) {
  Rng rng(40);
  for (int i = 0; i < 30; ++i) {
    auto ctx = oracle::random_mv(rng, 8 + rng.below(20), 3 + rng.below(3), 2, 4);
    auto t = train_tree(ctx);
    std::set<Predicate> scan;
    for (const auto& n : t.nodes())
      if (n.predicate) scan.insert(*n.predicate);
    auto got = predicates_of(t);
    EXPECT_EQ(std::set<Predicate>(got.begin(), got.end()), scan);
  }
}

TEST(Json, RoundTripFixtureAndRandomTrees) {
  const auto& t = fixture::tennis_tree();
  EXPECT_EQ(tree_from_json(tree_to_json(t), t.schema_ptr()), t);
  Rng rng(41);
  const auto dir = std::filesystem::temp_directory_path() / "cview_tree_rt";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 30; ++i) {
    auto ctx = oracle::random_mv(rng, 8 + rng.below(20), 3, 2, 4, 3);
    TrainConfig cfg;
    cfg.n_trees = 3;
    cfg.rng_seed = i;
    auto f = train_forest(ctx, cfg);
    const auto p = (dir / "f.json").string();
    save_forest(p, f);
    auto back = load_forest(p, ctx.schema_ptr());
    ASSERT_EQ(back.trees.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(back.trees[k], f.trees[k]);
    EXPECT_EQ(back.bags, f.bags);
    save_tree((dir / "t.json").string(), f.trees[0]);
    EXPECT_EQ(load_tree((dir / "t.json").string(), ctx.schema_ptr()), f.trees[0]);
  }
}

TEST(Json, EmptyOrBadInput) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto p = (dir / "cview_empty.json").string();
  write_text_file(p, "");
  EXPECT_THROW(load_tree(p, fixture::tennis().schema_ptr()), ParseError);
  write_text_file(p, "{\"nodes\": [");
  EXPECT_THROW(load_tree(p, fixture::tennis().schema_ptr()), ParseError);
  auto j = tree_to_json(fixture::tennis_tree());
  j["nodes"][1]["predicate"]["attr"] = "nonsense";
  EXPECT_THROW(tree_from_json(j, fixture::tennis().schema_ptr()), Error);
}

TEST(Training, StructuralInvariants) {
  Rng rng(42);
  for (int i = 0; i < 60; ++i) {
    auto ctx = oracle::random_mv(rng, 8 + rng.below(25), 3 + rng.below(4), 2, 4, 2 + rng.below(2));
    TrainConfig cfg;
    if (i % 2) cfg.max_depth = 1 + rng.below(4);
    cfg.rng_seed = i;
    cfg.n_trees = 3;
    auto f = train_forest(ctx, cfg);
    for (std::size_t k = 0; k < f.trees.size(); ++k) {
      const auto& t = f.trees[k];
      EXPECT_NO_THROW(DecisionTree(t.schema_ptr(), t.nodes(), t.root(), t.degenerate()));
      const auto& bag = f.bags[k];
      for (auto l : t.leaves()) {
        // every leaf supported by at least one training object (unless forced stump side)
        if (!t.degenerate()) EXPECT_FALSE(rows_at(t, ctx, bag, l).empty());
        if (cfg.max_depth) EXPECT_LE(t.path_from_root(l).size(), *cfg.max_depth + 1);
      }
    }
  }
}

TEST(Training, ChosenSplitHasMaximalGain) {
  Rng rng(43);
  for (int i = 0; i < 40; ++i) {
    auto ctx = oracle::random_mv(rng, 10 + rng.below(15), 3 + rng.below(2), 2, 4, 2);
    auto t = train_tree(ctx);
    auto all = all_rows(ctx);
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) continue;
      const auto rows = rows_at(t, ctx, all, n.id);
      if (t.degenerate() && n.id == t.root()) continue;
      const auto left = rows_at(t, ctx, all, n.children[0]);
      const auto right = rows_at(t, ctx, all, n.children[1]);
      const double gain = entropy_of(ctx, rows) - double(left.size()) / rows.size() * entropy_of(ctx, left) -
                          double(right.size()) / rows.size() * entropy_of(ctx, right);
      EXPECT_GE(gain + 1e-9, best_gain(ctx, rows));
      EXPECT_GT(gain, 0.0);
    }
    // leaves are pure or admit no improving split
    for (auto l : t.leaves()) {
      const auto rows = rows_at(t, ctx, all, l);
      if (rows.empty()) continue;
      EXPECT_TRUE(entropy_of(ctx, rows) == 0.0 || best_gain(ctx, rows) <= 1e-12);
    }
  }
}

TEST(Training, LeafPartitionOnTennisMatchesFixtureAccuracy) {
  TrainConfig cfg;
  cfg.max_depth = 4;
  auto t = train_tree(fixture::tennis(), cfg);
  EXPECT_EQ(evaluate(t, fixture::tennis()).accuracy, 1.0);
  EXPECT_LE(t.depth(), 4u);
  // both partitions are consistent with the labels: each leaf is pure
  auto all = all_rows(fixture::tennis());
  for (auto l : t.leaves()) EXPECT_EQ(entropy_of(fixture::tennis(), rows_at(t, fixture::tennis(), all, l)), 0.0);
}

TEST(Training, DegenerateDataGivesForcedStump) {
  auto ctx = fixture::tennis();
  std::vector<std::size_t> only_yes{2, 3, 4};
  auto t = train_tree_on(ctx, only_yes, TrainConfig{}, 1);
  EXPECT_TRUE(t.degenerate());
  EXPECT_EQ(t.size(), 3u);
  for (auto l : t.leaves()) EXPECT_EQ(*t.node(l).label, "yes");
}

TEST(Training, Errors) {
  auto ctx = fixture::tennis();
  EXPECT_THROW(train_tree_on(ctx, std::vector<std::size_t>{}, TrainConfig{}, 0), EmptyTraining);
  TrainConfig bad;
  bad.n_trees = 0;
  EXPECT_THROW(train_forest(ctx, bad), InvalidArgument);
  TrainConfig zero_depth;
  zero_depth.max_depth = 0;
  EXPECT_THROW(train_tree(ctx, zero_depth), InvalidArgument);
}

TEST(Forest, SingleUnbaggedTreeEqualsTrainTree) {
  TrainConfig cfg;
  cfg.bagging = false;
  cfg.rng_seed = 9;
  auto f = train_forest(fixture::tennis(), cfg);
  ASSERT_EQ(f.trees.size(), 1u);
  EXPECT_EQ(f.trees[0], train_tree(fixture::tennis(), cfg));
}

TEST(Forest, DeterministicAndSchedulingInvariant) {
  Rng rng(44);
  auto ctx = oracle::random_mv(rng, 40, 5, 2, 4, 3);
  TrainConfig cfg;
  cfg.n_trees = 8;
  cfg.rng_seed = 77;
  cfg.features_per_split = 2;
  auto a = train_forest(ctx, cfg);
  auto b = train_forest(ctx, cfg);
  cfg.workers = 4;
  auto c = train_forest(ctx, cfg);
  EXPECT_EQ(a.trees, b.trees);
  EXPECT_EQ(a.trees, c.trees);
  EXPECT_EQ(a.bags, c.bags);
  for (const auto& bag : a.bags) EXPECT_EQ(bag.size(), ctx.object_count());
}

TEST(Forest, VoteTieBreaksLexicographically) {
  const auto& t = fixture::tennis_tree();
  auto nodes = t.nodes();
  for (auto& n : nodes)
    if (n.label) n.label = (*n.label == "yes") ? "no" : "yes";
  DecisionTree flipped(t.schema_ptr(), nodes);
  Forest f{t.schema_ptr(), {t, flipped}, {}};
  for (std::size_t g = 0; g < 14; ++g) EXPECT_EQ(predict(f, fixture::tennis().row(g)), "no");
  Forest single{t.schema_ptr(), {t}, {}};
  EXPECT_EQ(evaluate(single, fixture::tennis()).per_object, evaluate(t, fixture::tennis()).per_object);
  EXPECT_DOUBLE_EQ(generalization_error(0.9, 0.75), 0.15);
}

TEST(Importance, UnusedAttributeScoresZero) {
  auto imp = permutation_importance(fixture::tennis_tree(), fixture::tennis(), 5, 3);
  ASSERT_EQ(imp.size(), 4u);
  EXPECT_EQ(imp[fixture::tennis().schema().require("temperature")], 0.0);
  EXPECT_GT(imp[fixture::tennis().schema().require("humidity")], 0.0);
}

TEST(Importance, LabelCopyOnBalancedToySet) {
  // feature "copy" equals the label, "noise" is constant; a stump on copy is perfect
  auto schema = std::make_shared<Schema>(std::vector<ValueDomain>{ValueDomain("copy", {"a", "b"}), ValueDomain("noise", {"x", "y"})});
  std::vector<std::string> ids;
  std::vector<std::vector<ManyValuedContext::Cell>> rows;
  std::vector<std::optional<std::string>> labels;
  for (std::size_t g = 0; g < 40; ++g) {
    ids.push_back(std::to_string(g));
    rows.push_back({g % 2, 0});
    labels.push_back(g % 2 ? "b" : "a");
  }
  ManyValuedContext ctx(schema, ids, rows, labels, "y");
  auto t = train_tree(ctx);
  EXPECT_EQ(t.size(), 3u);
  // expected drop: 1 - E[acc under permutation] = 1 - 0.5 on a balanced set, in expectation
  auto imp = permutation_importance(t, ctx, 400, 5);
  EXPECT_NEAR(imp[0], 1.0 - 0.5, 0.03);
  EXPECT_EQ(imp[1], 0.0);
}
