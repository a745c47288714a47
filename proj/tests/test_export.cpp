#include <gtest/gtest.h>

#include <regex>

#include "support/oracles.hpp"
#include "support/tennis.hpp"

using namespace cview;

namespace {

std::size_t count_matches(const std::string& s, const std::regex& re) {
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

}  // namespace

TEST(ContextJson, RoundTrip) {
  Rng rng(70);
  for (int i = 0; i < 50; ++i) {
    auto ctx = oracle::random_context(rng, rng.below(10), rng.below(10));
    auto back = context_from_json(nlohmann::json::parse(context_to_json(ctx).dump()));
    EXPECT_EQ(back.objects(), ctx.objects());
    EXPECT_EQ(back.attributes(), ctx.attributes());
    EXPECT_TRUE(back.same_incidence(ctx));
    EXPECT_EQ(enumerate_concepts(back).concepts(), enumerate_concepts(ctx).concepts());
  }
}

TEST(ContextJson, Malformed) {
  EXPECT_THROW(context_from_json(nlohmann::json::parse(R"({"objects": ["a"]})")), ParseError);
  EXPECT_THROW(context_from_json(nlohmann::json::parse(R"({"objects": ["a"], "attributes": ["m"], "incidence": [[0, 5]]})")),
               ParseError);
  EXPECT_THROW(context_from_json(nlohmann::json::parse(R"({"objects": ["a"], "attributes": ["m"], "incidence": [[0]]})")),
               ParseError);
}

TEST(LatticeJson, ShapeAndSupport) {
  auto I = interordinal_scale_context(fixture::tennis());
  auto l = enumerate_concepts(I);
  auto j = lattice_to_json(l);
  ASSERT_EQ(j["concepts"].size(), 108u);
  EXPECT_EQ(j["covers"].size(), l.covers().size());
  const auto& top = j["concepts"][l.top()];
  EXPECT_EQ(top["support_count"], 14);
  EXPECT_DOUBLE_EQ(top["support"].get<double>(), 1.0);
  EXPECT_EQ(top["extent"].size(), 14u);
  // deterministic serialization
  EXPECT_EQ(j.dump(), lattice_to_json(enumerate_concepts(I)).dump());
}

TEST(Dot, WellFormedAndComplete) {
  auto v = make_view(ViewKind::tree_predicate, fixture::tennis(), fixture::tennis_tree());
  auto l = enumerate_concepts(v.context);
  DotOptions opts;
  opts.attribute_labels = v.display_names();
  opts.object_classes = view_labels(v, fixture::tennis());
  opts.class_order = {"yes", "no"};
  auto dot = lattice_to_dot(l, opts);
  EXPECT_EQ(dot.rfind("digraph \"lattice\" {", 0), 0u);
  EXPECT_EQ(dot.back(), '\n');
  EXPECT_EQ(count_matches(dot, std::regex(R"(\n  c\d+ \[label=)")), l.size());
  EXPECT_EQ(count_matches(dot, std::regex(R"(c\d+ -> c\d+;)")), l.covers().size());
  // top concept carries the class split of all objects
  EXPECT_NE(dot.find("c" + std::to_string(l.top()) + " [label=\"\\n9/5\\n"), std::string::npos);
  EXPECT_NE(dot.find("windy"), std::string::npos);
  EXPECT_EQ(dot, lattice_to_dot(enumerate_concepts(v.context), opts));
}

TEST(Dot, QuotesSpecialCharacters) {
  auto ctx = FormalContext::from_pairs({"say \"hi\""}, {"back\\slash"}, std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
  auto dot = lattice_to_dot(enumerate_concepts(ctx));
  EXPECT_NE(dot.find("back\\\\slash"), std::string::npos);
  EXPECT_NE(dot.find("say \\\"hi\\\""), std::string::npos);
}

TEST(Dot, FullSupportIcebergIsSingleNode) {
  auto I = interordinal_scale_context(fixture::tennis());
  auto ice = iceberg(I, I.object_count());
  auto dot = lattice_to_dot(ice);
  EXPECT_EQ(count_matches(dot, std::regex(R"(\n  c\d+ \[label=)")), 1u);
  EXPECT_EQ(count_matches(dot, std::regex(R"(->)")), 0u);
}
