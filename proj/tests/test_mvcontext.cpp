#include <gtest/gtest.h>

#include <sstream>

#include "support/oracles.hpp"
#include "support/tennis.hpp"

using namespace cview;

namespace {

DomainSpec spec_from(const std::string& text) {
  std::istringstream in(text);
  return parse_domain_spec(in);
}

ManyValuedContext csv_from(const std::string& text, const DomainSpec& spec) {
  std::istringstream in(text);
  return read_csv(in, spec);
}

// Scale on a domain built from "value: attr attr ..." rows.
FormalContext scale(const std::vector<std::string>& values, const std::vector<std::string>& attrs,
                    const std::vector<std::vector<std::size_t>>& rows) {
  std::vector<Bitset> bits;
  for (const auto& r : rows) bits.push_back(Bitset::from_indices(attrs.size(), std::span<const std::size_t>(r)));
  return FormalContext(values, attrs, bits);
}

}  // namespace

TEST(Domain, RejectsEmptyAndRepeatedValues) {
  EXPECT_THROW(ValueDomain("a", {}), InvalidDomain);
  EXPECT_THROW(ValueDomain("a", {"x", "x"}), InvalidDomain);
  EXPECT_THROW(spec_from("a: x < x\n"), InvalidDomain);
  EXPECT_THROW(spec_from("a x y\n"), ParseError);
  EXPECT_THROW(spec_from("@weird x\n"), ParseError);
}

TEST(Domain, ParsesDirectivesAndOrder) {
  const auto& spec = fixture::tennis_spec();
  EXPECT_EQ(spec.id_column, "id");
  EXPECT_EQ(spec.label_column, "play");
  ASSERT_EQ(spec.schema->size(), 4u);
  EXPECT_EQ((*spec.schema)[0].values(), (std::vector<std::string>{"rainy", "overcast", "sunny"}));
  EXPECT_TRUE((*spec.schema)[3].is_boolean());
}

TEST(LoadCsv, TennisRowZero) {
  const auto& ctx = fixture::tennis();
  EXPECT_EQ(ctx.object_count(), 14u);
  const auto g = ctx.require_object("0");
  EXPECT_EQ(ctx.schema()[0].value(*ctx.value(g, 0)), "sunny");
  EXPECT_EQ(ctx.label(g), "no");
  EXPECT_TRUE(ctx.complete());
  EXPECT_EQ(ctx.classes(), (std::vector<std::string>{"no", "yes"}));
}

TEST(LoadCsv, EmptyBodyIsValid) {
  const auto& spec = fixture::tennis_spec();
  auto ctx = csv_from("id,overlook,temperature,humidity,windy,play\n", spec);
  EXPECT_EQ(ctx.object_count(), 0u);
  auto none = csv_from("", spec);
  EXPECT_EQ(none.object_count(), 0u);
}

TEST(LoadCsv, UnknownTokenIsDomainViolation) {
  const auto& spec = fixture::tennis_spec();
  try {
    csv_from("id,overlook,temperature,humidity,windy,play\n0,sunny,hot,high,False,no\n1,foggy,hot,high,False,no\n", spec);
    FAIL() << "expected DomainViolation";
  } catch (const DomainViolation& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.column(), "overlook");
    EXPECT_EQ(e.token(), "foggy");
  }
}

TEST(LoadCsv, DuplicateIdRejected) {
  const auto& spec = fixture::tennis_spec();
  EXPECT_THROW(
      csv_from("id,overlook,temperature,humidity,windy,play\n0,sunny,hot,high,False,no\n0,sunny,hot,high,False,no\n", spec),
      DuplicateObject);
}

TEST(LoadCsv, HeaderMustMatchDeclaration) {
  const auto& spec = fixture::tennis_spec();
  EXPECT_THROW(csv_from("id,overlook,temperature,humidity,play\n", spec), UnknownAttribute);
  EXPECT_THROW(csv_from("id,overlook,temperature,humidity,windy,play,extra\n", spec), UnknownAttribute);
  EXPECT_THROW(csv_from("id,overlook,temperature,humidity,windy,play\n0,sunny,hot\n", spec), ParseError);
}

TEST(LoadCsv, EmptyCellsAreAbsentAndQuotesWork) {
  const auto& spec = fixture::tennis_spec();
  auto ctx = csv_from("id,overlook,temperature,humidity,windy,play\n\"a,b\",sunny,,high,False,no\n", spec);
  EXPECT_EQ(ctx.object(0), "a,b");
  EXPECT_FALSE(ctx.value(0, 1).has_value());
  EXPECT_FALSE(ctx.complete());
}

TEST(LoadCsv, RoundTripFiftyRows) {
  Rng rng(99);
  auto spec = spec_from("@id id\n@label cls\nx: lo < mid < hi\ny: a < b\nz: p < q < r < s\n");
  std::ostringstream csv;
  csv << "id,x,y,z,cls\n";
  for (int i = 0; i < 50; ++i) {
    auto pick = [&](std::vector<std::string> v) { return rng.below(5) == 0 ? std::string() : v[rng.below(v.size())]; };
    csv << "obj" << i << "," << pick({"lo", "mid", "hi"}) << "," << pick({"a", "b"}) << "," << pick({"p", "q", "r", "s"})
        << "," << (i % 3 ? "pos" : "neg") << "\n";
  }
  const auto first = csv_from(csv.str(), spec);
  std::ostringstream saved;
  write_csv(saved, first, "id");
  const auto second = csv_from(saved.str(), spec);
  EXPECT_EQ(first, second);
  std::ostringstream again;
  write_csv(again, second, "id");
  EXPECT_EQ(saved.str(), again.str());
}

TEST(Predicate, NegationAndNames) {
  const auto& s = fixture::tennis().schema();
  auto p = fixture::pred("overlook<=rainy");
  EXPECT_EQ(negation(s, p), fixture::pred("overlook>=overcast"));
  EXPECT_EQ(negation(s, *negation(s, p)), p);
  EXPECT_FALSE(negation(s, fixture::pred("overlook<=sunny")).has_value());
  EXPECT_EQ(display_name(s, fixture::pred("windy>=True")), "windy");
  EXPECT_EQ(display_name(s, fixture::pred("windy<=False")), "not windy");
  EXPECT_EQ(fixture::pred("windy"), fixture::pred("windy:>=:True"));
  EXPECT_EQ(canonical_name(s, fixture::pred("humidity>=high")), "humidity:>=:high");
  EXPECT_THROW(fixture::pred("pressure<=low"), UnknownAttribute);
  EXPECT_THROW(fixture::pred("overlook<=foggy"), InvalidArgument);
}

TEST(Satisfies, ThresholdsFollowDomainOrder) {
  const auto& ctx = fixture::tennis();
  EXPECT_EQ(satisfies(ctx, "5", fixture::pred("temperature<=mild")), Truth::yes);
  EXPECT_EQ(satisfies(ctx, "0", fixture::pred("temperature<=mild")), Truth::no);
  for (std::size_t g = 0; g < ctx.object_count(); ++g)
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
      EXPECT_EQ(satisfies(ctx, g, Predicate{m, Direction::geq, 0}), Truth::yes);
  EXPECT_THROW(satisfies(ctx, "99", fixture::pred("windy")), NoSuchObject);
}

TEST(Satisfies, AbsentCellIsUnknown) {
  const auto& spec = fixture::tennis_spec();
  auto ctx = csv_from("id,overlook,temperature,humidity,windy,play\nq,sunny,hot,,False,no\n", spec);
  EXPECT_EQ(satisfies(ctx, "q", fixture::pred("humidity>=high")), Truth::unknown);
}

TEST(Satisfies, NegationDichotomyOnCompleteContexts) {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    auto ctx = oracle::random_mv(rng, 10, 4, 2, 5);
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m)
      for (std::size_t v = 0; v < ctx.schema()[m].size(); ++v)
        for (auto d : {Direction::leq, Direction::geq}) {
          Predicate p{m, d, v};
          auto n = negation(ctx.schema(), p);
          if (!n) continue;
          for (std::size_t g = 0; g < ctx.object_count(); ++g)
            EXPECT_NE(satisfies(ctx, g, p) == Truth::yes, satisfies(ctx, g, *n) == Truth::yes);
        }
  }
}

TEST(InterordinalScale, MatchesTennisCrossTable) {
  // rows as printed: O<=rainy O<=overcast O>=overcast O>=sunny T<=cool T<=mild T>=mild T>=hot H<=normal H>=high windy notwindy
  const std::vector<std::string> table{
      "001100110101", "001100110110", "011000110101", "110001100101", "110011001001", "110011001010", "011011001010",
      "001101100101", "001111001001", "110001101001", "001101101010", "011001100110", "011000111001", "110001100110"};
  const std::vector<std::string> names{"overlook:<=:rainy",     "overlook:<=:overcast", "overlook:>=:overcast",
                                       "overlook:>=:sunny",     "temperature:<=:cool",  "temperature:<=:mild",
                                       "temperature:>=:mild",   "temperature:>=:hot",   "humidity:<=:normal",
                                       "humidity:>=:high",      "windy:>=:True",        "windy:<=:False"};
  const auto I = interordinal_scale_context(fixture::tennis());
  ASSERT_EQ(I.attribute_count(), 12u);
  for (std::size_t g = 0; g < 14; ++g)
    for (std::size_t j = 0; j < 12; ++j) {
      auto m = I.find_attribute(names[j]);
      ASSERT_TRUE(m) << names[j];
      EXPECT_EQ(I.incident(*I.find_object(std::to_string(g)), *m), table[g][j] == '1') << g << " " << names[j];
    }
  EXPECT_EQ(enumerate_concepts(I).size(), 108u);
}

TEST(InterordinalScale, RowsAreSatisfiedPredicates) {
  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    auto ctx = oracle::random_mv(rng, 12, 4, 2, 4);
    auto I = interordinal_scale_context(ctx);
    auto preds = interordinal_scale_predicates(ctx);
    ASSERT_EQ(preds.size(), I.attribute_count());
    for (std::size_t g = 0; g < ctx.object_count(); ++g)
      for (std::size_t j = 0; j < preds.size(); ++j)
        EXPECT_EQ(I.incident(g, j), satisfies(ctx, g, preds[j]) == Truth::yes);
  }
}

TEST(InterordinalScale, SingleValueLeavesNoAttributes) {
  auto schema = std::make_shared<Schema>(std::vector<ValueDomain>{ValueDomain("a", {"only"})});
  ManyValuedContext ctx(schema, {"g"}, {{0}});
  auto I = interordinal_scale_context(ctx);
  EXPECT_EQ(I.attribute_count(), 0u);
  EXPECT_EQ(enumerate_concepts(I).size(), 1u);
}

TEST(InterordinalScale, IncompleteRejected) {
  auto schema = std::make_shared<Schema>(std::vector<ValueDomain>{ValueDomain("a", {"x", "y"})});
  ManyValuedContext ctx(schema, {"g", "h"}, {{0}, {std::nullopt}});
  EXPECT_THROW(interordinal_scale_context(ctx), IncompleteContext);
}

TEST(PlainScale, TennisScalesGiveTheDerivedContext) {
  const auto& ctx = fixture::tennis();
  std::map<std::string, FormalContext> scales;
  scales.emplace("overlook", scale({"rainy", "overcast", "sunny"}, {"<=rainy", "<=overcast", ">=overcast", ">=sunny"},
                                   {{0, 1}, {1, 2}, {2, 3}}));
  scales.emplace("temperature", scale({"cool", "mild", "hot"}, {"<=cool", "<=mild", ">=mild", ">=hot"},
                                      {{0, 1}, {1, 2}, {2, 3}}));
  scales.emplace("humidity", scale({"normal", "high"}, {"<=normal", ">=high"}, {{0}, {1}}));
  scales.emplace("windy", scale({"True", "False"}, {"windy", "not windy"}, {{0}, {1}}));
  auto plain = plain_scale(ctx, scales);
  EXPECT_EQ(plain.attribute_count(), 12u);
  auto I = interordinal_scale_context(ctx);
  EXPECT_EQ(oracle::extent_strings(enumerate_concepts(plain)), oracle::extent_strings(enumerate_concepts(I)));
  EXPECT_EQ(enumerate_concepts(plain).size(), 108u);
  EXPECT_TRUE(plain.find_attribute("windy:not windy").has_value());
}

TEST(PlainScale, NominalGivesOneCrossPerRow) {
  const auto& ctx = fixture::tennis();
  std::map<std::string, FormalContext> scales;
  scales.emplace("overlook", nominal_scale(ctx.schema()[0]));
  auto k = plain_scale(ctx, scales);
  EXPECT_EQ(k.attribute_count(), 3u);
  for (std::size_t g = 0; g < k.object_count(); ++g) EXPECT_EQ(k.row(g).count(), 1u);
}

TEST(PlainScale, InterordinalScalesMatchInterordinalScaling) {
  Rng rng(14);
  for (int t = 0; t < 30; ++t) {
    auto ctx = oracle::random_mv(rng, 10, 3, 2, 4);
    std::map<std::string, FormalContext> scales;
    for (const auto& d : ctx.schema().attributes()) scales.emplace(d.name(), interordinal_scale(d));
    auto plain = plain_scale(ctx, scales);
    auto I = interordinal_scale_context(ctx);
    EXPECT_EQ(oracle::extent_strings(enumerate_concepts(plain)), oracle::extent_strings(enumerate_concepts(I)));
  }
}

TEST(PlainScale, MissingScaleRowRejected) {
  const auto& ctx = fixture::tennis();
  std::map<std::string, FormalContext> scales;
  scales.emplace("humidity", scale({"normal"}, {"n"}, {{0}}));
  EXPECT_THROW(plain_scale(ctx, scales), ScaleDomainViolation);
}

TEST(LogicalScale, NiceIsMildAndNotWindy) {
  const auto& ctx = fixture::tennis();
  std::vector<LogicalFormula> fs{parse_formula("nice := temperature = mild & !windy = True")};
  auto k = logical_scale(ctx, fs);
  std::set<std::string> got;
  k.column(0).for_each([&](std::size_t g) { got.insert(k.object(g)); });
  EXPECT_EQ(got, (std::set<std::string>{"3", "7", "9"}));
  EXPECT_EQ(k.attribute(0), "nice");
}

TEST(LogicalScale, TruthAndComplement) {
  const auto& ctx = fixture::tennis();
  std::vector<LogicalFormula> fs{LogicalFormula::truth(), parse_formula("overlook <= overcast | humidity >= high"),
                                 parse_formula("!(overlook <= overcast | humidity >= high)")};
  auto k = logical_scale(ctx, fs);
  EXPECT_TRUE(k.column(0).all());
  EXPECT_FALSE(k.column(1).intersects(k.column(2)));
  EXPECT_TRUE((k.column(1) | k.column(2)).all());
}

TEST(LogicalScale, UnknownAttributeRejected) {
  std::vector<LogicalFormula> fs{parse_formula("pressure <= low")};
  EXPECT_THROW(logical_scale(fixture::tennis(), fs), UnknownAttribute);
  EXPECT_THROW(parse_formula("overlook <"), ParseError);
  EXPECT_THROW(parse_formula("(overlook = sunny"), ParseError);
}
