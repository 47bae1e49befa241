#include "fixtures.hpp"
#include "random_problem.hpp"

#include "symplan/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace symplan;
using namespace symplan::testing;

namespace {

EffectClass::Kind kind_of(const Problem& p, const std::string& action, std::size_t k = 0)
{
  const Action& a = p.action(act(p, action));
  return classify_effect(a, a.eff.at(k)).kind;
}

std::set<std::string> names(const Problem& p, const std::vector<ActionId>& ids)
{
  std::set<std::string> out;
  for (ActionId a : ids) out.insert(p.action(a).name);
  return out;
}

bool within(const Interval& inner, const Interval& outer)
{
  bool lo_ok = !outer.lo || (inner.lo && *inner.lo >= *outer.lo);
  bool hi_ok = !outer.hi || (inner.hi && *inner.hi <= *outer.hi);
  return lo_ok && hi_ok;
}

}  // namespace

TEST(ClassifyEffect, ExampleActions)
{
  Problem p = two_robots();
  using K = EffectClass::Kind;
  EXPECT_EQ(kind_of(p, "conn"), K::BooleanAssignment);
  EXPECT_EQ(kind_of(p, "lre"), K::SimpleAssignment);
  const Action& exch = p.action(act(p, "exch"));
  for (const auto& e : exch.eff) {
    EffectClass c = classify_effect(exch, e);
    EXPECT_EQ(c.kind, K::LinearIncrement);
    const auto& ne = std::get<NumEffect>(e);
    LinearExpr q = LinearExpr::variable(num(p, "q"));
    EXPECT_EQ(c.expr, ne.var == num(p, "q_l") ? -q : q);
  }
}

TEST(ClassifyEffect, DoublingIsSelfInterfering)
{
  Action a{"dbl", {}, {NumEffect{NumVar{0}, LinearExpr::variable(NumVar{0}, 2)}}};
  EXPECT_EQ(classify_effect(a, a.eff[0]).kind, EffectClass::Kind::SelfInterfering);
}

TEST(ClassifyEffect, IncrementReadingAnotherAssignedVariableIsGeneral)
{
  // x += y while y := 0: the delta reads an assigned variable
  Action a{"mix", {}, {increase(NumVar{0}, LinearExpr::variable(NumVar{1})), NumEffect{NumVar{1}, LinearExpr(0)}}};
  EXPECT_TRUE(classify_effect(a, a.eff[0]).is_general());
  EXPECT_EQ(classify_effect(a, a.eff[1]).kind, EffectClass::Kind::SimpleAssignment);
}

TEST(Eligibility, ExampleActions)
{
  Problem p = two_robots();
  for (const char* yes : {"exch", "lft_r", "rgt_r", "lft_l", "rgt_l"}) EXPECT_TRUE(eligible_for_rolling(p.action(act(p, yes)))) << yes;
  for (const char* no : {"lre", "rle", "conn", "disc"}) EXPECT_FALSE(eligible_for_rolling(p.action(act(p, no)))) << no;
}

TEST(Eligibility, BooleanConflictBlocksRolling)
{
  Action a{"flip", {Condition{BoolCondition{BoolVar{0}, false}}}, {BoolEffect{BoolVar{0}, true}, increase(NumVar{0}, LinearExpr(1))}};
  EXPECT_FALSE(eligible_for_rolling(a));
}

TEST(Eligibility, OnlyGeneralAssignmentsNeverRoll)
{
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Problem p = random_problem(seed);
    for (const auto& a : p.actions) {
      bool all_general = std::all_of(a.eff.begin(), a.eff.end(), [&](const Effect& e) { return classify_effect(a, e).is_general(); });
      if (all_general) {
        EXPECT_FALSE(eligible_for_rolling(a)) << "seed " << seed << " " << a.name;
      }
    }
  }
}

TEST(Mutex, ExamplePairs)
{
  Problem p = two_robots();
  auto pairs = mutex_pairs(p);
  auto has = [&](const char* x, const char* y) {
    ActionId a = act(p, x), b = act(p, y);
    auto key = std::minmax(a, b);
    return std::find(pairs.begin(), pairs.end(), std::pair{key.first, key.second}) != pairs.end();
  };
  EXPECT_TRUE(has("rgt_r", "conn"));
  EXPECT_TRUE(has("lre", "exch"));
  EXPECT_FALSE(has("lft_r", "lft_l"));
}

TEST(Mutex, SingleActionHasNone)
{
  Problem p;
  p.num_names = {"x"};
  p.init.nums = {Rational(0)};
  p.actions.push_back(Action{"inc", {}, {increase(NumVar{0}, LinearExpr(1))}});
  EXPECT_TRUE(mutex_pairs(p).empty());
}

TEST(Mutex, PairsAreOrderedDistinctAndUnique)
{
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Problem p = random_problem(seed);
    auto pairs = mutex_pairs(p);
    EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
    EXPECT_EQ(std::adjacent_find(pairs.begin(), pairs.end()), pairs.end());
    for (auto [a, b] : pairs) EXPECT_LT(a, b);
  }
}

TEST(Arpg, TwoRobotsLayers)
{
  Problem p = two_robots();
  auto layers = arpg_layers(p);
  ASSERT_GE(layers.size(), 3u);
  EXPECT_EQ(names(p, layers[0].actions), (std::set<std::string>{"lft_r", "rgt_r", "lft_l", "rgt_l", "lre", "rle"}));
  auto added = [&](std::size_t i) {
    std::set<std::string> now = names(p, layers[i].actions), before = names(p, layers[i - 1].actions), out;
    std::set_difference(now.begin(), now.end(), before.begin(), before.end(), std::inserter(out, out.end()));
    return out;
  };
  EXPECT_EQ(added(1), (std::set<std::string>{"conn"}));
  EXPECT_EQ(added(2), (std::set<std::string>{"exch", "disc"}));
  for (std::size_t i = 3; i < layers.size(); ++i) EXPECT_TRUE(added(i).empty());
}

TEST(Arpg, EverythingApplicableInitially)
{
  Problem p;
  p.num_names = {"x"};
  p.init.nums = {Rational(0)};
  p.actions.push_back(Action{"up", {}, {increase(NumVar{0}, LinearExpr(1))}});
  p.actions.push_back(Action{"down", {}, {increase(NumVar{0}, LinearExpr(-1))}});
  auto layers = arpg_layers(p);
  ASSERT_FALSE(layers.empty());
  EXPECT_EQ(layers[0].actions.size(), 2u);
  for (const auto& l : layers) EXPECT_EQ(l.actions.size(), 2u);
}

TEST(Arpg, UnreachablePreconditionStaysOut)
{
  Problem p;
  p.num_names = {"x", "y"};
  p.init.nums = {Rational(0), Rational(0)};
  p.actions.push_back(Action{"stuck", {Condition{compare(LinearExpr::variable(NumVar{0}), Relation::Gt, LinearExpr(0))}},
                             {increase(NumVar{1}, LinearExpr(1))}});
  p.actions.push_back(Action{"other", {}, {increase(NumVar{1}, LinearExpr(1))}});
  for (const auto& l : arpg_layers(p)) EXPECT_EQ(names(p, l.actions), (std::set<std::string>{"other"}));
}

TEST(Arpg, LayersAreMonotone)
{
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Problem p = random_problem(seed);
    auto layers = arpg_layers(p);
    ASSERT_FALSE(layers.empty());
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < layers.size(); ++i) {
      const auto &a = layers[i - 1], &b = layers[i];
      EXPECT_TRUE(std::includes(b.actions.begin(), b.actions.end(), a.actions.begin(), a.actions.end())) << seed;
      for (std::size_t v = 0; v < a.state.nums.size(); ++v) EXPECT_TRUE(within(a.state.nums[v], b.state.nums[v])) << seed;
      for (std::size_t v = 0; v < a.state.bools.size(); ++v) {
        EXPECT_TRUE(!a.state.bools[v].can_be_true || b.state.bools[v].can_be_true);
        EXPECT_TRUE(!a.state.bools[v].can_be_false || b.state.bools[v].can_be_false);
      }
      if (a.actions != b.actions) ++distinct;
    }
    EXPECT_LE(distinct, p.actions.size() + 1) << seed;
  }
}

TEST(ArpgPattern, LayerOrderForAnySeed)
{
  Problem p = two_robots();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Pattern pat = arpg_pattern(p, seed);
    ASSERT_EQ(pat.size(), 9u);
    std::vector<std::string> order;
    for (ActionId a : pat.occurrences()) order.push_back(p.action(a).name);
    auto pos = [&](const char* n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
    for (const char* first : {"lft_r", "rgt_r", "lft_l", "rgt_l", "lre", "rle"}) {
      EXPECT_LT(pos(first), pos("conn")) << seed;
    }
    EXPECT_LT(pos("conn"), pos("exch"));
    EXPECT_LT(pos("conn"), pos("disc"));
  }
}

TEST(ArpgPattern, SeedFixesTheOrder)
{
  Problem p = line_exchange(4, 2, 1);
  EXPECT_EQ(arpg_pattern(p, 0), arpg_pattern(p, 0));
  EXPECT_EQ(arpg_pattern(p, 42), arpg_pattern(p, 42));
}

TEST(ArpgPattern, SingleAction)
{
  Problem p;
  p.num_names = {"x"};
  p.init.nums = {Rational(0)};
  p.actions.push_back(Action{"inc", {}, {increase(NumVar{0}, LinearExpr(1))}});
  EXPECT_EQ(arpg_pattern(p, 0).size(), 1u);
}

TEST(ArpgPattern, AlwaysSimpleAndComplete)
{
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Problem p = random_problem(seed);
    Pattern pat = arpg_pattern(p, seed);
    EXPECT_TRUE(pat.is_simple()) << seed;
    EXPECT_TRUE(pat.is_complete(p.actions.size())) << seed;
  }
}

TEST(Pattern, SimpleCompleteCompatible)
{
  Pattern pat({ActionId{0}, ActionId{1}, ActionId{0}, ActionId{2}});
  EXPECT_FALSE(pat.is_simple());
  EXPECT_TRUE(pat.is_complete(3));
  EXPECT_FALSE(pat.is_complete(4));
  EXPECT_TRUE(pat.is_compatible_order(Pattern({ActionId{1}, ActionId{0}, ActionId{2}}), 3));
  EXPECT_TRUE(pat.is_compatible_order(Pattern({ActionId{0}, ActionId{1}, ActionId{2}}), 3));
  EXPECT_FALSE(pat.is_compatible_order(Pattern({ActionId{2}, ActionId{1}, ActionId{0}}), 3));
  EXPECT_FALSE(pat.is_compatible_order(Pattern({ActionId{0}, ActionId{1}}), 3));
}

TEST(Pattern, FileRoundTrip)
{
  Problem p = two_robots();
  Pattern pat = parse_pattern(slurp(data_path("two_robots/pattern.txt")), p);
  ASSERT_EQ(pat.size(), 9u);
  EXPECT_EQ(p.action(pat[0]).name, "lre");
  EXPECT_EQ(p.action(pat[8]).name, "lft_l");
  EXPECT_EQ(parse_pattern(format_pattern(pat, p), p), pat);
  EXPECT_THROW(parse_pattern("fly\n", p), ModelError);
}
