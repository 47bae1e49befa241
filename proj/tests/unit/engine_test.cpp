#include "fixtures.hpp"
#include "random_problem.hpp"

#include "symplan/engine.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

using namespace symplan;
using namespace symplan::testing;

namespace {

SolverConfig solver(double timeout = 0, bool incremental = false)
{
  SolverConfig cfg;
  cfg.command = solver_command();
  cfg.timeout_seconds = timeout;
  cfg.incremental = incremental;
  return cfg;
}

EncodingOptions with_sequence(const Problem& p, EncodingKind kind, std::vector<std::string> names)
{
  EncodingOptions o;
  o.kind = kind;
  for (const auto& n : names) o.sequence.push_back(act(p, n));
  return o;
}

std::uint32_t first_sat(const Problem& p, const EncodingOptions& o, std::uint32_t max_bound, bool incremental = false)
{
  SolveOptions so;
  so.max_bound = max_bound;
  PlanResult r = solve(p, o, so, solver(60, incremental));
  EXPECT_EQ(r.outcome, PlanResult::Outcome::Plan) << to_string(o.kind);
  return r.outcome == PlanResult::Outcome::Plan ? r.bound : 0;
}

const std::vector<std::string> kPlanOrder{"lre", "rle", "rgt_l", "lft_r", "conn", "exch", "disc", "lft_l", "rgt_r"};

}  // namespace

TEST(BoundSequence, Schedules)
{
  SolveOptions o;
  o.start_bound = 1;
  o.max_bound = 5;
  EXPECT_EQ(bound_sequence(o), (std::vector<std::uint32_t>{1, 2, 3, 4, 5}));
  o.schedule = Schedule::Geometric;
  o.start_bound = 0;
  o.max_bound = 20;
  EXPECT_EQ(bound_sequence(o), (std::vector<std::uint32_t>{0, 1, 2, 4, 8, 16}));
  o.start_bound = 6;
  o.max_bound = 5;
  EXPECT_TRUE(bound_sequence(o).empty());
}

TEST(RunQuery, MissingSolverIsASpawnError)
{
  SolverConfig cfg;
  cfg.command = "symplan-no-such-solver-binary";
  EXPECT_THROW(run_query(cfg, "(check-sat)\n"), SolverSpawnError);
}

TEST(RunQuery, TimeoutKillsTheProcess)
{
  SolverConfig cfg;
  cfg.command = "sleep 30";
  cfg.timeout_seconds = 0.5;
  auto t0 = std::chrono::steady_clock::now();
  RawAnswer a = run_query(cfg, "");
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_TRUE(a.timed_out);
  EXPECT_LT(took, 5.0);
}

TEST(RunQuery, TrivialQueries)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  EXPECT_EQ(parse_model(run_query(solver(), "(assert false)\n(check-sat)\n").output, {}).verdict, Verdict::Unsat);
  VarDecl x{"x", Sort::Real, StateVarOrigin{0, true, 0}, ""};
  SolverAnswer a = parse_model(run_query(solver(), print_smtlib({x}, {gt(x.term(), Term::number(2))})).output, {x});
  ASSERT_EQ(a.verdict, Verdict::Sat);
  EXPECT_GT(a.model.number("x"), 2);
}

TEST(RunQuery, HardQueryTimesOut)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  // a nonlinear integer query the solver cannot settle quickly
  std::string script =
      "(set-logic QF_NIA)\n(declare-fun x () Int)\n(declare-fun y () Int)\n(declare-fun z () Int)\n"
      "(assert (> x 2))(assert (> y 2))(assert (> z 2))\n"
      "(assert (= (+ (* x x x x x) (* y y y y y)) (* z z z z z)))\n(check-sat)\n";
  RawAnswer a = run_query(solver(1), script);
  EXPECT_TRUE(a.timed_out);
}

TEST(Solve, WorkedExampleBounds)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  EXPECT_EQ(first_sat(p, options_for(p, EncodingKind::Standard), 8), 5u);
  EXPECT_EQ(first_sat(p, options_for(p, EncodingKind::Rolled), 8), 5u);
  EXPECT_EQ(first_sat(p, with_sequence(p, EncodingKind::R2E, kPlanOrder), 8), 1u);
  EncodingOptions hand;
  hand.kind = EncodingKind::Pattern;
  hand.sequence = parse_pattern(slurp(data_path("two_robots/pattern.txt")), p);
  EXPECT_EQ(first_sat(p, hand, 8), 1u);
}

TEST(Solve, ReversedOrderNeedsTheStandardBound)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  std::vector<std::string> reversed(kPlanOrder.rbegin(), kPlanOrder.rend());
  EXPECT_EQ(first_sat(p, with_sequence(p, EncodingKind::R2E, reversed), 8), 5u);
}

TEST(Solve, ArpgPatternBoundDependsOnExchDiscOrder)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  std::vector<std::string> head{"lft_r", "rgt_r", "lft_l", "rgt_l", "lre", "rle", "conn"};
  auto exch_first = head, disc_first = head;
  exch_first.insert(exch_first.end(), {"exch", "disc"});
  disc_first.insert(disc_first.end(), {"disc", "exch"});
  EXPECT_EQ(first_sat(p, with_sequence(p, EncodingKind::Pattern, exch_first), 6), 2u);
  EXPECT_EQ(first_sat(p, with_sequence(p, EncodingKind::Pattern, disc_first), 6), 3u);
}

TEST(Solve, IncrementalAgreesWithOneShot)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots(2, 2);
  for (EncodingKind k : {EncodingKind::Standard, EncodingKind::Rolled, EncodingKind::R2E, EncodingKind::Pattern}) {
    auto o = options_for(p, k);
    EXPECT_EQ(first_sat(p, o, 12, true), first_sat(p, o, 12, false)) << to_string(k);
  }
}

TEST(Solve, ExhaustedWhenBoundTooSmall)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  SolveOptions so;
  so.max_bound = 3;
  PlanResult r = solve(p, options_for(p, EncodingKind::Standard), so, solver(60));
  EXPECT_EQ(r.outcome, PlanResult::Outcome::Exhausted);
  EXPECT_FALSE(r.plan);
  EXPECT_EQ(r.stats.size(), 3u);
}

TEST(Solve, UnreachableGoalIsExhaustedNotProvenImpossible)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  // x_l never exceeds 0: rgt_l needs x_l < 0
  p.goals = {GoalFormula::leaf(compare(LinearExpr::variable(num(p, "x_l")), Relation::Eq, LinearExpr(1)))};
  EXPECT_FALSE(bfs_shortest(p, 6));
  SolveOptions so;
  so.max_bound = 3;
  PlanResult r = solve(p, options_for(p, EncodingKind::Pattern), so, solver(60));
  EXPECT_EQ(r.outcome, PlanResult::Outcome::Exhausted);
}

TEST(Solve, TimeoutOutcome)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  SolveOptions so;
  so.max_bound = 2;
  SolverConfig cfg;
  cfg.command = "sleep 30";
  cfg.timeout_seconds = 0.3;
  EXPECT_EQ(solve(p, options_for(p, EncodingKind::Pattern), so, cfg).outcome, PlanResult::Outcome::Timeout);
  so.abort_on_unknown = true;
  PlanResult r = solve(p, options_for(p, EncodingKind::Pattern), so, cfg);
  EXPECT_EQ(r.outcome, PlanResult::Outcome::Timeout);
  EXPECT_EQ(r.stats.size(), 1u);
}

TEST(Solve, UnknownOutcome)
{
  Problem p = two_robots();
  SolveOptions so;
  so.max_bound = 2;
  SolverConfig cfg;
  cfg.command = "echo unknown";
  EXPECT_EQ(solve(p, options_for(p, EncodingKind::Pattern), so, cfg).outcome, PlanResult::Outcome::Unknown);
}

TEST(Solve, DumpsOneFilePerBound)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  auto dir = scratch_dir("dump");
  SolveOptions so;
  so.max_bound = 8;
  so.dump_dir = dir.string();
  PlanResult r = solve(p, options_for(p, EncodingKind::Rolled), so, solver(60));
  ASSERT_EQ(r.outcome, PlanResult::Outcome::Plan);
  for (std::uint32_t n = 1; n <= r.bound; ++n) EXPECT_TRUE(std::filesystem::exists(dir / ("bound_" + std::to_string(n) + ".smt2"))) << n;
  EXPECT_FALSE(std::filesystem::exists(dir / ("bound_" + std::to_string(r.bound + 1) + ".smt2")));
  std::filesystem::remove_all(dir);
}

TEST(Solve, ReturnedPlansValidate)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Problem p = random_problem(seed);
    for (EncodingKind k : {EncodingKind::Standard, EncodingKind::Rolled, EncodingKind::R2E, EncodingKind::Pattern}) {
      SolveOptions so;
      so.max_bound = 3;
      PlanResult r = solve(p, options_for(p, k), so, solver(20));
      if (r.plan) {
        EXPECT_TRUE(validate_plan(p, *r.plan).valid) << seed << " " << to_string(k);
      }
    }
  }
}

TEST(Solve, ResultJsonShape)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Problem p = two_robots();
  SolveOptions so;
  so.max_bound = 4;
  auto opt = options_for(p, EncodingKind::Pattern);
  std::string j = result_json(solve(p, opt, so, solver(60)), p, opt);
  for (const char* key : {"\"outcome\": \"plan\"", "\"plan\"", "\"bounds\"", "\"per_role_counts\"", "\"encoding\": \"pattern\""})
    EXPECT_NE(j.find(key), std::string::npos) << key << "\n" << j;
}
