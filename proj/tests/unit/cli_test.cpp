#include "fixtures.hpp"
#include "random_problem.hpp"

#include "symplan/cli/commands.hpp"
#include "symplan/native_format.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

using namespace symplan;
using namespace symplan::testing;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args)
{
  args.insert(args.begin(), "symplan");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> solver_flags() { return {"--solver-cmd", solver_command(), "--timeout-per-bound", "60"}; }

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b)
{
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::string kDomain = data_path("two_robots/domain.pddl");
const std::string kProblem = data_path("two_robots/problem.pddl");

}  // namespace

TEST(Cli, GenerateWritesBothFiles)
{
  auto dir = scratch_dir("gen");
  Invocation r = invoke({"generate", "line-exchange", "--robots", "3", "--segment", "2", "--items", "4", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["domain"], (dir / "domain.pddl").string());
  Problem p = pddl::ground(pddl::parse_domain(slurp(dir / "domain.pddl")), slurp(dir / "problem.pddl"));
  EXPECT_EQ(p.init.nums[num(p, "(q r1)").index], 4);
  fs::remove_all(dir);
}

TEST(Cli, GenerateRejectsBadSizes)
{
  EXPECT_EQ(invoke({"generate", "line-exchange", "--robots", "1", "--out-dir", scratch_dir("bad").string()}).code, cli::kError);
  EXPECT_EQ(invoke({"generate", "three-robots"}).code, cli::kError);
}

TEST(Cli, ValidateExitCodes)
{
  Invocation ok = invoke({"validate", "--plan", data_path("two_robots/plan_shortest.txt"), kDomain, kProblem});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(nlohmann::json::parse(ok.out)["valid"].get<bool>());
  Invocation bad = invoke({"validate", "--plan", data_path("two_robots/plan_truncated.txt"), kDomain, kProblem});
  EXPECT_EQ(bad.code, 1);
  auto j = nlohmann::json::parse(bad.out);
  EXPECT_FALSE(j["valid"].get<bool>());
}

TEST(Cli, UsageErrors)
{
  EXPECT_EQ(invoke({}).code, cli::kError);
  EXPECT_EQ(invoke({"solve"}).code, cli::kError);
  EXPECT_EQ(invoke({"solve", "/no/such/file.pddl"}).code, cli::kError);
  EXPECT_EQ(invoke({"stats", "--encoding", "sideways", kDomain, kProblem}).code, cli::kError);
  EXPECT_EQ(invoke({"validate", kDomain, kProblem}).code, cli::kError);
}

TEST(Cli, MalformedInputIsAnError)
{
  auto dir = scratch_dir("malformed");
  std::ofstream(dir / "broken.pddl") << "(define (domain";
  Invocation r = invoke({"stats", (dir / "broken.pddl").string(), kProblem});
  EXPECT_EQ(r.code, cli::kError);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, StatsRelateAcrossEncodings)
{
  auto stats = [&](const char* enc, const char* bound) {
    Invocation r = invoke({"stats", "--encoding", enc, "--bound", bound, kDomain, kProblem});
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out);
  };
  for (const char* n : {"1", "3"}) {
    auto standard = stats("standard", n), rolled = stats("rolled", n), r2e = stats("r2e", n), pattern = stats("pattern", n);
    EXPECT_EQ(standard["num_assertions"].get<int>(), rolled["num_assertions"].get<int>() + 9 * std::stoi(n));
    EXPECT_EQ(standard["num_vars"], rolled["num_vars"]);
    EXPECT_LE(pattern["num_vars"].get<int>(), r2e["num_vars"].get<int>());
    EXPECT_EQ(pattern["encoding"], "pattern");
    EXPECT_EQ(pattern["bound"].get<int>(), std::stoi(n));
  }
}

TEST(Cli, EncodeIsByteIdentical)
{
  auto a = scratch_dir("enc_a"), b = scratch_dir("enc_b");
  for (const auto& d : {a, b}) {
    Invocation r = invoke({"encode", "--bound", "2", "--seed", "3", "--dump-smt", d.string(), "--pattern-out", (d / "pattern.txt").string(),
                 kDomain, kProblem});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["smt_file"], (d / "bound_2.smt2").string());
  }
  EXPECT_EQ(slurp(a / "bound_2.smt2"), slurp(b / "bound_2.smt2"));
  EXPECT_EQ(slurp(a / "pattern.txt"), slurp(b / "pattern.txt"));
  Problem p = two_robots();
  EXPECT_EQ(parse_pattern(slurp(a / "pattern.txt"), p), arpg_pattern(p, 3));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, SolveWithExamplePatternAndPlanOut)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  auto dir = scratch_dir("solve");
  Invocation r = invoke(std::vector<std::string>{"solve", "--pattern-file", data_path("two_robots/pattern.txt"), "--plan-out",
                                       (dir / "plan.txt").string(), kDomain, kProblem} +
              solver_flags());
  ASSERT_EQ(r.code, cli::kPlanFound) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["outcome"], "plan");
  EXPECT_EQ(j["bound"].get<int>(), 1);
  Problem p = two_robots();
  EXPECT_TRUE(validate_plan(p, parse_plan(slurp(dir / "plan.txt"), p)).valid);
  fs::remove_all(dir);
}

TEST(Cli, SolveExhaustsBelowTheBound)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  Invocation r = invoke(std::vector<std::string>{"solve", "--encoding", "standard", "--max-bound", "3", kDomain, kProblem} + solver_flags());
  EXPECT_EQ(r.code, cli::kExhausted) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["outcome"], "exhausted");
}

TEST(Cli, SolveTimeoutAndBadSolver)
{
  Invocation t = invoke({"solve", "--solver-cmd", "sleep 30", "--timeout-per-bound", "0.3", "--max-bound", "1", kDomain, kProblem});
  EXPECT_EQ(t.code, cli::kTimeout) << t.err;
  Invocation u = invoke({"solve", "--solver-cmd", "echo unknown", "--max-bound", "1", kDomain, kProblem});
  EXPECT_EQ(u.code, cli::kTimeout) << u.err;
  Invocation e = invoke({"solve", "--solver-cmd", "symplan-no-such-solver", "--max-bound", "1", kDomain, kProblem});
  EXPECT_EQ(e.code, cli::kError);
}

TEST(Cli, NativeInputSolves)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  auto dir = scratch_dir("native");
  std::ofstream(dir / "tr.nplan.json") << write_native_problem(two_robots(2, 3));
  Invocation r = invoke(std::vector<std::string>{"solve", "--encoding", "rolled", "--incremental", (dir / "tr.nplan.json").string()} + solver_flags());
  ASSERT_EQ(r.code, cli::kPlanFound) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["bound"].get<int>(), 5);
  fs::remove_all(dir);
}

TEST(Cli, EmptyGoalIsSolvedAtBoundZero)
{
  if (!solver_available()) GTEST_SKIP() << "no SMT solver";
  auto dir = scratch_dir("empty");
  Problem p;
  p.num_names = {"x"};
  p.init.nums = {Rational(0)};
  std::ofstream(dir / "empty.nplan.json") << write_native_problem(p);
  Invocation r = invoke(std::vector<std::string>{"solve", "--start-bound", "0", (dir / "empty.nplan.json").string()} + solver_flags());
  ASSERT_EQ(r.code, cli::kPlanFound) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["bound"].get<int>(), 0);
  EXPECT_TRUE(j["plan"].empty());
  fs::remove_all(dir);
}

TEST(Cli, BinaryExitCodeMatchesInProcess)
{
  std::string cmd = std::string(SYMPLAN_CLI_PATH) + " validate --plan " + data_path("two_robots/plan_truncated.txt") + " " + kDomain +
                    " " + kProblem + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 1);
}
