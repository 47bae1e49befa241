// End-to-end solving of LineExchange(4, 2, Q) with the pattern encoding.
// Needs an SMT solver; SYMPLAN_BENCH_SOLVER overrides the command.

#include "symplan/analysis.hpp"
#include "symplan/cli/generators.hpp"
#include "symplan/engine.hpp"
#include "symplan/pddl.hpp"

#include <benchmark/benchmark.h>

#include <cstdlib>

using namespace symplan;

namespace {

void BM_SolveLineExchange(benchmark::State& state)
{
  auto g = cli::generate(cli::LineExchangeSpec{4, 2, state.range(0)});
  Problem p = pddl::ground(pddl::parse_domain(g.domain), g.problem);
  EncodingOptions o;
  o.sequence = arpg_pattern(p, 0);
  SolveOptions so;
  so.max_bound = 10;
  SolverConfig cfg;
  if (const char* cmd = std::getenv("SYMPLAN_BENCH_SOLVER")) cfg.command = cmd;
  cfg.timeout_seconds = 120;
  for (auto _ : state) {
    PlanResult r = solve(p, o, so, cfg);
    if (r.outcome != PlanResult::Outcome::Plan) {
      state.SkipWithError("no plan");
      break;
    }
    state.counters["bound"] = r.bound;
  }
}
BENCHMARK(BM_SolveLineExchange)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
