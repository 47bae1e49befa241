// Formula construction cost: grounding, ARPG, and assembling one bound.

#include "symplan/analysis.hpp"
#include "symplan/cli/generators.hpp"
#include "symplan/encoders.hpp"
#include "symplan/pddl.hpp"

#include <benchmark/benchmark.h>

using namespace symplan;

namespace {

Problem line_exchange(long long robots, long long q)
{
  auto g = cli::generate(cli::LineExchangeSpec{robots, 2, q});
  return pddl::ground(pddl::parse_domain(g.domain), g.problem);
}

EncodingOptions options(const Problem& p, EncodingKind kind)
{
  EncodingOptions o;
  o.kind = kind;
  if (kind == EncodingKind::Pattern || kind == EncodingKind::R2E) o.sequence = arpg_pattern(p, 0);
  return o;
}

void BM_Ground(benchmark::State& state)
{
  auto g = cli::generate(cli::LineExchangeSpec{state.range(0), 2, 10});
  auto d = pddl::parse_domain(g.domain);
  for (auto _ : state) benchmark::DoNotOptimize(pddl::ground(d, g.problem));
}
BENCHMARK(BM_Ground)->Arg(4)->Arg(8)->Arg(16);

void BM_ArpgPattern(benchmark::State& state)
{
  Problem p = line_exchange(state.range(0), 10);
  for (auto _ : state) benchmark::DoNotOptimize(arpg_pattern(p, 0));
}
BENCHMARK(BM_ArpgPattern)->Arg(4)->Arg(8)->Arg(16);

template <EncodingKind K>
void BM_Assemble(benchmark::State& state)
{
  Problem p = line_exchange(state.range(0), 10);
  auto o = options(p, K);
  const auto n = static_cast<std::uint32_t>(state.range(1));
  std::size_t bytes = 0;
  for (auto _ : state) {
    std::string text = assemble_bound(p, o, n).smtlib();
    bytes = text.size();
    benchmark::DoNotOptimize(text);
  }
  state.counters["smt_bytes"] = static_cast<double>(bytes);
}
BENCHMARK(BM_Assemble<EncodingKind::Standard>)->Args({4, 4})->Args({8, 4});
BENCHMARK(BM_Assemble<EncodingKind::Rolled>)->Args({4, 4})->Args({8, 4});
BENCHMARK(BM_Assemble<EncodingKind::R2E>)->Args({4, 4})->Args({8, 4});
BENCHMARK(BM_Assemble<EncodingKind::Pattern>)->Args({4, 4})->Args({8, 4});

}  // namespace
