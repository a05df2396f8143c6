#include <benchmark/benchmark.h>

#include "stt/solver.hpp"
#include "stt/syntax.hpp"

using namespace stt;

namespace {

TriContext simplex_ctx(int n) {
  TriContext ctx;
  for (int i = 0; i < n; ++i)
    ctx = ctx.extended_cube("t" + std::to_string(i + 1), CubeShape::interval());
  return ctx;
}

// t_n <= ... <= t_1, the simplex chain.
std::vector<TopePtr> chain_hyps(int n) {
  std::vector<TopePtr> out;
  for (int i = 0; i + 1 < n; ++i)
    out.push_back(Tope::leq(CubeTerm::var(i), CubeTerm::var(i + 1)));
  return out;
}

void bench_entails_chain(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  TriContext ctx = simplex_ctx(n);
  auto hyps = chain_hyps(n);
  TopePtr goal = Tope::leq(CubeTerm::var(0), CubeTerm::var(n - 1));
  for (auto _ : state) {
    Solver s;  // cold cache each iteration
    benchmark::DoNotOptimize(s.entails(ctx, hyps, goal));
  }
}
BENCHMARK(bench_entails_chain)->Arg(2)->Arg(3)->Arg(4)->Arg(5);

void bench_entails_chain_cached(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  TriContext ctx = simplex_ctx(n);
  auto hyps = chain_hyps(n);
  TopePtr goal = Tope::leq(CubeTerm::var(0), CubeTerm::var(n - 1));
  Solver s;
  (void)s.entails(ctx, hyps, goal);
  for (auto _ : state) benchmark::DoNotOptimize(s.entails(ctx, hyps, goal));
}
BENCHMARK(bench_entails_chain_cached)->Arg(3)->Arg(5);

void bench_saturate_free(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  TriContext ctx = simplex_ctx(n);
  for (auto _ : state) {
    Solver s;
    benchmark::DoNotOptimize(s.saturate_branches(ctx, {}));
  }
}
BENCHMARK(bench_saturate_free)->Arg(1)->Arg(2)->Arg(3);

void bench_totality_goal(benchmark::State& state) {
  TriContext ctx = simplex_ctx(3);
  TopePtr goal = Tope::disj(
      Tope::disj(Tope::conj(Tope::leq(CubeTerm::var(0), CubeTerm::var(1)),
                            Tope::leq(CubeTerm::var(1), CubeTerm::var(2))),
                 Tope::conj(Tope::leq(CubeTerm::var(1), CubeTerm::var(0)),
                            Tope::leq(CubeTerm::var(0), CubeTerm::var(2)))),
      Tope::disj(Tope::leq(CubeTerm::var(2), CubeTerm::var(0)),
                 Tope::leq(CubeTerm::var(2), CubeTerm::var(1))));
  for (auto _ : state) {
    Solver s;
    benchmark::DoNotOptimize(s.entails(ctx, {}, goal));
  }
}
BENCHMARK(bench_totality_goal);

}  // namespace

BENCHMARK_MAIN();
