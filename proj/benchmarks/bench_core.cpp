#include <benchmark/benchmark.h>

#include "nlds/assembly.hpp"
#include "nlds/epidemic.hpp"
#include "nlds/expr.hpp"
#include "nlds/opspec.hpp"
#include "nlds/reduce.hpp"

using namespace nlds;

namespace {

DispersalSystem quadratic(double d) {
  DispersalSystem sys;
  sys.l = 2;
  sys.l1 = 2;
  sys.d = {d, d};
  sys.kernels = {{Expr::parse("exp(-(x-y)^2)")}, {Expr::parse("exp(-(x-y)^2)")}};
  sys.coefficients.l = 2;
  for (const char* c : {"-x^2", "1", "1", "-x^2"}) sys.coefficients.entries.push_back(Expr::parse(c));
  sys.domain = {-1.0, 1.0};
  return sys;
}

void BM_ExprEval(benchmark::State& state) {
  const Expr e = Expr::parse("exp(-(x-y)^2) * (1 + 0.5*cos(pi*x)) / (2 + abs(y)^0.5)");
  double x = -1.0, acc = 0.0;
  for (auto _ : state) {
    acc += e.eval(x, 0.25);
    x = x > 1.0 ? -1.0 : x + 1e-3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ExprEval);

void BM_Assemble(benchmark::State& state) {
  const auto sys = quadratic(1.0);
  const auto grid = build_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(sys, grid).matrix.data());
}
BENCHMARK(BM_Assemble)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SpectralBound(benchmark::State& state) {
  const auto P = assemble_operator(quadratic(1.0), build_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_bound(P).s);
}
BENCHMARK(BM_SpectralBound)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_DenseSpectrum(benchmark::State& state) {
  const auto P = assemble_operator(quadratic(1.0), build_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(dense_spectrum(P).size());
}
BENCHMARK(BM_DenseSpectrum)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_PerronWeight(benchmark::State& state) {
  const KernelSpec k{Expr::parse("exp(-(x-y-0.3)^2)")};
  const auto grid = build_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(perron_weight(k, grid).eigenvalue);
}
BENCHMARK(BM_PerronWeight)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_R0(benchmark::State& state) {
  const VSIParams p{KernelSpec{Expr::parse("exp(-(x-y)^2)")},
                    1.0,
                    Expr::parse("1"),
                    Expr::parse("1 + x^2"),
                    Expr::parse("1"),
                    Expr::parse("0.5 + 0.2*cos(pi*x)"),
                    Expr::parse("1"),
                    Interval{-1.0, 1.0}};
  const auto v = sample(p, build_grid(-1.0, 1.0, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(r0(v).r0);
}
BENCHMARK(BM_R0)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
