// Serial reference against the OpenMP path for the four hot kernels.
// The second argument of each benchmark is 0 for serial, 1 for threaded.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "weil/dirac_pert.hpp"
#include "weil/spectral.hpp"
#include "weil/weil_form.hpp"
#include "weil/xi_oracle.hpp"

using namespace weil;

namespace {

const PrecisionContext& ctx() {
  static const PrecisionContext c = PrecisionContext::from_digits(100);
  return c;
}

WeilParams params(int N) { return WeilParams::make(LambdaSpec::parse("sqrt:13"), N, ctx()); }

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "openmp x" + std::to_string(omp_get_max_threads()) : "serial");
}

void BM_Assemble(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  const bool par = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(par ? assemble(p) : assemble_serial(p));
  label(state);
}

void BM_Jacobi(benchmark::State& state) {
  const auto m = assemble(params(static_cast<int>(state.range(0))));
  JacobiOptions opt;
  opt.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eig(m.tau, ctx(), opt));
  label(state);
}

void BM_SecularRoots(benchmark::State& state) {
  const auto p = params(static_cast<int>(state.range(0)));
  const auto d = jacobi_eig(assemble(p).tau, ctx());
  const auto op = PerturbedOperator::make(p, minimal_vector(d, p), d.eps_N);
  SecularOptions opt;
  opt.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(secular_roots(op, opt));
  label(state);
}

void BM_XiNodes(benchmark::State& state) {
  const ThetaSeries ts = ThetaSeries::make(PrecisionContext::from_digits(static_cast<int>(state.range(0))));
  const bool par = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(xi_node_values(ts, par));
  label(state);
}

}  // namespace

BENCHMARK(BM_Assemble)->ArgsProduct({{16, 40}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jacobi)->ArgsProduct({{12, 24}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SecularRoots)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_XiNodes)->ArgsProduct({{60, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
