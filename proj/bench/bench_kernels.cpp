// Serial reference vs OpenMP path for the data-parallel kernels. Argument 0
// runs Exec::Serial, 1 runs Exec::Parallel; both produce identical results.
#include <benchmark/benchmark.h>

#include "engelgrad/flow.hpp"
#include "engelgrad/genericity.hpp"

using namespace engelgrad;

namespace {

const Box kUnit = Box::cube(-1, 1);
const Box kTwo = Box::cube(-2, 2);

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

VarietyOptions opts(const benchmark::State& s) {
  VarietyOptions o;
  o.exec = exec_of(s);
  return o;
}

void BM_SampleVf(benchmark::State& s) {
  const Poly4 f = random_poly(3, 1);
  for (auto _ : s) benchmark::DoNotOptimize(sample_vf(f, kUnit, 7, opts(s)));
}

void BM_TraceGamma(benchmark::State& s) {
  const Poly4 f = parse_poly("x1^2/2 + x1*x2 + x2*x4");
  for (auto _ : s) benchmark::DoNotOptimize(trace_gamma(f, kTwo, opts(s)));
}

void BM_OmegaSet(benchmark::State& s) {
  const Poly4 f = random_poly(3, 2);
  for (auto _ : s) benchmark::DoNotOptimize(omega_set(f, kUnit, opts(s)));
}

void BM_BatchFlow(benchmark::State& s) {
  const Poly4 f = random_poly(3, 1);
  FlowBatchConfig cfg;
  cfg.exec = exec_of(s);
  cfg.loja_points = 100;
  for (auto _ : s) benchmark::DoNotOptimize(batch_flow(f, kUnit, 16, cfg));
}

}  // namespace

BENCHMARK(BM_SampleVf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TraceGamma)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OmegaSet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchFlow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
