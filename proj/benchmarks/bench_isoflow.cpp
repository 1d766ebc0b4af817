#include <benchmark/benchmark.h>

#include <memory>

#include "isoflow/flows.hpp"
#include "isoflow/integrators.hpp"
#include "isoflow/quantization.hpp"
#include "isoflow/scenario.hpp"

namespace {

using isoflow::Index;

std::shared_ptr<const isoflow::DiscreteLaplacian> laplacian(Index n) {
  return std::make_shared<const isoflow::DiscreteLaplacian>(
      isoflow::band_coefficients(isoflow::build_generators(n)));
}

isoflow::Matrix traceless_symmetric(Index n) {
  isoflow::Matrix m = isoflow::random_tridiagonal(n, 3).matrix();
  m.diagonal().array() -= m.trace() / static_cast<double>(n);
  return m;
}

void BM_PoissonSolve(benchmark::State& state) {
  const Index n = state.range(0);
  const auto lap = laplacian(n);
  const isoflow::Matrix p = traceless_symmetric(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::poisson_solve(*lap, p));
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_LaplacianApply(benchmark::State& state) {
  const Index n = state.range(0);
  const auto gen = isoflow::build_generators(n);
  const isoflow::Matrix p = traceless_symmetric(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::laplacian_apply(gen, p));
  }
}
BENCHMARK(BM_LaplacianApply)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_IsompStep(benchmark::State& state) {
  const Index n = state.range(0);
  const auto kind = static_cast<isoflow::FlowKind>(state.range(1));
  const isoflow::FlowSpec spec = isoflow::make_flow_spec(kind, n, laplacian(n));
  const isoflow::SymmetricMatrix l = isoflow::random_tridiagonal(n, 1);
  isoflow::IntegratorConfig cfg;
  cfg.h = kind == isoflow::FlowKind::kIpm ? 100.0 : 0.1;
  const isoflow::GeneratorFn gen = [&](const isoflow::SymmetricMatrix& x) {
    return isoflow::generator(x, spec);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::isomp_step(l, gen, cfg));
  }
}
BENCHMARK(BM_IsompStep)
    ->Args({64, static_cast<int>(isoflow::FlowKind::kToda)})
    ->Args({64, static_cast<int>(isoflow::FlowKind::kIpm)})
    ->Args({256, static_cast<int>(isoflow::FlowKind::kIpm)})
    ->Unit(benchmark::kMillisecond);

void BM_JacobiSpectrum(benchmark::State& state) {
  const isoflow::SymmetricMatrix l = isoflow::random_tridiagonal(state.range(0), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::jacobi_spectrum(l));
  }
}
BENCHMARK(BM_JacobiSpectrum)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
