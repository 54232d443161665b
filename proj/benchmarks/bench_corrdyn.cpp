#include <benchmark/benchmark.h>

#include <cstddef>

#include "corrdyn/correlation.hpp"
#include "corrdyn/models.hpp"

namespace {

corrdyn::ReturnsPanel synthetic_panel(std::size_t n, std::size_t periods) {
  const auto factor = corrdyn::cholesky(corrdyn::one_factor_matrix(n, 0.2));
  return corrdyn::generate_panel(factor, periods, 12345);
}

void bm_eigendecompose(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto panel = synthetic_panel(n, 4 * n);
  const auto matrix = corrdyn::correlation_matrix(corrdyn::normalize_window(panel.returns));
  for (auto _ : state) {
    auto spectrum = corrdyn::eigendecompose(matrix);
    benchmark::DoNotOptimize(spectrum.eigenvalues.data());
  }
}
BENCHMARK(bm_eigendecompose)->Arg(50)->Arg(100)->Arg(200);

void bm_sliding_spectra(benchmark::State& state) {
  const auto panel = synthetic_panel(50, 1000);
  corrdyn::WindowConfig cfg;
  cfg.length = 200;
  corrdyn::SlidingOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto series = corrdyn::sliding_spectra(panel, cfg, opts);
    benchmark::DoNotOptimize(series.eigenvalues.data());
  }
}
BENCHMARK(bm_sliding_spectra)->Arg(1)->Arg(4);

void bm_generate_panel(benchmark::State& state) {
  const auto factor = corrdyn::cholesky(corrdyn::one_factor_matrix(50, 0.3));
  for (auto _ : state) {
    auto panel = corrdyn::generate_panel(factor, 10000, 7);
    benchmark::DoNotOptimize(panel.returns.data());
  }
}
BENCHMARK(bm_generate_panel);

void bm_cholesky(benchmark::State& state) {
  const auto matrix = corrdyn::one_factor_matrix(static_cast<std::size_t>(state.range(0)), 0.25);
  for (auto _ : state) {
    auto factor = corrdyn::cholesky(matrix);
    benchmark::DoNotOptimize(factor.lower.data());
  }
}
BENCHMARK(bm_cholesky)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
