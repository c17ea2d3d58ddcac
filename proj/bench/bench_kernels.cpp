#include <benchmark/benchmark.h>

#include "greypath/coupling.hpp"
#include "greypath/fbm.hpp"
#include "greypath/ggbm.hpp"
#include "greypath/montecarlo.hpp"

namespace {

using greypath::Exec;

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_KernelMatrix(benchmark::State& st) {
  const greypath::HurstParam H(0.7);
  const greypath::TimeGrid grid(1.0, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(greypath::build_kernel_matrix(H, grid, greypath::CellRule::CellAverage, exec_of(st)));
}
BENCHMARK(BM_KernelMatrix)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Coupling(benchmark::State& st) {
  const greypath::HurstParam H(0.75);
  for (auto _ : st)
    benchmark::DoNotOptimize(greypath::Coupling(H, static_cast<std::size_t>(st.range(0)),
                                                greypath::CouplingScheme::Projected, exec_of(st)));
}
BENCHMARK(BM_Coupling)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GgbmMoments(benchmark::State& st) {
  const greypath::GgbmParams params(greypath::BetaParam(0.5), 1.5);
  const greypath::GgbmSampler sampler(params, greypath::TimeGrid(1.0, 128));
  const std::vector<std::size_t> obs{128};
  for (auto _ : st) {
    auto stats = greypath::run_blocks(static_cast<std::uint64_t>(st.range(0)), 7, 1, [&](greypath::Rng& rng, double* out) {
      const auto d = greypath::sample_ggbm(sampler, rng, &obs);
      out[0] = d.values[128] * d.values[128];
    }, exec_of(st));
    benchmark::DoNotOptimize(stats);
  }
}
BENCHMARK(BM_GgbmMoments)->ArgsProduct({{8192}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
