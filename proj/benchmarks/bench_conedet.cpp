#include <random>

#include <benchmark/benchmark.h>

#include "conedet/det_engine.hpp"
#include "conedet/expo_poly.hpp"
#include "conedet/secular.hpp"
#include "conedet/singularity.hpp"
#include "random_lagrangian.hpp"

namespace {

using namespace conedet;

struct Input {
  Lagrangian L;
  BaseSpectrum S;
};

Input make_input(int q, int q0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {testing::random_lagrangian(rng, q0, q - q0), BaseSpectrum::create(1.2, q0, testing::random_nus(rng, q - q0))};
}

void BM_BuildP(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto in = make_input(q, q / 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_p(in.L, in.S));
}
BENCHMARK(BM_BuildP)->DenseRange(1, 6);

void BM_LogExpand(benchmark::State& state) {
  const auto in = make_input(3, 1, 2);
  const auto lead = leading_data(build_p(in.L, in.S), in.S.q0());
  const double N = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(log_expand(lead, N, 10));
}
BENCHMARK(BM_LogExpand)->Arg(1)->Arg(3)->Arg(5);

void BM_SecularF(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto in = make_input(q, q / 2, 3);
  const auto ctx = SecularContext::create(in.L, in.S);
  const Complex mu{7.3, 2.1};
  for (auto _ : state) benchmark::DoNotOptimize(secular_F_scaled(ctx, mu));
}
BENCHMARK(BM_SecularF)->DenseRange(1, 4);

void BM_DetGeneral(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const auto in = make_input(q, q / 2, 4);
  for (auto _ : state) benchmark::DoNotOptimize(det_general(in.L, in.S));
}
BENCHMARK(BM_DetGeneral)->DenseRange(1, 4);

void BM_ContourOracle(benchmark::State& state) {
  const auto ctx = SecularContext::create(make_friedrichs(0, 1), BaseSpectrum::create(1.0, 0, {0.5}));
  for (auto _ : state) benchmark::DoNotOptimize(contour_det_oracle(ctx, Complex(0.0, 0.1)));
}
BENCHMARK(BM_ContourOracle)->Unit(benchmark::kMillisecond);

void BM_FindEigenvalues(benchmark::State& state) {
  const auto ctx = SecularContext::create(make_friedrichs(1, 0), BaseSpectrum::create(1.0, 1, {}));
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_eigenvalues(ctx, K));
}
BENCHMARK(BM_FindEigenvalues)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
