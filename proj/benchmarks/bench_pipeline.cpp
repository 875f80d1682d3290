// Hot-path benchmarks: grid construction, channel evolution, witness-curve
// evaluation, dense oracle, and the estimation fits.

#include <benchmark/benchmark.h>

#include <vector>

#include "polfreq/constants.hpp"
#include "polfreq/estimation.hpp"
#include "polfreq/oracle.hpp"
#include "polfreq/witness.hpp"

using namespace polfreq;

namespace {

constexpr double kOmega0 = 2060.88792922194;
constexpr double kDeltaOmega = 0.10306090899721736;

FrequencyGrid grid_of(std::size_t n) {
  GridSpec gs;
  gs.scheme = GridScheme::Quantile;
  gs.n_bins = n;
  return discretize(make_lorentzian(kOmega0, kDeltaOmega), gs);
}

AliceState alice_of(const FrequencyGrid& grid) {
  return prepare_alice_state(make_preparation(0.5, 35.92, 0.179), grid, 7);
}

void BM_DiscretizeQuantile(benchmark::State& state) {
  SpectralDensity spec = make_lorentzian(kOmega0, kDeltaOmega);
  GridSpec gs;
  gs.scheme = GridScheme::Quantile;
  gs.n_bins = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(discretize(spec, gs));
}
BENCHMARK(BM_DiscretizeQuantile)->Arg(1024)->Arg(4096);

void BM_ControlledPhase(benchmark::State& state) {
  FrequencyGrid grid = grid_of(static_cast<std::size_t>(state.range(0)));
  AliceState alice = alice_of(grid);
  BasisSpec basis = basis_eta(0.3);
  for (auto _ : state) {
    JointBlockState evolved = alice.state;
    apply_controlled_phase(evolved, basis, 4.0);
    benchmark::DoNotOptimize(evolved);
  }
}
BENCHMARK(BM_ControlledPhase)->Arg(1024)->Arg(4096);

void BM_CurvePoint(benchmark::State& state) {
  FrequencyGrid grid = grid_of(4096);
  AliceState alice = alice_of(grid);
  Reference ref = build_reference(alice.state, ReferenceOptions{});
  BasisSpec basis = basis_eta(0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        local_distance_single(alice.state, ref, basis, 4.0));
}
BENCHMARK(BM_CurvePoint);

void BM_WitnessCurveDense(benchmark::State& state) {
  FrequencyGrid grid = grid_of(static_cast<std::size_t>(state.range(0)));
  AliceState alice = alice_of(grid);
  Reference ref = build_reference(alice.state, ReferenceOptions{});
  DelaySweep sweep = dense_sweep(kDeltaOmega);
  for (auto _ : state)
    benchmark::DoNotOptimize(local_distance_curve(alice.state, ref, sweep));
}
BENCHMARK(BM_WitnessCurveDense)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_DenseTraceDistance(benchmark::State& state) {
  FrequencyGrid grid = grid_of(64);
  AliceState alice = alice_of(grid);
  Reference ref = build_reference(alice.state, ReferenceOptions{});
  DenseJointState da = dense_embed(alice.state);
  DenseJointState dr = dense_embed(ref.state);
  for (auto _ : state) benchmark::DoNotOptimize(dense_trace_distance(da, dr));
}
BENCHMARK(BM_DenseTraceDistance);

void BM_QuadClosedForm(benchmark::State& state) {
  SpectralDensity spec = make_lorentzian(kOmega0, kDeltaOmega);
  for (auto _ : state)
    benchmark::DoNotOptimize(quad_correlation_integral(spec, 21.447, 0.5));
}
BENCHMARK(BM_QuadClosedForm);

void BM_WitnessMaxFit(benchmark::State& state) {
  FrequencyGrid grid = grid_of(1024);
  AliceState alice = alice_of(grid);
  Reference ref = build_reference(alice.state, ReferenceOptions{});
  WitnessCurve curve =
      local_distance_curve(alice.state, ref, dense_sweep(kDeltaOmega));
  for (auto _ : state)
    benchmark::DoNotOptimize(witness_max(curve, kDeltaOmega));
}
BENCHMARK(BM_WitnessMaxFit);

void BM_FitLinewidth(benchmark::State& state) {
  double reach = 4.0 * kSpeedOfLight_mm_per_ps / (2.0 * kDeltaOmega);
  std::vector<double> xs(50);
  for (int i = 0; i < 50; ++i) xs[i] = -reach + 2.0 * reach * i / 49.0;
  VisibilityTrace trace = synthesize_visibility(kDeltaOmega, xs, 0.01, 11, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_linewidth(trace));
}
BENCHMARK(BM_FitLinewidth);

}  // namespace

BENCHMARK_MAIN();
