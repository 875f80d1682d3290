#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/spectrum.hpp"

using namespace polfreq;

namespace {

constexpr double kOmega0 = 2060.88792922194;       // 914 nm carrier
constexpr double kDeltaOmega = 0.10306090899721736;  // 1 / 9.703 ps

SpectralDensity channel_spec() { return make_lorentzian(kOmega0, kDeltaOmega); }

double t_of_k(int k) {
  return static_cast<double>(k) * 8.98 * 0.179 / kSpeedOfLight_mm_per_ps;
}

// Partial Fourier series of |sin| integrated against the Lorentzian:
// (2/pi) - (4/pi) sum_k e^{-2kT} / (4k^2 - 1).
double series_integral(double T, int terms) {
  double s = 2.0 / kPi;
  for (int k = 1; k <= terms; ++k)
    s -= (4.0 / kPi) * std::exp(-2.0 * k * T) / (4.0 * k * k - 1.0);
  return s;
}

}  // namespace

TEST_CASE("lorentzian density constructor validates and flags narrowband") {
  CHECK_THROWS_AS(make_lorentzian(0.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_lorentzian(-2.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_lorentzian(100.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(make_lorentzian(100.0, -1.0), InvalidParameter);

  SpectralDensity spec = channel_spec();
  CHECK(spec.shape == SpectralShape::Lorentzian);
  CHECK(!spec.narrowband_warning);
  CHECK(make_lorentzian(5.0, 1.0).narrowband_warning);
}

TEST_CASE("lorentzian pdf peaks at the carrier with height 1/(pi dw)") {
  SpectralDensity spec = channel_spec();
  CHECK(lorentzian_pdf(spec, kOmega0) ==
        doctest::Approx(1.0 / (kPi * kDeltaOmega)).epsilon(1e-14));
  // Half maximum at omega0 +- delta_omega; (omega0 + dw) - omega0 rounds at
  // the carrier's ulp, so the node is off by ~1e-12 relative.
  CHECK(lorentzian_pdf(spec, kOmega0 + kDeltaOmega) ==
        doctest::Approx(0.5 / (kPi * kDeltaOmega)).epsilon(1e-11));
}

TEST_CASE("tabulated density renormalizes and validates ordering") {
  SpectralDensity tab = make_tabulated(10.0, {9.0, 10.0, 11.0}, {2.0, 4.0, 2.0});
  double sum = 0.0;
  for (double w : tab.tab_weight) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tab.tab_weight[1] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(make_tabulated(10.0, {9.0, 9.0}, {1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_tabulated(10.0, {11.0, 9.0}, {1.0, 1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_tabulated(10.0, {9.0, 11.0}, {1.0, -1.0}), InvalidParameter);
  CHECK_THROWS_AS(make_tabulated(10.0, {9.0, 11.0}, {0.0, 0.0}), InvalidParameter);
}

TEST_CASE("grid validation rejects the documented failure modes") {
  FrequencyGrid grid;
  grid.omega0 = 10.0;
  grid.omega = {9.0, 10.0, 11.0};
  grid.weight = {0.25, 0.5, 0.25};
  CHECK_NOTHROW(validate_grid(grid));

  FrequencyGrid bad = grid;
  bad.omega[1] = 9.0;  // not strictly increasing
  CHECK_THROWS_AS(validate_grid(bad), InvalidParameter);
  bad = grid;
  bad.weight[1] = -0.5;
  CHECK_THROWS_AS(validate_grid(bad), InvalidParameter);
  bad = grid;
  bad.weight[1] = 0.6;  // sum != 1
  CHECK_THROWS_AS(validate_grid(bad), InvalidParameter);
  bad = grid;
  bad.weight.pop_back();
  CHECK_THROWS_AS(validate_grid(bad), InvalidParameter);
}

TEST_CASE("discretize enforces scheme preconditions") {
  SpectralDensity spec = channel_spec();
  GridSpec gs;
  gs.n_bins = 32;  // < 64
  CHECK_THROWS_AS(discretize(spec, gs), InvalidParameter);
  gs.n_bins = 128;
  gs.scheme = GridScheme::UniformTruncated;
  gs.span_kappa = 5.0;  // < 10
  CHECK_THROWS_AS(discretize(spec, gs), InvalidParameter);
}

TEST_CASE("quantile grid structure: exact node count, ordering, unit mass") {
  SpectralDensity spec = channel_spec();
  for (std::size_t n : {256u, 1024u, 4096u}) {
    GridSpec gs;
    gs.scheme = GridScheme::Quantile;
    gs.n_bins = n;
    FrequencyGrid grid = discretize(spec, gs);
    CHECK(grid.size() == n);
    CHECK_NOTHROW(validate_grid(grid));
    double sum = 0.0;
    for (double w : grid.weight) sum += w;
    CHECK(std::abs(sum - 1.0) <= 1e-15);
    for (std::size_t i = 1; i < n; ++i) CHECK(grid.omega[i] > grid.omega[i - 1]);
  }
}

TEST_CASE("uniform grid covers the requested span with unit mass") {
  SpectralDensity spec = channel_spec();
  GridSpec gs;
  gs.scheme = GridScheme::UniformTruncated;
  gs.n_bins = 1024;
  gs.span_kappa = 50.0;
  FrequencyGrid grid = discretize(spec, gs);
  CHECK(grid.size() == 1024);
  double sum = 0.0;
  for (double w : grid.weight) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(grid.omega.front() > kOmega0 - 50.0 * kDeltaOmega);
  CHECK(grid.omega.back() < kOmega0 + 50.0 * kDeltaOmega);
  CHECK(grid.omega.front() < kOmega0 - 49.0 * kDeltaOmega);
}

TEST_CASE("continuum coherence is exp(-dw|t|) and unity at t = 0") {
  SpectralDensity spec = channel_spec();
  CHECK(std::abs(coherence(spec, 0.0) - 1.0) <= 1e-15);
  double t = 9.703;
  CHECK(std::abs(coherence(spec, t)) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(std::abs(coherence(spec, -t)) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
}

TEST_CASE("grid coherence reproduces the continuum at one coherence time") {
  SpectralDensity spec = channel_spec();
  GridSpec gs;
  gs.n_bins = 4096;
  FrequencyGrid grid = discretize(spec, gs);
  double t = 9.703;
  std::complex<double> c_grid = coherence(grid, t);
  CHECK(std::abs(c_grid - coherence(spec, t)) <= 1e-3);
  CHECK(std::abs(coherence(grid, 0.0) - 1.0) <= 1e-12);
  // |C| <= 1 everywhere on the grid ensemble.
  for (double t_probe : {0.3, 4.7, 21.447103916136545, 120.083}) {
    CHECK(std::abs(coherence(grid, t_probe)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("quantile coherence error decreases along the refinement ladder") {
  SpectralDensity spec = channel_spec();
  double t = 1.0 / kDeltaOmega;
  std::complex<double> exact = coherence(spec, t);
  double prev = 1.0;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    GridSpec gs;
    gs.n_bins = n;
    double err = std::abs(coherence(discretize(spec, gs), t) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-3);
}

TEST_CASE("uniform coherence error decreases along the paired ladder") {
  SpectralDensity spec = channel_spec();
  double t = 1.0 / kDeltaOmega;
  std::complex<double> exact = coherence(spec, t);
  double prev = 1.0;
  const std::pair<double, std::size_t> rungs[] = {
      {25.0, 256}, {50.0, 1024}, {100.0, 4096}};
  for (auto [kappa, n] : rungs) {
    GridSpec gs;
    gs.scheme = GridScheme::UniformTruncated;
    gs.span_kappa = kappa;
    gs.n_bins = n;
    double err = std::abs(coherence(discretize(spec, gs), t) - exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("correlation integral matches the frozen length-ladder values") {
  SpectralDensity spec = channel_spec();
  const double frozen[6] = {0.4851354324152372, 0.589006153812596,
                            0.6210936857023834, 0.6315036024267056,
                            0.6349282821803843, 0.6360599315252339};
  for (int k = 1; k <= 6; ++k) {
    double value = quad_correlation_integral(spec, t_of_k(k), 0.5);
    CHECK(value == doctest::Approx(frozen[k - 1]).epsilon(1e-12));
  }
}

TEST_CASE("correlation integral agrees with the partial series oracle") {
  SpectralDensity spec = channel_spec();
  for (int k : {1, 4}) {
    double T = kDeltaOmega * t_of_k(k);
    // 60 terms leave a tail below e^{-120 T} / 3; far under 1e-9 here.
    double oracle = 2.0 * 0.5 * series_integral(T, 60);
    CHECK(quad_correlation_integral(spec, t_of_k(k), 0.5) ==
          doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("correlation integral limits and symmetry") {
  SpectralDensity spec = channel_spec();
  CHECK(quad_correlation_integral(spec, 0.0, 0.5) == 0.0);
  CHECK(quad_correlation_integral(spec, 21.4, 0.0) == 0.0);
  // Long-delay limit 2 d <|sin|> = 2 d (2/pi).
  double t_long = 100.0 / kDeltaOmega;
  CHECK(std::abs(quad_correlation_integral(spec, t_long, 0.5) -
                 0.6366197723675814) <= 1e-3);
  // Even in t, monotone bound 2d.
  double t = t_of_k(2);
  CHECK(quad_correlation_integral(spec, -t, 0.5) ==
        doctest::Approx(quad_correlation_integral(spec, t, 0.5)).epsilon(1e-15));
  for (int k = 1; k <= 6; ++k)
    CHECK(quad_correlation_integral(spec, t_of_k(k), 0.5) <= 1.0);
  CHECK_THROWS_AS(quad_correlation_integral(spec, 1.0, 0.6), InvalidParameter);
  CHECK_THROWS_AS(quad_correlation_integral(spec, 1.0, -0.1), InvalidParameter);
}

TEST_CASE("tabulated correlation integral is the exact weighted sum") {
  SpectralDensity tab =
      make_tabulated(10.0, {9.0, 10.0, 11.5}, {0.25, 0.5, 0.25});
  double t = 0.73;
  double expect = 2.0 * 0.4 *
                  (0.25 * std::abs(std::sin(-1.0 * t)) +
                   0.5 * std::abs(std::sin(0.0)) +
                   0.25 * std::abs(std::sin(1.5 * t)));
  CHECK(quad_correlation_integral(tab, t, 0.4) ==
        doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("tabulated density passes through discretize unchanged") {
  SpectralDensity tab =
      make_tabulated(10.0, {9.0, 10.0, 11.5}, {0.25, 0.5, 0.25});
  FrequencyGrid grid = discretize(tab, GridSpec{});
  REQUIRE(grid.size() == 3);
  CHECK(grid.omega[2] == 11.5);
  CHECK(grid.weight[1] == 0.5);
  CHECK(grid.omega0 == 10.0);
}

TEST_CASE("grid csv round-trips exactly") {
  SpectralDensity spec = channel_spec();
  GridSpec gs;
  gs.n_bins = 128;
  FrequencyGrid grid = discretize(spec, gs);
  auto path = std::filesystem::temp_directory_path() / "polfreq_grid_rt.csv";
  write_grid_csv(path.string(), grid);
  FrequencyGrid back = read_grid_csv(path.string(), grid.omega0);
  REQUIRE(back.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(back.omega[i] == grid.omega[i]);
    CHECK(back.weight[i] == grid.weight[i]);
  }
  std::filesystem::remove(path);
}
