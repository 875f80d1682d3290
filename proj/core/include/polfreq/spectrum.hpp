#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace polfreq {

enum class SpectralShape { Lorentzian, TabulatedGrid };

// Single-photon spectral density. Lorentzian: g(omega) = (delta_omega/pi) /
// ((omega-omega0)^2 + delta_omega^2); delta_omega is the coherence decay
// rate, C(t) = exp(-delta_omega |t|). TabulatedGrid: point masses.
struct SpectralDensity {
  SpectralShape shape = SpectralShape::Lorentzian;
  double omega0 = 0.0;       // rad/ps, > 0
  double delta_omega = 0.0;  // rad/ps, > 0
  std::vector<double> tab_omega;   // TabulatedGrid only, strictly increasing
  std::vector<double> tab_weight;  // TabulatedGrid only, >= 0, sum 1
  bool narrowband_warning = false;  // omega0 < 100 delta_omega
};

SpectralDensity make_lorentzian(double omega0, double delta_omega);
SpectralDensity make_tabulated(double omega0, std::vector<double> omega,
                               std::vector<double> weight);

// Lorentzian density value at omega.
double lorentzian_pdf(const SpectralDensity& spec, double omega);

enum class GridScheme { UniformTruncated, Quantile };

struct GridSpec {
  GridScheme scheme = GridScheme::Quantile;
  std::size_t n_bins = 4096;
  double span_kappa = 100.0;  // UniformTruncated half-width in units of delta_omega
};

// Discrete frequency grid: strictly increasing nodes, nonnegative weights
// summing to 1 within 1e-12 (renormalized exactly at construction).
struct FrequencyGrid {
  double omega0 = 0.0;  // carrier reference for rotating-frame phases
  std::vector<double> omega;
  std::vector<double> weight;
  std::size_t size() const { return omega.size(); }
  // Largest spacing between adjacent nodes.
  double max_bin_width() const;
};

void validate_grid(const FrequencyGrid& grid);

// UniformTruncated: n_bins uniform cells over [omega0 - kappa dw, omega0 +
// kappa dw], node at cell center, weight proportional to the density there.
// Quantile: band-faithful graded cells (sinh-graded core, uniform bulk,
// geometric tail ladder with winsorized last cell), node at the exact mass
// centroid of its cell, weight the exact CDF mass. Preconditions: n_bins >=
// 64 for both schemes, kappa >= 10 for UniformTruncated.
FrequencyGrid discretize(const SpectralDensity& spec, const GridSpec& grid_spec);

// Ensemble coherence function C(t) = sum_i w_i exp(i (omega_i - omega0) t).
std::complex<double> coherence(const FrequencyGrid& grid, double t);
// Closed form for the continuum density.
std::complex<double> coherence(const SpectralDensity& spec, double t);

// 2 d * integral G(omega) |sin((omega - omega0) t)| domega; closed form for
// the Lorentzian (Fourier series of |sin| summed exactly), exact weighted sum
// for tabulated densities.
double quad_correlation_integral(const SpectralDensity& spec, double t, double d);

// CSV with header omega_rad_per_ps,weight and %.17g values.
void write_grid_csv(const std::string& path, const FrequencyGrid& grid);
FrequencyGrid read_grid_csv(const std::string& path, double omega0);

}  // namespace polfreq
