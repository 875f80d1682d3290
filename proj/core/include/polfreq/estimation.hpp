#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polfreq {

// Interferometric visibility versus mirror displacement x (mm). sigma is the
// per-point noise level used at synthesis (0 when unknown); visibilities lie
// in [0, 1 + 3 sigma].
struct VisibilityTrace {
  std::vector<double> x_mm;
  std::vector<double> vis;
  double sigma = 0.0;
};

void validate_trace(const VisibilityTrace& trace);

// Model trace exp(-delta_omega |2 (x - x0)/c|) plus Gaussian noise of width
// sigma, clipped at 0; deterministic in seed. x0 is the envelope center.
VisibilityTrace synthesize_visibility(double delta_omega, std::span<const double> x_mm,
                                      double sigma, std::uint64_t seed,
                                      double x0_mm = 0.0);

struct LinewidthFit {
  double coherence_time_ps = 0.0;  // 1 / delta_omega estimate
  double stderr_ps = 0.0;          // from the fit covariance
  double delta_omega = 0.0;
  double x0_mm = 0.0;
  double amplitude = 0.0;
  double ssr = 0.0;
};

// Nonlinear least squares of A exp(-delta_omega * 2|x - x0|/c) with A <= 1.
// Requires at least 8 samples spanning at least two decay constants; throws
// FitFailure on insufficient span, a constant trace, or non-convergence.
LinewidthFit fit_linewidth(const VisibilityTrace& trace);

// Differential group delay geometry: a birefringent element of length L
// shifts the envelope center by x_shift = L * delta_n / 2, so delta_n =
// 2 x_shift / L. L <= 0 throws InvalidParameter.
double estimate_birefringence(double x_shift_mm, double L_mm);
double birefringence_shift(double L_mm, double delta_n);

// CSV with header x_mm,visibility[,sigma].
void write_trace_csv(const std::string& path, const VisibilityTrace& trace);
VisibilityTrace read_trace_csv(const std::string& path);

}  // namespace polfreq
