#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace polfreq {

// Neumaier compensated accumulator; keeps weight sums exact to one rounding.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

// Deterministic parallel map: index-addressed work, contiguous chunks, result
// independent of thread count and scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;       // rigorous-estimate bound actually achieved
  std::size_t evals = 0;
};

// Adaptive Gauss-Kronrod 15 integration of f against the unit Lorentzian
// density g(x) = (1/pi)/(1+x^2) on the whole line, in the tangent-mapped
// variable u with x = tan(pi u), u in (-1/2, 1/2), where g(x) dx = du.
//
// sup_f bounds |f| and makes the edge-strip truncation rigorous: the two
// strips adjacent to u = +-1/2 of total measure <= abs_tol/(2 sup_f) are
// bounded, not sampled. kink_x lists x-locations forced to be panel
// boundaries (integrand kinks). Throws NumericFailure when the panel budget
// is exhausted before the estimate reaches abs_tol.
QuadResult adaptive_quad_lorentzian(const std::function<double(double)>& f_of_x,
                                    double abs_tol, double sup_f,
                                    std::span<const double> kink_x,
                                    std::size_t max_panels = 200000);

struct FitOptions {
  int max_iter = 200;
  double step_tol = 1e-13;   // relative parameter step
  double grad_tol = 1e-14;   // gradient infinity norm scale
};

struct FitResult {
  std::vector<double> params;
  std::vector<double> stderrs;  // sqrt of covariance diagonal, sigma^2 = ssr/(n-p)
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Levenberg-style damped least squares with box projection. residual fills
// r (size n); jacobian fills row-major J (size n*p). Both are evaluated at
// feasible points only.
FitResult levenberg_fit(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& jacobian,
    std::size_t n_residuals, std::vector<double> x0,
    const std::vector<double>& lower, const std::vector<double>& upper,
    const FitOptions& opts = {});

}  // namespace polfreq
