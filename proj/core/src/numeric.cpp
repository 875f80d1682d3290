#include "polfreq/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <thread>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"

namespace polfreq {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t n_threads = std::min<std::size_t>(std::max<std::size_t>(hw, 1), n);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

// QUADPACK dqk15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993945, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// One GK15 evaluation of h(u) = f(tan(pi u)) over [a, b].
Panel gk15(const std::function<double(double)>& f_of_x, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  auto eval = [&](double u) { return f_of_x(std::tan(kPi * u)); };
  double fv[15];
  fv[7] = eval(c);
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    fv[j] = eval(c - dx);
    fv[14 - j] = eval(c + dx);
  }
  double resk = kWgk[7] * fv[7];
  double resg = 0.0;
  for (int j = 0; j < 7; ++j) resk += kWgk[j] * (fv[j] + fv[14 - j]);
  for (int j = 0; j < 4; ++j) {
    int i = 2 * j + 1;  // Gauss nodes are the odd Kronrod nodes
    resg += kWg[j] * ((i == 7) ? fv[7] : fv[i] + fv[14 - i]);
  }
  double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
  resasc *= h;
  double err = std::abs(resk - resg) * h;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return Panel{a, b, resk * h, err};
}

}  // namespace

QuadResult adaptive_quad_lorentzian(const std::function<double(double)>& f_of_x,
                                    double abs_tol, double sup_f,
                                    std::span<const double> kink_x,
                                    std::size_t max_panels) {
  if (!(abs_tol >= 1e-12))
    throw InvalidParameter("adaptive quadrature: abs_tol must be >= 1e-12");
  if (!(sup_f > 0.0)) throw InvalidParameter("adaptive quadrature: sup_f must be > 0");

  // Rigorous edge truncation: |f| <= sup_f bounds the two strips at u = +-1/2.
  double strip = std::min(0.125, abs_tol / (4.0 * sup_f));
  double u_lo = -0.5 + strip;
  double u_hi = 0.5 - strip;
  double trunc_err = 2.0 * strip * sup_f;

  // Panel boundaries: mapped kinks inside the working interval, sorted.
  std::vector<double> cuts;
  cuts.push_back(u_lo);
  for (double xk : kink_x) {
    double u = std::atan(xk) / kPi;
    if (u > u_lo + 1e-15 && u < u_hi - 1e-15) cuts.push_back(u);
  }
  cuts.push_back(u_hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> queue;
  double total_value = 0.0;
  double total_error = 0.0;
  std::size_t evals = 0;
  std::size_t panels = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gk15(f_of_x, cuts[i], cuts[i + 1]);
    evals += 15;
    ++panels;
    total_value += p.value;
    total_error += p.error;
    queue.push(p);
  }

  double budget = abs_tol - trunc_err;
  while (total_error > budget && panels < max_panels && !queue.empty()) {
    Panel worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) continue;  // width at rounding floor
    Panel left = gk15(f_of_x, worst.a, mid);
    Panel right = gk15(f_of_x, mid, worst.b);
    evals += 30;
    panels += 2;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  QuadResult out{total_value, total_error + trunc_err, evals};
  if (out.error > abs_tol)
    throw NumericFailure("adaptive quadrature: panel budget exhausted", out.error);
  return out;
}

namespace {

void clamp_into(std::vector<double>& x, const std::vector<double>& lo,
                const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

double sq_norm(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Solve (A + lambda diag(A)) dx = g for small dense symmetric A by Gaussian
// elimination with partial pivoting; p is 2 or 3 here.
bool solve_damped(std::vector<double> A, std::vector<double> g, double lambda,
                  std::size_t p, std::vector<double>& dx) {
  for (std::size_t i = 0; i < p; ++i) {
    double d = A[i * p + i];
    A[i * p + i] = d + lambda * std::max(d, 1e-30);
  }
  std::vector<std::size_t> piv(p);
  for (std::size_t i = 0; i < p; ++i) piv[i] = i;
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t imax = k;
    for (std::size_t i = k + 1; i < p; ++i)
      if (std::abs(A[i * p + k]) > std::abs(A[imax * p + k])) imax = i;
    if (std::abs(A[imax * p + k]) < 1e-300) return false;
    if (imax != k) {
      for (std::size_t j = 0; j < p; ++j) std::swap(A[k * p + j], A[imax * p + j]);
      std::swap(g[k], g[imax]);
    }
    for (std::size_t i = k + 1; i < p; ++i) {
      double m = A[i * p + k] / A[k * p + k];
      for (std::size_t j = k; j < p; ++j) A[i * p + j] -= m * A[k * p + j];
      g[i] -= m * g[k];
    }
  }
  dx.assign(p, 0.0);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = g[ii];
    for (std::size_t j = ii + 1; j < p; ++j) s -= A[ii * p + j] * dx[j];
    dx[ii] = s / A[ii * p + ii];
  }
  return true;
}

}  // namespace

FitResult levenberg_fit(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& residual,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& jacobian,
    std::size_t n_residuals, std::vector<double> x,
    const std::vector<double>& lower, const std::vector<double>& upper,
    const FitOptions& opts) {
  const std::size_t p = x.size();
  clamp_into(x, lower, upper);

  std::vector<double> r(n_residuals), J(n_residuals * p);
  residual(x, r);
  double ssr = sq_norm(r);

  double lambda = 1e-3;
  FitResult out;
  out.params = x;
  out.ssr = ssr;

  std::vector<double> A(p * p), g(p), dx, x_try, r_try(n_residuals);
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    out.iterations = iter;
    jacobian(x, J);
    std::fill(A.begin(), A.end(), 0.0);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < n_residuals; ++i) {
      for (std::size_t a = 0; a < p; ++a) {
        g[a] -= J[i * p + a] * r[i];
        for (std::size_t b = a; b < p; ++b) A[a * p + b] += J[i * p + a] * J[i * p + b];
      }
    }
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < a; ++b) A[a * p + b] = A[b * p + a];

    // Active set: coordinates pinned at a bound with the descent direction
    // pointing outward are frozen, so a bound-riding optimum converges
    // instead of creeping along clamped full-space steps.
    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < p; ++a) {
      bool pinned = (x[a] <= lower[a] && g[a] < 0.0) || (x[a] >= upper[a] && g[a] > 0.0);
      if (!pinned) free.push_back(a);
    }

    double gmax = 0.0;
    for (std::size_t a : free) gmax = std::max(gmax, std::abs(g[a]));
    if (gmax <= opts.grad_tol * std::max(1.0, ssr) || free.empty()) {
      out.converged = true;
      break;
    }
    const std::size_t f = free.size();
    std::vector<double> Af(f * f), gf(f), dxf;
    for (std::size_t a = 0; a < f; ++a) {
      gf[a] = g[free[a]];
      for (std::size_t b = 0; b < f; ++b) Af[a * f + b] = A[free[a] * p + free[b]];
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      if (!solve_damped(Af, gf, lambda, f, dxf)) {
        lambda *= 10.0;
        continue;
      }
      dx.assign(p, 0.0);
      for (std::size_t a = 0; a < f; ++a) dx[free[a]] = dxf[a];
      x_try = x;
      for (std::size_t a = 0; a < p; ++a) x_try[a] += dx[a];
      clamp_into(x_try, lower, upper);
      residual(x_try, r_try);
      double ssr_try = sq_norm(r_try);
      if (ssr_try <= ssr) {
        double step = 0.0;
        for (std::size_t a = 0; a < p; ++a)
          step = std::max(step, std::abs(x_try[a] - x[a]) / std::max(1.0, std::abs(x[a])));
        bool ssr_stall = (ssr - ssr_try) <= 1e-15 * std::max(1.0, ssr);
        x = x_try;
        r = r_try;
        ssr = ssr_try;
        lambda = std::max(lambda * 0.25, 1e-14);
        stepped = true;
        if (step < opts.step_tol || ssr_stall) out.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    out.params = x;
    out.ssr = ssr;
    if (out.converged || !stepped) {
      if (!stepped && !out.converged) {
        // No descent direction left at the damping ceiling: stationary.
        out.converged = true;
      }
      break;
    }
  }
  out.params = x;
  out.ssr = ssr;

  // Covariance from the undamped normal matrix at the solution.
  if (n_residuals > p) {
    jacobian(x, J);
    std::fill(A.begin(), A.end(), 0.0);
    for (std::size_t i = 0; i < n_residuals; ++i)
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) A[a * p + b] += J[i * p + a] * J[i * p + b];
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < a; ++b) A[a * p + b] = A[b * p + a];
    double sigma2 = ssr / static_cast<double>(n_residuals - p);
    out.stderrs.assign(p, 0.0);
    // Invert by solving A e_k = cov column; reuse the damped solver at 0.
    for (std::size_t k = 0; k < p; ++k) {
      std::vector<double> ek(p, 0.0);
      ek[k] = 1.0;
      std::vector<double> col;
      if (solve_damped(A, ek, 0.0, p, col) && col[k] > 0.0)
        out.stderrs[k] = std::sqrt(sigma2 * col[k]);
    }
  }
  return out;
}

}  // namespace polfreq
