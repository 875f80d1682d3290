#include "polfreq/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/numeric.hpp"
#include "polfreq/rng.hpp"

namespace polfreq {

void validate_trace(const VisibilityTrace& trace) {
  if (trace.x_mm.size() != trace.vis.size())
    throw InvalidParameter("trace: x/vis size mismatch");
  if (trace.sigma < 0.0) throw InvalidParameter("trace: sigma must be >= 0");
  double cap = 1.0 + 3.0 * trace.sigma;
  for (double v : trace.vis)
    if (!(v >= 0.0 && v <= cap))
      throw InvalidParameter("trace: visibility outside [0, 1 + 3 sigma]");
}

VisibilityTrace synthesize_visibility(double delta_omega, std::span<const double> x_mm,
                                      double sigma, std::uint64_t seed, double x0_mm) {
  if (!(delta_omega > 0.0))
    throw InvalidParameter("synthesize_visibility: delta_omega must be > 0");
  if (sigma < 0.0) throw InvalidParameter("synthesize_visibility: sigma must be >= 0");
  VisibilityTrace trace;
  trace.sigma = sigma;
  trace.x_mm.assign(x_mm.begin(), x_mm.end());
  trace.vis.resize(x_mm.size());
  Rng rng(seed);
  double cap = 1.0 + 3.0 * sigma;
  for (std::size_t i = 0; i < x_mm.size(); ++i) {
    double delay = 2.0 * std::abs(x_mm[i] - x0_mm) / kSpeedOfLight_mm_per_ps;
    double v = std::exp(-delta_omega * delay);
    if (sigma > 0.0) v += sigma * rng.normal();
    trace.vis[i] = std::clamp(v, 0.0, cap);
  }
  return trace;
}

LinewidthFit fit_linewidth(const VisibilityTrace& trace) {
  validate_trace(trace);
  std::size_t n = trace.x_mm.size();
  if (n < 8) throw FitFailure("fit_linewidth: need at least 8 samples");

  double vmax = *std::max_element(trace.vis.begin(), trace.vis.end());
  double vmin = *std::min_element(trace.vis.begin(), trace.vis.end());
  if (vmax <= 0.0 || vmax - vmin < 1e-12)
    throw FitFailure("fit_linewidth: constant trace carries no decay information");

  std::size_t i_peak = static_cast<std::size_t>(
      std::max_element(trace.vis.begin(), trace.vis.end()) - trace.vis.begin());
  double x0_init = trace.x_mm[i_peak];
  double a_init = std::min(1.0, vmax);

  // Log-linear slope over clearly-above-noise points seeds the decay rate.
  double floor_level = std::max(0.05 * a_init, 2.0 * trace.sigma);
  double sT = 0.0, sL = 0.0, sTT = 0.0, sTL = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (trace.vis[i] <= floor_level) continue;
    double T = 2.0 * std::abs(trace.x_mm[i] - x0_init) / kSpeedOfLight_mm_per_ps;
    double L = std::log(trace.vis[i]);
    sT += T;
    sL += L;
    sTT += T * T;
    sTL += T * L;
    ++used;
  }
  double denom = static_cast<double>(used) * sTT - sT * sT;
  double slope = (used >= 2 && denom > 0.0)
                     ? (static_cast<double>(used) * sTL - sT * sL) / denom
                     : 0.0;
  if (!(slope < 0.0)) throw FitFailure("fit_linewidth: trace does not decay");
  double rate_init = -slope;

  auto delay_of = [&](double x, double x0) {
    return 2.0 * std::abs(x - x0) / kSpeedOfLight_mm_per_ps;
  };
  auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
    for (std::size_t i = 0; i < n; ++i)
      r[i] = p[2] * std::exp(-p[0] * delay_of(trace.x_mm[i], p[1])) - trace.vis[i];
  };
  auto jacobian = [&](const std::vector<double>& p, std::vector<double>& J) {
    for (std::size_t i = 0; i < n; ++i) {
      double T = delay_of(trace.x_mm[i], p[1]);
      double e = std::exp(-p[0] * T);
      double sign = (trace.x_mm[i] > p[1]) ? 1.0 : (trace.x_mm[i] < p[1] ? -1.0 : 0.0);
      J[i * 3 + 0] = -p[2] * T * e;
      J[i * 3 + 1] = p[2] * p[0] * e * sign * 2.0 / kSpeedOfLight_mm_per_ps;
      J[i * 3 + 2] = e;
    }
  };

  double x_lo = *std::min_element(trace.x_mm.begin(), trace.x_mm.end());
  double x_hi = *std::max_element(trace.x_mm.begin(), trace.x_mm.end());
  double span_margin = x_hi - x_lo;
  FitResult fit = levenberg_fit(
      residual, jacobian, n, {rate_init, x0_init, a_init},
      {1e-12, x_lo - span_margin, 1e-6}, {1e12, x_hi + span_margin, 1.0});
  if (!fit.converged)
    throw FitFailure("fit_linewidth: nonlinear fit did not converge");

  double rate = fit.params[0];
  double x0 = fit.params[1];
  double t_max = 0.0;
  for (double x : trace.x_mm) t_max = std::max(t_max, delay_of(x, x0));
  if (t_max * rate < 2.0)
    throw FitFailure("fit_linewidth: samples span fewer than two decay constants");

  LinewidthFit out;
  out.delta_omega = rate;
  out.x0_mm = x0;
  out.amplitude = fit.params[2];
  out.ssr = fit.ssr;
  out.coherence_time_ps = 1.0 / rate;
  out.stderr_ps = fit.stderrs.empty() ? 0.0 : fit.stderrs[0] / (rate * rate);
  return out;
}

double estimate_birefringence(double x_shift_mm, double L_mm) {
  if (!(L_mm > 0.0)) throw InvalidParameter("estimate_birefringence: L must be > 0");
  return 2.0 * x_shift_mm / L_mm;
}

double birefringence_shift(double L_mm, double delta_n) {
  return 0.5 * L_mm * delta_n;
}

void write_trace_csv(const std::string& path, const VisibilityTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("write_trace_csv: cannot open " + path);
  bool with_sigma = trace.sigma > 0.0;
  out << (with_sigma ? "x_mm,visibility,sigma\n" : "x_mm,visibility\n");
  char buf[64];
  for (std::size_t i = 0; i < trace.x_mm.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", trace.x_mm[i]);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", trace.vis[i]);
    out << buf;
    if (with_sigma) {
      std::snprintf(buf, sizeof buf, "%.17g", trace.sigma);
      out << ',' << buf;
    }
    out << '\n';
  }
}

VisibilityTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error("read_trace_csv: empty file " + path);
  bool with_sigma;
  if (line == "x_mm,visibility") {
    with_sigma = false;
  } else if (line == "x_mm,visibility,sigma") {
    with_sigma = true;
  } else {
    throw Error("read_trace_csv: bad header in " + path);
  }
  VisibilityTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    if (c1 == std::string::npos) throw Error("read_trace_csv: bad row in " + path);
    trace.x_mm.push_back(std::stod(line.substr(0, c1)));
    std::string rest = line.substr(c1 + 1);
    if (with_sigma) {
      std::size_t c2 = rest.find(',');
      if (c2 == std::string::npos) throw Error("read_trace_csv: bad row in " + path);
      trace.vis.push_back(std::stod(rest.substr(0, c2)));
      trace.sigma = std::stod(rest.substr(c2 + 1));
    } else {
      trace.vis.push_back(std::stod(rest));
    }
  }
  validate_trace(trace);
  return trace;
}

}  // namespace polfreq
