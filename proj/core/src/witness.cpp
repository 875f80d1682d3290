#include "polfreq/witness.hpp"

#include <algorithm>
#include <cmath>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/numeric.hpp"
#include "polfreq/tomography.hpp"

namespace polfreq {

void validate_sweep(const DelaySweep& sweep) {
  if (sweep.eta.empty() || sweep.tau.empty())
    throw InvalidParameter("sweep: eta and tau must be nonempty");
  for (double e : sweep.eta)
    if (!(e >= 0.0 && e < kPi))
      throw InvalidParameter("sweep: eta must lie in [0, pi)");
  for (double t : sweep.tau)
    if (!std::isfinite(t)) throw InvalidParameter("sweep: tau must be finite");
  for (std::size_t i = 0; i + 1 < sweep.tau.size(); ++i)
    if (!(sweep.tau[i] <= sweep.tau[i + 1]))
      throw InvalidParameter("sweep: tau must be sorted ascending");
}

std::vector<double> protocol_etas() {
  std::vector<double> etas(8);
  for (int m = 0; m < 8; ++m) etas[m] = static_cast<double>(m) * kPi / 16.0;
  return etas;
}

std::vector<double> coarse_taus(double delta_omega) {
  if (!(delta_omega > 0.0)) throw InvalidParameter("coarse_taus: delta_omega must be > 0");
  std::vector<double> taus(24);
  for (int n = 0; n < 24; ++n)
    taus[n] = static_cast<double>(n - 12) / (2.0 * delta_omega);
  return taus;
}

std::vector<double> dense_taus(double delta_omega, std::size_t n, double span) {
  if (!(delta_omega > 0.0)) throw InvalidParameter("dense_taus: delta_omega must be > 0");
  if (n < 2) throw InvalidParameter("dense_taus: need at least two points");
  std::vector<double> taus(n);
  double lo = -span / delta_omega, hi = span / delta_omega;
  for (std::size_t i = 0; i < n; ++i)
    taus[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return taus;
}

DelaySweep coarse_sweep(double delta_omega) {
  return DelaySweep{protocol_etas(), coarse_taus(delta_omega)};
}

DelaySweep dense_sweep(double delta_omega, std::size_t n, double span) {
  return DelaySweep{{0.0}, dense_taus(delta_omega, n, span)};
}

double delay_to_displacement_mm(double tau_ps) {
  return 0.5 * kSpeedOfLight_mm_per_ps * tau_ps;
}

void validate_curve(const WitnessCurve& curve) {
  validate_sweep(DelaySweep{curve.eta, curve.tau});
  if (curve.value.size() != curve.eta.size() * curve.tau.size())
    throw InvalidParameter("curve: value count differs from sweep size");
  for (double v : curve.value)
    if (!(v >= 0.0 && v <= 1.0 + 1e-12))
      throw InvalidParameter("curve: witness value outside [0, 1]");
}

AliceState prepare_alice_state(const PreparationParams& params,
                               const FrequencyGrid& grid, std::uint64_t seed,
                               RotationMode mode) {
  AliceState alice;
  alice.params = params;
  alice.state = prepare_pre_initial(params, grid);
  apply_controlled_phase_inplace(alice.state, basis_hv(), params.t_ps,
                                 CarrierConvention::RotatingFrame);
  alice.rotation = random_rotation(alice.state, seed, mode);
  return alice;
}

Reference build_reference(const JointBlockState& state, const ReferenceOptions& opts) {
  Reference ref;
  ref.mode = opts.mode;
  ref.dephasing = opts.dephasing;

  Mat2 marginal = reduce_system(state);
  if (opts.mode == ReferenceMode::Tomographic) {
    CountRecord counts = simulate_counts(marginal, opts.tomo_shots, opts.tomo_seed);
    ref.marginal_estimate = reconstruct(counts);
  } else {
    ref.marginal_estimate = marginal;
  }

  ref.eigen = qubit_eigenbasis(ref.marginal_estimate);
  ref.degenerate = ref.eigen.degenerate;
  ref.basis = basis_custom(ref.eigen.v0);

  if (opts.dephasing == DephasingMode::Fiber) {
    ref.state = dephase_fiber(state, ref.basis, opts.fiber_s_ps);
  } else {
    ref.state = dephase_exact(state, ref.basis);
  }
  return ref;
}

namespace {

// Per-eta precomputation: both states rotated into the eta basis; the
// controlled phase is then diagonal, so the reduced difference has constant
// diagonal and an off-diagonal sum_i c_i e^{i theta_i(tau)}.
struct EtaWorkspace {
  double diag00 = 0.0;
  double diag11 = 0.0;
  std::vector<std::complex<double>> coeff;  // w_i (A01 - B01) in basis
  std::vector<double> rate;                 // theta_i per unit tau
};

EtaWorkspace make_workspace(const JointBlockState& a, const JointBlockState& b,
                            const BasisSpec& basis, CarrierConvention convention) {
  Mat2 r;
  r.col(0) = basis.u;
  r.col(1) = basis.u_perp();
  Mat2 r_adj = r.adjoint();

  EtaWorkspace ws;
  std::size_t n = a.size();
  ws.coeff.resize(n);
  ws.rate.resize(n);
  CompensatedSum d00, d11;
  bool rotating = convention == CarrierConvention::RotatingFrame;
  for (std::size_t i = 0; i < n; ++i) {
    Mat2 da = r_adj * (a.block[i] - b.block[i]) * r;
    double w = a.grid.weight[i];
    d00.add(w * da(0, 0).real());
    d11.add(w * da(1, 1).real());
    ws.coeff[i] = w * da(0, 1);
    ws.rate[i] = rotating ? (a.grid.omega[i] - a.grid.omega0) : a.grid.omega[i];
  }
  ws.diag00 = d00.value();
  ws.diag11 = d11.value();
  return ws;
}

double distance_at(const EtaWorkspace& ws, double tau) {
  double re = 0.0, im = 0.0;
  std::size_t n = ws.coeff.size();
  for (std::size_t i = 0; i < n; ++i) {
    double theta = std::remainder(ws.rate[i] * tau, kTwoPi);
    double c = std::cos(theta), s = std::sin(theta);
    const std::complex<double>& z = ws.coeff[i];
    re += z.real() * c - z.imag() * s;
    im += z.real() * s + z.imag() * c;
  }
  // Trace norm of [[d00, S], [conj S, d11]] with d00, d11 real.
  double mean = 0.5 * (ws.diag00 + ws.diag11);
  double radius = std::hypot(0.5 * (ws.diag00 - ws.diag11), std::hypot(re, im));
  return std::abs(mean + radius) + std::abs(mean - radius);
}

}  // namespace

WitnessCurve local_distance_curve(const JointBlockState& state, const Reference& ref,
                                  const DelaySweep& sweep,
                                  CarrierConvention convention) {
  validate_sweep(sweep);
  require_same_grid(state, ref.state);

  WitnessCurve curve;
  curve.eta = sweep.eta;
  curve.tau = sweep.tau;
  curve.value.assign(sweep.eta.size() * sweep.tau.size(), 0.0);
  curve.degenerate_basis = ref.degenerate;
  curve.dephasing = ref.dephasing == DephasingMode::Fiber ? "fiber" : "projective";
  curve.reference_mode =
      ref.mode == ReferenceMode::Tomographic ? "tomographic" : "exact";

  std::size_t n_tau = sweep.tau.size();
  for (std::size_t ie = 0; ie < sweep.eta.size(); ++ie) {
    EtaWorkspace ws =
        make_workspace(state, ref.state, basis_eta(sweep.eta[ie]), convention);
    double* row = &curve.value[ie * n_tau];
    parallel_for(n_tau, [&](std::size_t it) {
      row[it] = distance_at(ws, sweep.tau[it]);
    });
  }
  validate_curve(curve);
  return curve;
}

double local_distance_single(const JointBlockState& state, const Reference& ref,
                             const BasisSpec& basis, double tau,
                             CarrierConvention convention) {
  require_same_grid(state, ref.state);
  JointBlockState a = apply_controlled_phase(state, basis, tau, convention);
  JointBlockState b = apply_controlled_phase(ref.state, basis, tau, convention);
  return trace_norm_2x2(reduce_system(a) - reduce_system(b));
}

WitnessMax witness_max(const WitnessCurve& curve, double delta_omega,
                       MaxMethod method) {
  validate_curve(curve);
  if (!(delta_omega > 0.0))
    throw InvalidParameter("witness_max: delta_omega must be > 0");

  WitnessMax out;
  out.method = method;

  double grid_max = 0.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < curve.value.size(); ++k) {
    if (curve.value[k] > grid_max) {
      grid_max = curve.value[k];
      arg = k;
    }
  }

  if (grid_max <= 1e-14) {
    out.zero_curve = true;
    out.value = 0.0;
    out.fit.converged = true;
    return out;
  }

  if (method == MaxMethod::GridMax) {
    out.value = grid_max;
    return out;
  }

  // Fit d |e^{-dw|t+tau|} - e^{-dw|t-tau|}| over all points of the sweep.
  std::size_t n_tau = curve.tau.size();
  std::size_t n_pts = curve.value.size();
  auto tau_of = [&](std::size_t k) { return curve.tau[k % n_tau]; };

  double t_init = std::max(std::abs(tau_of(arg)), 1.0 / delta_omega * 0.1);
  double denom = -std::expm1(-2.0 * delta_omega * t_init);
  double d_init = std::clamp(denom > 1e-12 ? grid_max / denom : 0.5, 0.0, 0.5);

  auto model = [&](double d, double t, double tau) {
    return d * std::abs(std::exp(-delta_omega * std::abs(t + tau)) -
                        std::exp(-delta_omega * std::abs(t - tau)));
  };
  auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
    for (std::size_t k = 0; k < n_pts; ++k)
      r[k] = model(p[0], p[1], tau_of(k)) - curve.value[k];
  };
  auto jacobian = [&](const std::vector<double>& p, std::vector<double>& J) {
    double d = p[0], t = p[1];
    for (std::size_t k = 0; k < n_pts; ++k) {
      double tau = tau_of(k);
      double e1 = std::exp(-delta_omega * std::abs(t + tau));
      double e2 = std::exp(-delta_omega * std::abs(t - tau));
      double diff = e1 - e2;
      double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      auto sign_of = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
      J[k * 2 + 0] = std::abs(diff);
      J[k * 2 + 1] = d * sgn * delta_omega * (-sign_of(t + tau) * e1 + sign_of(t - tau) * e2);
    }
  };

  FitResult fit = levenberg_fit(residual, jacobian, n_pts, {d_init, t_init},
                                {0.0, 0.0}, {0.5, 1e12});
  out.fit.converged = fit.converged;
  out.fit.d_hat = fit.params[0];
  out.fit.t_hat = fit.params[1];
  out.fit.residual_rms = std::sqrt(fit.ssr / static_cast<double>(n_pts));

  if (!fit.converged) {
    out.fit.used_fallback = true;
    out.value = grid_max;
    return out;
  }
  out.value = out.fit.d_hat * (-std::expm1(-2.0 * delta_omega * out.fit.t_hat));
  return out;
}

double delta_total(const JointBlockState& state, const JointBlockState& reference) {
  return 2.0 * trace_distance_joint(state, reference);
}

double analytic_Delta_lorentzian(double d, double delta_omega, double t, double tau) {
  if (!(d >= 0.0 && d <= 0.5))
    throw InvalidParameter("analytic_Delta_lorentzian: d must lie in [0, 1/2]");
  if (!(delta_omega > 0.0))
    throw InvalidParameter("analytic_Delta_lorentzian: delta_omega must be > 0");
  return d * std::abs(std::exp(-delta_omega * std::abs(t + tau)) -
                      std::exp(-delta_omega * std::abs(t - tau)));
}

double analytic_max_lorentzian(double d, double delta_omega, double t) {
  if (!(d >= 0.0 && d <= 0.5))
    throw InvalidParameter("analytic_max_lorentzian: d must lie in [0, 1/2]");
  if (!(delta_omega > 0.0))
    throw InvalidParameter("analytic_max_lorentzian: delta_omega must be > 0");
  return d * (-std::expm1(-2.0 * delta_omega * std::abs(t)));
}

double analytic_Delta_general(const SpectralDensity& spec, double d, double t,
                              double tau) {
  if (!(d >= 0.0 && d <= 0.5))
    throw InvalidParameter("analytic_Delta_general: d must lie in [0, 1/2]");
  std::complex<double> c_plus = coherence(spec, t + tau);
  std::complex<double> c_minus = coherence(spec, t - tau);
  return d * std::abs(c_plus - c_minus);
}

}  // namespace polfreq
