#include "polfreq/states.hpp"

#include <cmath>

#include "polfreq/errors.hpp"
#include "polfreq/numeric.hpp"

namespace polfreq {

namespace {

// Eigenvalues of a Hermitian 2x2 matrix: mean +- radius.
void hermitian_eigs(const Mat2& h, double& lo, double& hi) {
  double a = h(0, 0).real();
  double b = h(1, 1).real();
  double mean = 0.5 * (a + b);
  double radius = std::hypot(0.5 * (a - b), std::abs(h(0, 1)));
  lo = mean - radius;
  hi = mean + radius;
}

double hermiticity_defect(const Mat2& m) {
  double d = std::abs(m(0, 0).imag());
  d = std::max(d, std::abs(m(1, 1).imag()));
  d = std::max(d, std::abs(m(0, 1) - std::conj(m(1, 0))));
  return d;
}

}  // namespace

void validate_qubit_density(const Mat2& rho) {
  if (hermiticity_defect(rho) > 1e-12)
    throw InvalidParameter("qubit density: not Hermitian within 1e-12");
  double tr = rho(0, 0).real() + rho(1, 1).real();
  if (std::abs(tr - 1.0) > 1e-12)
    throw InvalidParameter("qubit density: trace differs from 1 by more than 1e-12");
  double lo, hi;
  hermitian_eigs(rho, lo, hi);
  if (lo < -1e-12)
    throw InvalidParameter("qubit density: negative eigenvalue below -1e-12");
  (void)hi;
}

void validate_joint_state(const JointBlockState& state) {
  validate_grid(state.grid);
  if (state.block.size() != state.grid.size())
    throw InvalidParameter("joint state: block count differs from grid size");
  for (const Mat2& b : state.block) {
    if (hermiticity_defect(b) > 1e-10)
      throw InvalidParameter("joint state: block not Hermitian within 1e-10");
    double tr = b(0, 0).real() + b(1, 1).real();
    if (std::abs(tr - 1.0) > 1e-10)
      throw InvalidParameter("joint state: block trace differs from 1 by more than 1e-10");
    double lo, hi;
    hermitian_eigs(b, lo, hi);
    if (lo < -1e-10)
      throw InvalidParameter("joint state: block eigenvalue below -1e-10");
    (void)hi;
  }
}

void require_same_grid(const JointBlockState& a, const JointBlockState& b) {
  if (a.grid.size() != b.grid.size())
    throw IncompatibleStates("states live on grids of different size");
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    if (a.grid.omega[i] != b.grid.omega[i] || a.grid.weight[i] != b.grid.weight[i])
      throw IncompatibleStates("states live on different grids");
}

Mat2 reduce_system(const JointBlockState& state) {
  CompensatedSum re00, re11, re01, im01;
  for (std::size_t i = 0; i < state.size(); ++i) {
    double w = state.grid.weight[i];
    const Mat2& b = state.block[i];
    re00.add(w * b(0, 0).real());
    re11.add(w * b(1, 1).real());
    re01.add(w * b(0, 1).real());
    im01.add(w * b(0, 1).imag());
  }
  Mat2 rho;
  rho(0, 0) = re00.value();
  rho(1, 1) = re11.value();
  rho(0, 1) = {re01.value(), im01.value()};
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

std::vector<double> reduce_environment(const JointBlockState& state) {
  std::vector<double> marginal(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const Mat2& b = state.block[i];
    marginal[i] = state.grid.weight[i] * (b(0, 0).real() + b(1, 1).real());
  }
  return marginal;
}

double trace_norm_2x2(const Mat2& h) {
  double lo, hi;
  hermitian_eigs(h, lo, hi);
  return std::abs(lo) + std::abs(hi);
}

double trace_distance_qubit(const Mat2& a, const Mat2& b) {
  return 0.5 * trace_norm_2x2(a - b);
}

double trace_distance_joint(const JointBlockState& a, const JointBlockState& b) {
  require_same_grid(a, b);
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc.add(a.grid.weight[i] * trace_norm_2x2(a.block[i] - b.block[i]));
  return 0.5 * acc.value();
}

EigenBasis qubit_eigenbasis(const Mat2& rho) {
  EigenBasis out;
  double lo, hi;
  hermitian_eigs(rho, lo, hi);
  out.lambda0 = hi;
  out.lambda1 = lo;

  if (hi - lo < 1e-10) {
    out.degenerate = true;
    out.v0 = Vec2(1.0, 0.0);
    out.v1 = Vec2(0.0, 1.0);
    return out;
  }

  std::complex<double> h01 = rho(0, 1);
  double a = rho(0, 0).real();
  double b = rho(1, 1).real();
  if (std::abs(h01) < 1e-14) {
    // Diagonal: order the computational basis by eigenvalue.
    if (a >= b) {
      out.v0 = Vec2(1.0, 0.0);
      out.v1 = Vec2(0.0, 1.0);
    } else {
      out.v0 = Vec2(0.0, 1.0);
      out.v1 = Vec2(1.0, 0.0);
    }
    return out;
  }

  // (h01, lambda - a) is an unnormalized eigenvector for either eigenvalue.
  Vec2 v0(h01, std::complex<double>(hi - a, 0.0));
  v0.normalize();
  Vec2 v1(-std::conj(v0(1)), std::conj(v0(0)));

  auto fix_phase = [](Vec2& v) {
    std::complex<double> lead =
        (std::abs(v(0)) > 1e-12) ? v(0) : v(1);
    v *= std::conj(lead) / std::abs(lead);
  };
  fix_phase(v0);
  fix_phase(v1);
  out.v0 = v0;
  out.v1 = v1;
  return out;
}

}  // namespace polfreq
