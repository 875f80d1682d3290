#include "polfreq/channels.hpp"

#include <cmath>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/rng.hpp"

namespace polfreq {

PreparationParams make_preparation(double d, double L_mm, double delta_n) {
  PreparationParams params;
  params.d = d;
  params.L_mm = L_mm;
  params.delta_n = delta_n;
  params.t_ps = L_mm * delta_n / kSpeedOfLight_mm_per_ps;
  validate_preparation(params);
  return params;
}

PreparationParams make_preparation_delay(double d, double t_ps, double L_mm,
                                         double delta_n) {
  PreparationParams params;
  params.d = d;
  params.t_ps = t_ps;
  params.L_mm = L_mm;
  params.delta_n = delta_n;
  validate_preparation(params);
  return params;
}

void validate_preparation(const PreparationParams& params) {
  if (!(params.d >= 0.0 && params.d <= 0.5))
    throw InvalidParameter("preparation: d must lie in [0, 1/2]");
  if (!(params.t_ps >= 0.0) || !std::isfinite(params.t_ps))
    throw InvalidParameter("preparation: t must be finite and >= 0");
  if (params.L_mm < 0.0 || params.delta_n < 0.0)
    throw InvalidParameter("preparation: L and delta_n must be >= 0");
  if (params.L_mm > 0.0 && params.delta_n > 0.0) {
    double t_geo = params.L_mm * params.delta_n / kSpeedOfLight_mm_per_ps;
    if (std::abs(params.t_ps - t_geo) > 1e-9)
      throw InvalidParameter(
          "preparation: t inconsistent with L * delta_n / c beyond 1e-9 ps");
  }
}

BasisSpec basis_hv() { return BasisSpec{}; }

BasisSpec basis_eta(double eta) {
  BasisSpec basis;
  basis.label = BasisSpec::Label::Eta;
  basis.eta = eta;
  basis.u = Vec2(std::cos(eta), std::sin(eta));
  return basis;
}

BasisSpec basis_custom(const Vec2& u) {
  BasisSpec basis;
  basis.label = BasisSpec::Label::Custom;
  basis.u = u;
  validate_basis(basis);
  return basis;
}

void validate_basis(const BasisSpec& basis) {
  if (std::abs(basis.u.norm() - 1.0) > 1e-12)
    throw InvalidParameter("basis: vector must be normalized within 1e-12");
}

const char* to_string(RotationMode mode) {
  switch (mode) {
    case RotationMode::Haar: return "haar";
    case RotationMode::HalfWavePlate: return "half_wave_plate";
    case RotationMode::Identity: return "identity";
  }
  return "unknown";
}

void validate_rotation(const RotationRecord& record) {
  Mat2 defect = record.U.adjoint() * record.U - Mat2::Identity();
  if (defect.cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidParameter("rotation: matrix not unitary within 1e-12");
}

JointBlockState prepare_pre_initial(const PreparationParams& params,
                                    const FrequencyGrid& grid) {
  validate_preparation(params);
  validate_grid(grid);
  std::complex<double> off =
      params.d * std::exp(std::complex<double>(0.0, params.phi));
  Mat2 block;
  block(0, 0) = 0.5;
  block(1, 1) = 0.5;
  block(0, 1) = off;
  block(1, 0) = std::conj(off);
  JointBlockState state;
  state.grid = grid;
  state.block.assign(grid.size(), block);
  return state;
}

namespace {

// B -> W B W^dag with W = R diag(1, e^{-i theta}) R^dag, R = [u, u_perp]:
// rotate into the basis, phase the off-diagonal, rotate back.
inline void controlled_phase_block(Mat2& b, const Mat2& r, const Mat2& r_adj,
                                   double theta, bool hv_fast_path) {
  std::complex<double> phase(std::cos(theta), std::sin(theta));  // e^{+i theta}
  if (hv_fast_path) {
    b(0, 1) *= phase;
    b(1, 0) = std::conj(b(0, 1));
    return;
  }
  Mat2 bb = r_adj * b * r;
  bb(0, 1) *= phase;
  bb(1, 0) = std::conj(bb(0, 1));
  b = r * bb * r_adj;
}

Mat2 basis_matrix(const BasisSpec& basis) {
  Mat2 r;
  r.col(0) = basis.u;
  r.col(1) = basis.u_perp();
  return r;
}

}  // namespace

void apply_controlled_phase_inplace(JointBlockState& state, const BasisSpec& basis,
                                    double T, CarrierConvention convention) {
  validate_basis(basis);
  bool hv = basis.label == BasisSpec::Label::HV;
  Mat2 r = basis_matrix(basis);
  Mat2 r_adj = r.adjoint();
  bool rotating = convention == CarrierConvention::RotatingFrame;
  for (std::size_t i = 0; i < state.size(); ++i) {
    double omega = state.grid.omega[i];
    double raw = (rotating ? (omega - state.grid.omega0) : omega) * T;
    double theta = std::remainder(raw, kTwoPi);
    controlled_phase_block(state.block[i], r, r_adj, theta, hv);
  }
}

JointBlockState apply_controlled_phase(const JointBlockState& state,
                                       const BasisSpec& basis, double T,
                                       CarrierConvention convention) {
  JointBlockState out = state;
  apply_controlled_phase_inplace(out, basis, T, convention);
  return out;
}

JointBlockState dephase_exact(const JointBlockState& state, const BasisSpec& basis) {
  validate_basis(basis);
  bool hv = basis.label == BasisSpec::Label::HV;
  Mat2 r = basis_matrix(basis);
  Mat2 r_adj = r.adjoint();
  JointBlockState out = state;
  for (Mat2& b : out.block) {
    if (hv) {
      b(0, 1) = 0.0;
      b(1, 0) = 0.0;
      continue;
    }
    Mat2 bb = r_adj * b * r;
    bb(0, 1) = 0.0;
    bb(1, 0) = 0.0;
    b = r * bb * r_adj;
  }
  return out;
}

JointBlockState dephase_fiber(const JointBlockState& state, const BasisSpec& basis,
                              double s_ps) {
  double width = state.grid.max_bin_width();
  double needed = 0.2 / std::max(std::abs(s_ps), 1e-300);
  if (width * std::abs(s_ps) > 0.2)
    throw GridResolutionError(
        "dephase_fiber: grid too coarse for fiber delay; largest bin width is " +
            std::to_string(width) + " rad/ps but at most " + std::to_string(needed) +
            " rad/ps is resolvable",
        needed);
  return apply_controlled_phase(state, basis, s_ps, CarrierConvention::FullCarrier);
}

void apply_unitary_inplace(JointBlockState& state, const Mat2& u) {
  Mat2 u_adj = u.adjoint();
  for (Mat2& b : state.block) b = u * b * u_adj;
}

RotationRecord draw_rotation(std::uint64_t seed, RotationMode mode) {
  RotationRecord record;
  record.seed = seed;
  record.mode = mode;
  switch (mode) {
    case RotationMode::Identity:
      record.U = Mat2::Identity();
      break;
    case RotationMode::HalfWavePlate: {
      Rng rng(seed);
      double theta = kPi * rng.uniform01();
      double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
      record.U << c, s, s, -c;
      break;
    }
    case RotationMode::Haar: {
      // Gram-Schmidt of a complex Ginibre pair; positive-diagonal R makes the
      // Q factor Haar distributed.
      Rng rng(seed);
      Vec2 g0, g1;
      g0(0) = {rng.normal(), rng.normal()};
      g0(1) = {rng.normal(), rng.normal()};
      g1(0) = {rng.normal(), rng.normal()};
      g1(1) = {rng.normal(), rng.normal()};
      Vec2 u = g0.normalized();
      Vec2 w = g1 - u * (u.adjoint() * g1)(0);
      Vec2 v = w.normalized();
      record.U.col(0) = u;
      record.U.col(1) = v;
      break;
    }
  }
  validate_rotation(record);
  return record;
}

RotationRecord random_rotation(JointBlockState& state, std::uint64_t seed,
                               RotationMode mode) {
  RotationRecord record = draw_rotation(seed, mode);
  apply_unitary_inplace(state, record.U);
  return record;
}

}  // namespace polfreq
