#include "polfreq/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"

namespace polfreq {

void validate_dense(const DenseJointState& state) {
  validate_grid(state.grid);
  const auto& rho = state.rho;
  std::size_t dim = 2 * state.n_bins();
  if (rho.rows() != static_cast<long>(dim) || rho.cols() != static_cast<long>(dim))
    throw InvalidParameter("dense state: dimension differs from 2 * n_bins");
  double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10)
    throw InvalidParameter("dense state: not Hermitian within 1e-10");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw InvalidParameter("dense state: trace differs from 1 by more than 1e-10");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho,
                                                         Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw InvalidParameter("dense state: eigenvalue below -1e-10");
}

DenseJointState dense_embed(const JointBlockState& state) {
  if (state.size() > 256)
    throw InvalidParameter("dense_embed: more than 256 bins");
  validate_joint_state(state);
  std::size_t n = state.size();
  DenseJointState dense;
  dense.grid = state.grid;
  dense.rho = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = state.grid.weight[i];
    const Mat2& b = state.block[i];
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        dense.rho(p * n + i, q * n + i) = w * b(p, q);
  }
  return dense;
}

JointBlockState dense_extract_blocks(const DenseJointState& state) {
  std::size_t n = state.n_bins();
  JointBlockState out;
  out.grid = state.grid;
  out.block.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = state.grid.weight[i];
    if (!(w > 0.0)) throw InvalidParameter("dense_extract_blocks: zero-weight bin");
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        out.block[i](p, q) = state.rho(p * n + i, q * n + i) / w;
  }
  return out;
}

Eigen::MatrixXcd dense_controlled_phase(const FrequencyGrid& grid,
                                        const BasisSpec& basis, double T,
                                        CarrierConvention convention) {
  validate_basis(basis);
  std::size_t n = grid.size();
  Mat2 r;
  r.col(0) = basis.u;
  r.col(1) = basis.u_perp();
  bool rotating = convention == CarrierConvention::RotatingFrame;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double raw = (rotating ? (grid.omega[i] - grid.omega0) : grid.omega[i]) * T;
    double theta = std::remainder(raw, kTwoPi);
    Mat2 d = Mat2::Identity();
    d(1, 1) = std::complex<double>(std::cos(theta), -std::sin(theta));
    Mat2 w = r * d * r.adjoint();
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        u(p * n + i, q * n + i) = w(p, q);
  }
  return u;
}

void dense_apply_unitary(DenseJointState& state, const Eigen::MatrixXcd& u) {
  if (u.rows() != state.rho.rows() || u.cols() != state.rho.cols())
    throw InvalidParameter("dense_apply_unitary: dimension mismatch");
  double defect =
      (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (defect > 1e-10)
    throw InvalidParameter("dense_apply_unitary: matrix not unitary within 1e-10");
  state.rho = u * state.rho * u.adjoint();
}

void dense_dephase(DenseJointState& state, const BasisSpec& basis) {
  validate_basis(basis);
  std::size_t n = state.n_bins();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  Mat2 proj = basis.u * basis.u.adjoint();
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) p(a * n + i, b * n + i) = proj(a, b);
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(2 * n, 2 * n) - p;
  state.rho = p * state.rho * p + q * state.rho * q;
}

Mat2 dense_reduce_system(const DenseJointState& state) {
  std::size_t n = state.n_bins();
  Mat2 rho = Mat2::Zero();
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (std::size_t i = 0; i < n; ++i) rho(p, q) += state.rho(p * n + i, q * n + i);
  return rho;
}

double dense_trace_distance(const DenseJointState& a, const DenseJointState& b) {
  if (a.rho.rows() != b.rho.rows())
    throw IncompatibleStates("dense states of different dimension");
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    if (a.grid.omega[i] != b.grid.omega[i])
      throw IncompatibleStates("dense states on different grids");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.rho - b.rho,
                                                         Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double dense_pairing_defect(const DenseJointState& a, const DenseJointState& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.rho - b.rho,
                                                         Eigen::EigenvaluesOnly);
  Eigen::VectorXd eigs = solver.eigenvalues();  // ascending
  double defect = 0.0;
  long dim = eigs.size();
  for (long i = 0; i < dim; ++i)
    defect = std::max(defect, std::abs(eigs(i) + eigs(dim - 1 - i)));
  return defect;
}

double max_block_commutator(const JointBlockState& state, const BasisSpec& basis) {
  validate_basis(basis);
  Mat2 proj = basis.u * basis.u.adjoint();
  double worst = 0.0;
  for (const Mat2& b : state.block) {
    Mat2 comm = b * proj - proj * b;
    worst = std::max(worst, comm.cwiseAbs().maxCoeff());
  }
  return worst;
}

QuadResult adaptive_quad(const std::function<double(double)>& f_of_omega,
                         const SpectralDensity& spec, double abs_tol, double sup_f,
                         std::span<const double> kink_omega) {
  if (spec.shape == SpectralShape::TabulatedGrid) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < spec.tab_omega.size(); ++i)
      acc.add(spec.tab_weight[i] * f_of_omega(spec.tab_omega[i]));
    return QuadResult{acc.value(), 0.0, spec.tab_omega.size()};
  }
  auto f_scaled = [&](double x) {
    return f_of_omega(spec.omega0 + spec.delta_omega * x);
  };
  std::vector<double> kinks_scaled;
  kinks_scaled.reserve(kink_omega.size());
  for (double w : kink_omega)
    kinks_scaled.push_back((w - spec.omega0) / spec.delta_omega);
  return adaptive_quad_lorentzian(f_scaled, abs_tol, sup_f, kinks_scaled, 500000);
}

}  // namespace polfreq
