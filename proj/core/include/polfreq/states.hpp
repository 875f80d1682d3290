#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "polfreq/spectrum.hpp"

namespace polfreq {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

// Validates Hermiticity (1e-12), unit trace (1e-12) and eigenvalues
// >= -1e-12; throws InvalidParameter otherwise.
void validate_qubit_density(const Mat2& rho);

// Polarization-frequency state, block-diagonal in frequency: the joint state
// is sum_i w_i |omega_i><omega_i| (x) B_i with each conditional polarization
// block B_i Hermitian, PSD and unit-trace (within 1e-10).
struct JointBlockState {
  FrequencyGrid grid;
  std::vector<Mat2> block;
  std::size_t size() const { return block.size(); }
};

void validate_joint_state(const JointBlockState& state);

// Throws IncompatibleStates unless both states share the same grid (size and
// node values).
void require_same_grid(const JointBlockState& a, const JointBlockState& b);

// Reduced polarization state sum_i w_i B_i.
Mat2 reduce_system(const JointBlockState& state);

// Frequency marginal, entries w_i tr(B_i); sums to 1.
std::vector<double> reduce_environment(const JointBlockState& state);

// Trace norm sum |eig| of a Hermitian 2x2 matrix, closed form.
double trace_norm_2x2(const Mat2& h);

// Trace distance (1/2) sum |eig(a - b)|; 1 for orthogonal pure states.
double trace_distance_qubit(const Mat2& a, const Mat2& b);

// Joint trace distance (1/2) sum_i w_i ||A_i - B_i||_1 for block states on a
// common grid.
double trace_distance_joint(const JointBlockState& a, const JointBlockState& b);

// Eigendecomposition of a qubit density matrix with a fixed convention:
// eigenvalues descending, each eigenvector's first nonzero component made
// real positive. A near-degenerate spectrum (gap < 1e-10) falls back to the
// canonical computational basis and sets the flag.
struct EigenBasis {
  double lambda0 = 0.0;  // larger eigenvalue
  double lambda1 = 0.0;
  Vec2 v0, v1;
  bool degenerate = false;
};

EigenBasis qubit_eigenbasis(const Mat2& rho);

}  // namespace polfreq
