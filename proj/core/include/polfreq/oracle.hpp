#pragma once

#include <functional>

#include "polfreq/channels.hpp"
#include "polfreq/numeric.hpp"
#include "polfreq/states.hpp"
#include "polfreq/witness.hpp"

namespace polfreq {

// Full 2N x 2N density matrix in the polarization-major product basis
// {|H,w_1>..|H,w_N>, |V,w_1>..|V,w_N>}; independent arithmetic path used to
// certify the block representation.
struct DenseJointState {
  FrequencyGrid grid;
  Eigen::MatrixXcd rho;
  std::size_t n_bins() const { return grid.size(); }
};

void validate_dense(const DenseJointState& state);  // Hermitian, PSD >= -1e-10, trace 1e-10

// Embeds a block state; N <= 256 guard. Round-trips exactly on block-diagonal
// input.
DenseJointState dense_embed(const JointBlockState& state);
JointBlockState dense_extract_blocks(const DenseJointState& state);

// The controlled-phase unitary as a dense matrix.
Eigen::MatrixXcd dense_controlled_phase(const FrequencyGrid& grid,
                                        const BasisSpec& basis, double T,
                                        CarrierConvention convention =
                                            CarrierConvention::RotatingFrame);

// rho -> U rho U^dag; throws InvalidParameter unless U is unitary within 1e-10.
void dense_apply_unitary(DenseJointState& state, const Eigen::MatrixXcd& u);

// Projective dephasing P rho P + Q rho Q with P = |u><u| (x) identity.
void dense_dephase(DenseJointState& state, const BasisSpec& basis);

Mat2 dense_reduce_system(const DenseJointState& state);

// Trace distance (1/2) sum |eig| via full eigendecomposition.
double dense_trace_distance(const DenseJointState& a, const DenseJointState& b);

// Largest violation of the +-mu eigenvalue pairing of rho - rho'.
double dense_pairing_defect(const DenseJointState& a, const DenseJointState& b);

// Largest commutator norm || [B_i, |u><u|] ||_max over blocks; zero-discord
// certificate for states classically correlated in the basis.
double max_block_commutator(const JointBlockState& state, const BasisSpec& basis);

// Integral of f against the spectral density: exact weighted sum for
// tabulated densities, adaptive tangent-map Gauss-Kronrod for the Lorentzian.
// sup_f bounds |f| and makes the tail truncation rigorous; kink_omega lists
// known derivative discontinuities of f (forced panel boundaries). Throws
// NumericFailure carrying the best estimate when the budget is exhausted.
QuadResult adaptive_quad(const std::function<double(double)>& f_of_omega,
                         const SpectralDensity& spec, double abs_tol,
                         double sup_f = 1.0,
                         std::span<const double> kink_omega = {});

}  // namespace polfreq
