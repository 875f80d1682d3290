#pragma once

#include <cstdint>
#include <string>

#include "polfreq/states.hpp"

namespace polfreq {

// Source and channel parameters. t_ps is the polarization group delay
// accumulated in the birefringent element; when L_mm and delta_n are both
// set, t_ps must equal L_mm * delta_n / c within 1e-9 ps.
struct PreparationParams {
  double d = 0.5;        // off-diagonal correlation amplitude, in [0, 1/2]
  double t_ps = 0.0;     // group delay
  double L_mm = 0.0;     // crystal length (0 = unspecified)
  double delta_n = 0.0;  // birefringence (0 = unspecified)
  double phi = 0.0;      // preparation phase of the off-diagonal, rotating frame
};

// Derives t from geometry.
PreparationParams make_preparation(double d, double L_mm, double delta_n);
// Explicit delay; validates consistency when geometry is also given.
PreparationParams make_preparation_delay(double d, double t_ps, double L_mm = 0.0,
                                         double delta_n = 0.0);
void validate_preparation(const PreparationParams& params);

// Orthonormal polarization basis {u, u_perp}; u_perp is the canonical
// complement (-conj(u1), conj(u0)).
struct BasisSpec {
  enum class Label { HV, Eta, Custom };
  Label label = Label::HV;
  double eta = 0.0;  // Eta label only
  Vec2 u = Vec2(1.0, 0.0);
  Vec2 u_perp() const { return Vec2(-std::conj(u(1)), std::conj(u(0))); }
};

BasisSpec basis_hv();
BasisSpec basis_eta(double eta);           // linear basis (cos eta, sin eta)
BasisSpec basis_custom(const Vec2& u);     // normalized within 1e-12 on input
void validate_basis(const BasisSpec& basis);

enum class CarrierConvention { RotatingFrame, FullCarrier };

enum class RotationMode { Haar, HalfWavePlate, Identity };
const char* to_string(RotationMode mode);

struct RotationRecord {
  Mat2 U;
  std::uint64_t seed = 0;
  RotationMode mode = RotationMode::Identity;
};

void validate_rotation(const RotationRecord& record);  // unitarity within 1e-12

// Pre-initial correlated state: every block [[1/2, d e^{i phi}],
// [d e^{-i phi}, 1/2]] on the given grid.
JointBlockState prepare_pre_initial(const PreparationParams& params,
                                    const FrequencyGrid& grid);

// Frequency-controlled phase: in basis {u, u_perp}, block i picks up
// diag(1, e^{-i theta_i}) with theta_i = (omega_i - omega0) T (rotating
// frame) or omega_i T (full carrier), reduced mod 2 pi.
void apply_controlled_phase_inplace(JointBlockState& state, const BasisSpec& basis,
                                    double T,
                                    CarrierConvention convention =
                                        CarrierConvention::RotatingFrame);
JointBlockState apply_controlled_phase(const JointBlockState& state,
                                       const BasisSpec& basis, double T,
                                       CarrierConvention convention =
                                           CarrierConvention::RotatingFrame);

// Exact local dephasing in the given basis: B -> P B P + Q B Q.
JointBlockState dephase_exact(const JointBlockState& state, const BasisSpec& basis);

// Physical dephasing by a long polarization-maintaining fiber of differential
// delay s: the full-carrier controlled phase e^{-i omega_i s} on u_perp.
// Requires max adjacent grid spacing * |s| <= 0.2 rad so the phase pattern is
// resolved; otherwise throws GridResolutionError naming the bin width needed.
JointBlockState dephase_fiber(const JointBlockState& state, const BasisSpec& basis,
                              double s_ps);

// Applies U to every block in place.
void apply_unitary_inplace(JointBlockState& state, const Mat2& u);

// Draws a polarization rotation (Haar by default; HalfWavePlate draws a real
// Jones reflection at angle theta ~ U[0, pi); Identity is a test hook),
// applies it to every block, and returns the record. Deterministic in seed.
RotationRecord random_rotation(JointBlockState& state, std::uint64_t seed,
                               RotationMode mode = RotationMode::Haar);

// The unitary alone, without touching a state.
RotationRecord draw_rotation(std::uint64_t seed, RotationMode mode);

}  // namespace polfreq
