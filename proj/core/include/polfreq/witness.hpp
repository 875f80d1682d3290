#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polfreq/channels.hpp"
#include "polfreq/states.hpp"

namespace polfreq {

// Evaluation lattice for the local protocol: measurement basis angles eta in
// [0, pi) and interferometer delays tau (ps), finite and sorted ascending.
struct DelaySweep {
  std::vector<double> eta;
  std::vector<double> tau;
};

void validate_sweep(const DelaySweep& sweep);

std::vector<double> protocol_etas();                       // m pi/16, m = 0..7
std::vector<double> coarse_taus(double delta_omega);     // (n-12)/(2 dw), n = 0..23
std::vector<double> dense_taus(double delta_omega, std::size_t n = 481,
                               double span = 6.0);      // +-span/dw
DelaySweep coarse_sweep(double delta_omega);
DelaySweep dense_sweep(double delta_omega, std::size_t n = 481, double span = 6.0);

// Mirror displacement equivalent to a delay tau: x = c tau / 2.
double delay_to_displacement_mm(double tau_ps);

struct FitInfo {
  double t_hat = 0.0;
  double d_hat = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  bool used_fallback = false;  // grid maximum substituted for a failed fit
};

// Local trace-distance witness values Delta(eta, tau) = || rho_S(tau) -
// rho'_S(tau) ||_1 over a sweep, row-major by eta. Values lie in [0, 1].
struct WitnessCurve {
  std::vector<double> eta;
  std::vector<double> tau;
  std::vector<double> value;  // eta.size() * tau.size()
  // protocol metadata
  bool degenerate_basis = false;
  std::string dephasing = "projective";
  std::string reference_mode = "exact";
  RotationMode rotation_mode = RotationMode::Identity;
  std::uint64_t rotation_seed = 0;
  std::uint64_t tomo_shots = 0;
  std::uint64_t tomo_seed = 0;
  std::optional<FitInfo> fit;

  double at(std::size_t i_eta, std::size_t i_tau) const {
    return value[i_eta * tau.size() + i_tau];
  }
};

void validate_curve(const WitnessCurve& curve);

// Source side of the protocol: pre-initial correlated state, birefringent
// delay t in the HV basis (rotating frame), then a random polarization
// rotation. The rotation defaults to a real half-wave-plate Jones matrix,
// which leaves the linear-basis witness invariant.
struct AliceState {
  JointBlockState state;
  RotationRecord rotation;
  PreparationParams params;
};

AliceState prepare_alice_state(const PreparationParams& params,
                               const FrequencyGrid& grid, std::uint64_t seed,
                               RotationMode mode = RotationMode::HalfWavePlate);

enum class ReferenceMode { ExactEigenbasis, Tomographic };
enum class DephasingMode { Projective, Fiber };

struct ReferenceOptions {
  ReferenceMode mode = ReferenceMode::ExactEigenbasis;
  std::uint64_t tomo_shots = 1000000;
  std::uint64_t tomo_seed = 0;
  DephasingMode dephasing = DephasingMode::Projective;
  double fiber_s_ps = 0.0;
};

// Locally dephased reference: the system marginal (exact, or reconstructed
// from simulated counts) fixes the eigenbasis; the joint state is dephased in
// it, projectively or by a long fiber delay.
struct Reference {
  JointBlockState state;
  EigenBasis eigen;
  BasisSpec basis;
  bool degenerate = false;
  DephasingMode dephasing = DephasingMode::Projective;
  ReferenceMode mode = ReferenceMode::ExactEigenbasis;
  Mat2 marginal_estimate;  // the matrix whose eigenbasis was used
};

Reference build_reference(const JointBlockState& state, const ReferenceOptions& opts);

// Delta(eta, tau) over the sweep: both states evolve under the controlled
// phase in the linear basis at angle eta for delay tau, are reduced to the
// polarization qubit, and the trace norm of the difference is recorded.
WitnessCurve local_distance_curve(const JointBlockState& state, const Reference& ref,
                                  const DelaySweep& sweep,
                                  CarrierConvention convention =
                                      CarrierConvention::RotatingFrame);

// Single point through the literal evolve-reduce-compare path; reference
// implementation for cross-checks.
double local_distance_single(const JointBlockState& state, const Reference& ref,
                             const BasisSpec& basis, double tau,
                             CarrierConvention convention =
                                 CarrierConvention::RotatingFrame);

enum class MaxMethod { FitEq9, GridMax };

struct WitnessMax {
  double value = 0.0;
  MaxMethod method = MaxMethod::FitEq9;
  FitInfo fit;
  bool zero_curve = false;
};

// Maximum of the witness over delays. FitEq9 fits d |e^{-dw|t+tau|} -
// e^{-dw|t-tau|}| to all curve points and reports d (1 - e^{-2 dw t}),
// falling back to the grid maximum if the fit fails; GridMax takes the
// largest sampled value.
WitnessMax witness_max(const WitnessCurve& curve, double delta_omega,
                       MaxMethod method = MaxMethod::FitEq9);

// Total joint distinguishability delta = sum_i w_i || A_i - B_i ||_1 (twice
// trace_distance_joint); upper bound certified by the data-processing
// inequality for every Delta(eta, tau).
double delta_total(const JointBlockState& state, const JointBlockState& reference);

// Analytic witness curve for a Lorentzian density.
double analytic_Delta_lorentzian(double d, double delta_omega, double t, double tau);
// Its maximum over tau, reached at tau = +-t.
double analytic_max_lorentzian(double d, double delta_omega, double t);
// d |C(t+tau) - C(t-tau)| for an arbitrary density; coincides with the
// Lorentzian closed form within 1e-8 there.
double analytic_Delta_general(const SpectralDensity& spec, double d, double t,
                              double tau);

// CSV with header eta_rad,tau_ps,x_mm,delta; row-major by eta.
void write_witness_csv(const std::string& path, const WitnessCurve& curve);
WitnessCurve read_witness_csv(const std::string& path);
// JSON document with metadata, fit block and values.
void write_witness_json(const std::string& path, const WitnessCurve& curve);

}  // namespace polfreq
