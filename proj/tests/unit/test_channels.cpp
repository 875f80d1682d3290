#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "polfreq/channels.hpp"
#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"

using namespace polfreq;
using std::complex;

namespace {

constexpr double kOmega0 = 2060.88792922194;
constexpr double kDeltaOmega = 0.10306090899721736;

FrequencyGrid grid_n(std::size_t n, GridScheme scheme = GridScheme::Quantile,
                     double kappa = 100.0) {
  GridSpec gs;
  gs.scheme = scheme;
  gs.n_bins = n;
  gs.span_kappa = kappa;
  return discretize(make_lorentzian(kOmega0, kDeltaOmega), gs);
}

}  // namespace

TEST_CASE("preparation parameters derive the delay from geometry") {
  PreparationParams p = make_preparation(0.5, 35.92, 0.179);
  CHECK(p.t_ps == doctest::Approx(21.447103916136545).epsilon(1e-14));
  CHECK(make_preparation(0.5, 8.98, 0.179).t_ps ==
        doctest::Approx(5.361775979034136).epsilon(1e-14));

  CHECK_THROWS_AS(make_preparation(0.6, 35.92, 0.179), InvalidParameter);
  CHECK_THROWS_AS(make_preparation(-0.1, 35.92, 0.179), InvalidParameter);
  CHECK_THROWS_AS(make_preparation(0.5, -1.0, 0.179), InvalidParameter);

  // Explicit delay must agree with geometry when both are given.
  CHECK_NOTHROW(make_preparation_delay(0.5, 21.447103916136545, 35.92, 0.179));
  CHECK_THROWS_AS(make_preparation_delay(0.5, 20.0, 35.92, 0.179),
                  InvalidParameter);
  CHECK_NOTHROW(make_preparation_delay(0.3, 4.2));
}

TEST_CASE("basis constructors produce orthonormal pairs") {
  for (double eta : {0.0, 0.3, kPi / 4.0, 2.9}) {
    BasisSpec b = basis_eta(eta);
    CHECK(std::abs(b.u.norm() - 1.0) <= 1e-14);
    CHECK(std::abs(b.u.dot(b.u_perp())) <= 1e-14);
    CHECK(b.u(0).real() == doctest::Approx(std::cos(eta)).epsilon(1e-14));
  }
  BasisSpec hv = basis_hv();
  CHECK(hv.u(0) == complex<double>(1.0, 0.0));
  Vec2 circular(1.0 / std::sqrt(2.0), complex<double>(0.0, 1.0 / std::sqrt(2.0)));
  CHECK_NOTHROW(validate_basis(basis_custom(circular)));
  CHECK_THROWS_AS(basis_custom(Vec2(1.0, 1.0)), InvalidParameter);
}

TEST_CASE("pre-initial state blocks carry the off-diagonal d e^{i phi}") {
  FrequencyGrid grid = grid_n(128);
  PreparationParams p = make_preparation(0.5, 35.92, 0.179);
  p.phi = 0.7;
  JointBlockState state = prepare_pre_initial(p, grid);
  REQUIRE(state.size() == 128);
  for (std::size_t i : {std::size_t(0), std::size_t(64), std::size_t(127)}) {
    CHECK(state.block[i](0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(state.block[i](0, 1) -
                   0.5 * std::exp(complex<double>(0.0, 0.7))) <= 1e-15);
  }
  // d = 0 gives the maximally mixed block.
  JointBlockState mixed =
      prepare_pre_initial(make_preparation_delay(0.0, 0.0), grid);
  CHECK(std::abs(mixed.block[5](0, 1)) == 0.0);
}

TEST_CASE("controlled phase: identity at T = 0, rotating-frame phases, inverse") {
  FrequencyGrid grid = grid_n(128);
  PreparationParams p = make_preparation(0.5, 17.96, 0.179);
  JointBlockState state = prepare_pre_initial(p, grid);

  JointBlockState same = apply_controlled_phase(state, basis_hv(), 0.0);
  for (std::size_t i = 0; i < state.size(); ++i)
    CHECK((same.block[i] - state.block[i]).cwiseAbs().maxCoeff() == 0.0);

  // HV evolution multiplies the off-diagonal by e^{+i (omega - omega0) T}.
  double T = p.t_ps;
  JointBlockState evolved = apply_controlled_phase(state, basis_hv(), T);
  for (std::size_t i : {std::size_t(3), std::size_t(97)}) {
    complex<double> expect =
        state.block[i](0, 1) *
        std::exp(complex<double>(0.0, (grid.omega[i] - kOmega0) * T));
    CHECK(std::abs(evolved.block[i](0, 1) - expect) <= 1e-14);
    CHECK(std::abs(evolved.block[i](0, 0) - state.block[i](0, 0)) == 0.0);
  }

  // Evolving back recovers the input.
  JointBlockState back = apply_controlled_phase(evolved, basis_hv(), -T);
  for (std::size_t i = 0; i < state.size(); ++i)
    CHECK((back.block[i] - state.block[i]).cwiseAbs().maxCoeff() <= 1e-12);

  // Full-carrier convention differs by the carrier phase e^{i omega0 T}.
  JointBlockState full =
      apply_controlled_phase(state, basis_hv(), T, CarrierConvention::FullCarrier);
  // Carrier phase omega0 T ~ 4.4e4 rad: product rounding leaves ~5e-12 rad.
  for (std::size_t i : {std::size_t(11)}) {
    complex<double> expect = evolved.block[i](0, 1) *
                             std::exp(complex<double>(0.0, kOmega0 * T));
    CHECK(std::abs(full.block[i](0, 1) - expect) <= 1e-10);
  }
}

TEST_CASE("controlled phase in a rotated basis equals the sandwiched evolution") {
  FrequencyGrid grid = grid_n(96);
  JointBlockState state =
      prepare_pre_initial(make_preparation(0.45, 8.98, 0.179), grid);
  BasisSpec basis = basis_eta(0.62);
  double T = 5.0;
  JointBlockState fast = apply_controlled_phase(state, basis, T);

  Mat2 r;
  r.col(0) = basis.u;
  r.col(1) = basis.u_perp();
  for (std::size_t i : {std::size_t(0), std::size_t(48), std::size_t(95)}) {
    double theta = std::remainder((grid.omega[i] - kOmega0) * T, kTwoPi);
    Mat2 u_basis = Mat2::Zero();
    u_basis(0, 0) = 1.0;
    u_basis(1, 1) = std::exp(complex<double>(0.0, -theta));
    Mat2 u_lab = r * u_basis * r.adjoint();
    Mat2 expect = u_lab * state.block[i] * u_lab.adjoint();
    CHECK((fast.block[i] - expect).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("exact dephasing is idempotent and kills the basis coherence") {
  FrequencyGrid grid = grid_n(128);
  PreparationParams p = make_preparation(0.5, 35.92, 0.179);
  JointBlockState state = prepare_pre_initial(p, grid);
  apply_controlled_phase_inplace(state, basis_hv(), p.t_ps);

  BasisSpec basis = basis_eta(kPi / 4.0);
  JointBlockState deph = dephase_exact(state, basis);
  JointBlockState twice = dephase_exact(deph, basis);
  for (std::size_t i = 0; i < state.size(); ++i) {
    CHECK(std::abs((basis.u.adjoint() * deph.block[i] * basis.u_perp())(0, 0)) <=
          1e-15);
    CHECK((twice.block[i] - deph.block[i]).cwiseAbs().maxCoeff() <= 1e-15);
  }

  // After dephasing in +-45, the HV off-diagonal is d cos((omega_i-omega0) t),
  // the Hermitian part of the evolved coherence.
  for (std::size_t i : {std::size_t(7), std::size_t(70)}) {
    double c = std::cos((grid.omega[i] - kOmega0) * p.t_ps);
    CHECK(std::abs(deph.block[i](0, 1) - 0.5 * c) <= 1e-13);
  }
}

TEST_CASE("fiber dephasing: s = 0 identity, guard, controlled-phase equivalence") {
  FrequencyGrid fine = grid_n(16384, GridScheme::UniformTruncated, 100.0);
  PreparationParams p = make_preparation(0.5, 35.92, 0.179);
  JointBlockState state = prepare_pre_initial(p, fine);
  apply_controlled_phase_inplace(state, basis_hv(), p.t_ps);

  // s = 0 applies a unit phase, identity up to the basis-sandwich rounding.
  BasisSpec basis = basis_eta(0.4);
  JointBlockState same = dephase_fiber(state, basis, 0.0);
  for (std::size_t i : {std::size_t(1), std::size_t(9000)})
    CHECK((same.block[i] - state.block[i]).cwiseAbs().maxCoeff() <= 1e-15);

  double s = 120.08307427133474;
  JointBlockState fiber = dephase_fiber(state, basis, s);
  JointBlockState cp =
      apply_controlled_phase(state, basis, s, CarrierConvention::FullCarrier);
  for (std::size_t i : {std::size_t(0), std::size_t(8192), std::size_t(16383)})
    CHECK((fiber.block[i] - cp.block[i]).cwiseAbs().maxCoeff() <= 1e-14);

  // Unresolved spacing: throws with the bin width needed.
  FrequencyGrid coarse = grid_n(256, GridScheme::UniformTruncated, 100.0);
  JointBlockState on_coarse =
      prepare_pre_initial(make_preparation(0.5, 35.92, 0.179), coarse);
  try {
    dephase_fiber(on_coarse, basis, s);
    FAIL("expected GridResolutionError");
  } catch (const GridResolutionError& e) {
    CHECK(e.required_bin_width == doctest::Approx(0.2 / s).epsilon(1e-12));
  }
}

TEST_CASE("rotation draws are deterministic, unitary, and mode-tagged") {
  for (RotationMode mode :
       {RotationMode::Haar, RotationMode::HalfWavePlate, RotationMode::Identity}) {
    RotationRecord a = draw_rotation(991, mode);
    RotationRecord b = draw_rotation(991, mode);
    CHECK((a.U - b.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK_NOTHROW(validate_rotation(a));
    CHECK(a.mode == mode);
    CHECK(a.seed == 991);
  }
  RotationRecord id = draw_rotation(5, RotationMode::Identity);
  CHECK((id.U - Mat2::Identity()).cwiseAbs().maxCoeff() == 0.0);
  // Different seeds give different Haar draws.
  CHECK((draw_rotation(1, RotationMode::Haar).U -
         draw_rotation(2, RotationMode::Haar).U)
            .cwiseAbs()
            .maxCoeff() > 1e-3);
  // Half-wave plate draws are real reflections: det = -1.
  Mat2 hwp = draw_rotation(77, RotationMode::HalfWavePlate).U;
  CHECK(std::abs(hwp(0, 1).imag()) == 0.0);
  CHECK(std::abs(hwp.determinant() + 1.0) <= 1e-14);
}

TEST_CASE("random_rotation applies the recorded unitary to every block") {
  FrequencyGrid grid = grid_n(96);
  JointBlockState state =
      prepare_pre_initial(make_preparation(0.5, 8.98, 0.179), grid);
  JointBlockState original = state;
  RotationRecord rec = random_rotation(state, 4242, RotationMode::Haar);
  for (std::size_t i : {std::size_t(0), std::size_t(50)}) {
    Mat2 expect = rec.U * original.block[i] * rec.U.adjoint();
    CHECK((state.block[i] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }
}
