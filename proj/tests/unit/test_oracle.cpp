#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/numeric.hpp"
#include "polfreq/oracle.hpp"
#include "polfreq/witness.hpp"

using namespace polfreq;
using std::complex;

namespace {

constexpr double kOmega0 = 2060.88792922194;
constexpr double kDeltaOmega = 0.10306090899721736;

// Small grid legal for dense embedding: Lorentzian quantile nodes with equal
// weights, below the n >= 64 floor of discretize.
FrequencyGrid tiny_grid(std::size_t n) {
  FrequencyGrid grid;
  grid.omega0 = kOmega0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5;
    grid.omega.push_back(kOmega0 + kDeltaOmega * std::tan(kPi * u));
    grid.weight.push_back(1.0 / static_cast<double>(n));
  }
  validate_grid(grid);
  return grid;
}

AliceState tiny_alice(std::size_t n, std::uint64_t seed) {
  return prepare_alice_state(make_preparation(0.5, 35.92, 0.179), tiny_grid(n),
                             seed);
}

}  // namespace

TEST_CASE("dense embedding round-trips block states exactly") {
  for (std::size_t n : {1u, 8u, 64u}) {
    AliceState alice = tiny_alice(n, 17);
    DenseJointState dense = dense_embed(alice.state);
    CHECK_NOTHROW(validate_dense(dense));
    CHECK(dense.rho.rows() == static_cast<Eigen::Index>(2 * n));
    JointBlockState back = dense_extract_blocks(dense);
    for (std::size_t i = 0; i < n; ++i)
      CHECK((back.block[i] - alice.state.block[i]).cwiseAbs().maxCoeff() <= 1e-15);
  }
  // Guard against runaway dimensions.
  AliceState big = tiny_alice(300, 1);
  CHECK_THROWS_AS(dense_embed(big.state), InvalidParameter);
}

TEST_CASE("single-bin embedding is the block itself") {
  AliceState alice = tiny_alice(1, 3);
  DenseJointState dense = dense_embed(alice.state);
  // Weight 1 on one bin: the 2x2 corner blocks match the polarization block.
  Mat2 corner;
  corner << dense.rho(0, 0), dense.rho(0, 1), dense.rho(1, 0), dense.rho(1, 1);
  CHECK((corner - alice.state.block[0]).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("dense trace distance: orthogonal pure polarization blocks give 1") {
  FrequencyGrid grid = tiny_grid(4);
  JointBlockState h, v;
  h.grid = v.grid = grid;
  Mat2 bh = Mat2::Zero(), bv = Mat2::Zero();
  bh(0, 0) = 1.0;
  bv(1, 1) = 1.0;
  h.block.assign(4, bh);
  v.block.assign(4, bv);
  CHECK(dense_trace_distance(dense_embed(h), dense_embed(v)) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(dense_trace_distance(dense_embed(h), dense_embed(h)) <= 1e-14);
  CHECK(2.0 * dense_trace_distance(dense_embed(h), dense_embed(v)) ==
        doctest::Approx(delta_total(h, v)).epsilon(1e-12));
}

TEST_CASE("dense arithmetic certifies the block witness pipeline") {
  for (std::size_t n : {8u, 32u, 64u}) {
    AliceState alice = tiny_alice(n, 1000 + n);
    Reference ref = build_reference(alice.state, ReferenceOptions{});
    DenseJointState da = dense_embed(alice.state);
    DenseJointState dr = dense_embed(ref.state);

    // Reduced states agree.
    CHECK((dense_reduce_system(da) - reduce_system(alice.state))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    // Witness values along both arithmetic paths.
    for (double eta : {0.0, 0.7}) {
      for (double tau : {0.0, 9.0, -21.447103916136545}) {
        BasisSpec basis = basis_eta(eta);
        double block_value = local_distance_single(alice.state, ref, basis, tau);
        Eigen::MatrixXcd u = dense_controlled_phase(alice.state.grid, basis, tau);
        DenseJointState ea = da, er = dr;
        dense_apply_unitary(ea, u);
        dense_apply_unitary(er, u);
        double dense_value =
            trace_norm_2x2(dense_reduce_system(ea) - dense_reduce_system(er));
        CHECK(std::abs(block_value - dense_value) <= 1e-11);
      }
    }

    // Joint distinguishability, eigenvalue pairing, zero-discord certificate.
    CHECK(std::abs(2.0 * dense_trace_distance(da, dr) -
                   delta_total(alice.state, ref.state)) <= 1e-11);
    CHECK(dense_pairing_defect(da, dr) <= 1e-12);
    CHECK(max_block_commutator(ref.state, ref.basis) <= 1e-12);
  }
}

TEST_CASE("dense dephasing matches the block dephasing") {
  AliceState alice = tiny_alice(16, 5);
  BasisSpec basis = basis_eta(0.9);
  JointBlockState block_deph = dephase_exact(alice.state, basis);
  DenseJointState dense = dense_embed(alice.state);
  dense_dephase(dense, basis);
  JointBlockState back = dense_extract_blocks(dense);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK((back.block[i] - block_deph.block[i]).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("dense unitary application rejects non-unitary input") {
  AliceState alice = tiny_alice(4, 2);
  DenseJointState dense = dense_embed(alice.state);
  Eigen::MatrixXcd not_u = Eigen::MatrixXcd::Identity(8, 8);
  not_u(0, 0) = 1.5;
  CHECK_THROWS_AS(dense_apply_unitary(dense, not_u), InvalidParameter);
}

TEST_CASE("adaptive quadrature: unit mass, coherence, correlation integral") {
  SpectralDensity spec = make_lorentzian(kOmega0, kDeltaOmega);

  QuadResult unit = adaptive_quad([](double) { return 1.0; }, spec, 1e-9);
  CHECK(std::abs(unit.value - 1.0) <= 1e-8);

  // Real part of the coherence at one decay time. The truncation strip
  // scales as abs_tol, so an oscillatory tail must be resolved out to
  // x ~ 4/(pi abs_tol); 1e-5 keeps that within the panel budget.
  double t = 1.0 / kDeltaOmega;
  QuadResult cosine = adaptive_quad(
      [&](double w) { return std::cos((w - kOmega0) * t); }, spec, 1e-5);
  CHECK(std::abs(cosine.value - 0.36787944117144233) <= 1e-4);

  // |sin| with kink hints against the closed form, delta omega t = 2.21.
  double tk = 21.447103916136545;
  std::vector<double> kinks;
  for (int k = 1; k <= 2000; ++k) {
    double x = static_cast<double>(k) * kPi / (kDeltaOmega * tk);
    if (x > 2000.0) break;
    kinks.push_back(kOmega0 + kDeltaOmega * x);
    kinks.push_back(kOmega0 - kDeltaOmega * x);
  }
  auto folded = [&](double w) { return std::abs(std::sin((w - kOmega0) * tk)); };
  QuadResult coarse = adaptive_quad(folded, spec, 1e-4, 1.0, kinks);
  QuadResult fine = adaptive_quad(folded, spec, 1e-5, 1.0, kinks);
  double closed = quad_correlation_integral(spec, tk, 0.5);
  CHECK(std::abs(2.0 * 0.5 * fine.value - closed) <= 2e-5);
  CHECK(std::abs(fine.value - coarse.value) <= 1e-4 + 1e-5);
  CHECK(fine.evals > 0);
}

TEST_CASE("adaptive quadrature is an exact sum for tabulated densities") {
  SpectralDensity tab =
      make_tabulated(10.0, {8.0, 10.0, 13.0}, {0.2, 0.5, 0.3});
  QuadResult r = adaptive_quad([](double w) { return w * w; }, tab, 1e-10);
  CHECK(r.error == 0.0);
  CHECK(r.value ==
        doctest::Approx(0.2 * 64.0 + 0.5 * 100.0 + 0.3 * 169.0).epsilon(1e-15));
}

TEST_CASE("exhausted panel budget raises NumericFailure with the estimate") {
  // Fast oscillation under a 3-panel budget cannot reach 1e-10; the error
  // estimate stays visible to GK15, so the failure is detected and thrown.
  auto wavy = [](double x) { return std::abs(std::sin(50.0 * x)); };
  try {
    adaptive_quad_lorentzian(wavy, 1e-10, 1.0, {}, 3);
    FAIL("expected NumericFailure");
  } catch (const NumericFailure& e) {
    CHECK(e.achieved_error > 1e-10);
    CHECK(std::isfinite(e.achieved_error));
  }
}

TEST_CASE("quadrature input validation") {
  SpectralDensity spec = make_lorentzian(kOmega0, kDeltaOmega);
  CHECK_THROWS_AS(adaptive_quad([](double) { return 1.0; }, spec, 1e-13),
                  InvalidParameter);
  CHECK_THROWS_AS(adaptive_quad([](double) { return 1.0; }, spec, 1e-6, 0.0),
                  InvalidParameter);
}
