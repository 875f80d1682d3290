#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "polfreq/states.hpp"

namespace polfreq {

// Projective count record for the three Pauli settings, in the order
// sigma_x, sigma_y, sigma_z; n_plus[k] of n shots landed in the +1 outcome.
struct CountRecord {
  std::uint64_t shots = 0;
  std::array<std::uint64_t, 3> n_plus{};
};

// Bloch vector (tr rho sigma_x, sigma_y, sigma_z).
std::array<double, 3> bloch_vector(const Mat2& rho);

// Binomial sampling of the three settings, n shots each, with per-setting
// sub-seeds derived from seed; deterministic.
CountRecord simulate_counts(const Mat2& rho, std::uint64_t n, std::uint64_t seed);

// Linear inversion r_k = (2 n_plus - n)/n; an infeasible |r| > 1 is rescaled
// onto the Bloch sphere. Always returns a valid density matrix.
Mat2 reconstruct(const CountRecord& counts);

// CSV with header setting,n_plus,n_minus and rows x,y,z.
void write_counts_csv(const std::string& path, const CountRecord& counts);
CountRecord read_counts_csv(const std::string& path);

}  // namespace polfreq
