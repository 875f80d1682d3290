#pragma once

namespace polfreq {

// Internal units: angular frequency in rad/ps, time in ps, length in mm.
inline constexpr double kSpeedOfLight_mm_per_ps = 0.299792458;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// omega0 = 2 pi c / lambda, with lambda in nm.
inline double omega0_from_wavelength_nm(double lambda_nm) {
  return kTwoPi * kSpeedOfLight_mm_per_ps / (lambda_nm * 1e-6);
}

}  // namespace polfreq
