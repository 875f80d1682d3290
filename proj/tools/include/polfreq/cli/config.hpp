#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "polfreq/channels.hpp"
#include "polfreq/constants.hpp"
#include "polfreq/spectrum.hpp"
#include "polfreq/witness.hpp"

namespace polfreq::cli {

// Configuration problem with a file/line reference; reported on exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TauRule { Coarse, Dense };
enum class EtaRule { All, Single };
enum class TomographyMode { Exact, Counts };

// Fully resolved run configuration; every field has a working default and is
// validated before any computation starts.
struct RunConfig {
  // [spectrum]
  double wavelength_nm = 914.0;
  double omega0 = omega0_from_wavelength_nm(914.0);  // derived unless given directly
  double coherence_time_ps = 9.703;
  double delta_omega = 1.0 / 9.703;  // derived unless given directly

  // [preparation]
  double d = 0.5;
  double delta_n = 0.179;
  double L_mm = 35.92;

  // [grid]
  GridScheme scheme = GridScheme::Quantile;
  std::size_t grid_n = 4096;
  double kappa = 100.0;

  // [protocol]
  DephasingMode dephasing = DephasingMode::Projective;
  double s_ps = 120.083;
  TomographyMode tomography = TomographyMode::Exact;
  std::uint64_t counts_n = 100000;
  RotationMode rotation = RotationMode::HalfWavePlate;
  std::uint64_t seed = 20260816;

  // [sweep]
  TauRule taus = TauRule::Dense;
  std::size_t dense_n = 481;
  double dense_span = 6.0;
  EtaRule etas = EtaRule::Single;
  double eta_rad = 0.0;

  // [fig4]
  int k_max = 6;
  double L_step_mm = 8.98;
  int mc_seeds = 0;

  // [fit]
  double fit_sigma = 0.01;
  std::size_t fit_points = 50;
  double fit_span_decay = 4.0;
  double fit_x0_mm = 0.0;

  // [output]
  std::string out_dir = "out";
  bool write_svg = true;
  bool write_json = true;

  // resolved helpers
  SpectralDensity spectral_density() const;
  GridSpec grid_spec() const;
  PreparationParams preparation() const;            // at L_mm
  PreparationParams preparation_at(double L) const;
  DelaySweep sweep() const;
  ReferenceOptions reference_options(std::uint64_t tomo_seed) const;
};

// Parses the sectioned key = value format ('#' comments). Unknown sections or
// keys, duplicate keys, malformed values and cross-field contradictions all
// throw ConfigError with a path:line reference.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& path);

// Post-parse semantic validation (also applied to the defaults and after CLI
// overrides); throws ConfigError without a line reference.
void validate_config(const RunConfig& cfg);

const char* to_string(TauRule rule);
const char* to_string(EtaRule rule);
const char* to_string(TomographyMode mode);
const char* to_string(GridScheme scheme);
const char* to_string(DephasingMode mode);

}  // namespace polfreq::cli
