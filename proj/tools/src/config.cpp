#include "polfreq/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "polfreq/constants.hpp"

namespace polfreq::cli {

SpectralDensity RunConfig::spectral_density() const {
  return make_lorentzian(omega0, delta_omega);
}

GridSpec RunConfig::grid_spec() const { return GridSpec{scheme, grid_n, kappa}; }

PreparationParams RunConfig::preparation() const { return preparation_at(L_mm); }

PreparationParams RunConfig::preparation_at(double L) const {
  return make_preparation(d, L, delta_n);
}

DelaySweep RunConfig::sweep() const {
  DelaySweep sweep;
  sweep.eta = (etas == EtaRule::All) ? protocol_etas() : std::vector<double>{eta_rad};
  sweep.tau = (taus == TauRule::Coarse) ? coarse_taus(delta_omega)
                                       : dense_taus(delta_omega, dense_n, dense_span);
  return sweep;
}

ReferenceOptions RunConfig::reference_options(std::uint64_t tomo_seed) const {
  ReferenceOptions opts;
  opts.mode = (tomography == TomographyMode::Exact) ? ReferenceMode::ExactEigenbasis
                                                    : ReferenceMode::Tomographic;
  opts.tomo_shots = counts_n;
  opts.tomo_seed = tomo_seed;
  opts.dephasing = dephasing;
  opts.fiber_s_ps = s_ps;
  return opts;
}

const char* to_string(TauRule rule) {
  return rule == TauRule::Coarse ? "coarse" : "dense";
}
const char* to_string(EtaRule rule) {
  return rule == EtaRule::All ? "all" : "single";
}
const char* to_string(TomographyMode mode) {
  return mode == TomographyMode::Exact ? "exact" : "counts";
}
const char* to_string(GridScheme scheme) {
  return scheme == GridScheme::Quantile ? "quantile" : "uniform";
}
const char* to_string(DephasingMode mode) {
  return mode == DephasingMode::Projective ? "projective" : "fiber";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Cursor {
  const std::string& path;
  int line;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const Cursor& at, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) at.fail("trailing characters after number '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    at.fail("expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const Cursor& at, const std::string& v) {
  // stoull wraps negative input instead of rejecting it.
  if (!v.empty() && (v[0] == '-' || v[0] == '+'))
    at.fail("expected an unsigned integer, got '" + v + "'");
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) at.fail("trailing characters after integer '" + v + "'");
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    at.fail("expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const Cursor& at, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  at.fail("expected true/false, got '" + v + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& path) {
  RunConfig cfg;
  bool omega0_given = false, wavelength_given = false;
  bool dw_given = false, tc_given = false;
  int dephasing_line = 0, scheme_line = 0;

  static const std::map<std::string, std::set<std::string>> known = {
      {"spectrum",
       {"wavelength_nm", "omega0_rad_per_ps", "coherence_time_ps",
        "delta_omega_rad_per_ps"}},
      {"preparation", {"d", "delta_n", "L_mm"}},
      {"grid", {"scheme", "n", "kappa"}},
      {"protocol",
       {"dephasing", "s_ps", "tomography", "counts_n", "rotation", "seed"}},
      {"sweep", {"taus", "dense_n", "dense_span", "etas", "eta_rad"}},
      {"fig4", {"k_max", "L_step_mm", "mc_seeds"}},
      {"fit", {"sigma", "n_points", "span_decay_constants", "x0_mm"}},
      {"output", {"dir", "svg", "json"}},
  };

  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    Cursor at{path, line_no};
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known.count(section)) at.fail("unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) at.fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for key '" + key + "'");
    if (section.empty()) at.fail("key '" + key + "' before any section header");
    if (!known.at(section).count(key))
      at.fail("unknown key '" + key + "' in [" + section + "]");
    std::string qualified = section + "." + key;
    if (!seen.insert(qualified).second) at.fail("duplicate key '" + qualified + "'");

    if (section == "spectrum") {
      if (key == "wavelength_nm") {
        cfg.wavelength_nm = parse_double(at, value);
        wavelength_given = true;
      } else if (key == "omega0_rad_per_ps") {
        cfg.omega0 = parse_double(at, value);
        omega0_given = true;
      } else if (key == "coherence_time_ps") {
        cfg.coherence_time_ps = parse_double(at, value);
        tc_given = true;
      } else {
        cfg.delta_omega = parse_double(at, value);
        dw_given = true;
      }
    } else if (section == "preparation") {
      if (key == "d") cfg.d = parse_double(at, value);
      else if (key == "delta_n") cfg.delta_n = parse_double(at, value);
      else cfg.L_mm = parse_double(at, value);
    } else if (section == "grid") {
      if (key == "scheme") {
        scheme_line = line_no;
        if (value == "quantile") cfg.scheme = GridScheme::Quantile;
        else if (value == "uniform") cfg.scheme = GridScheme::UniformTruncated;
        else at.fail("scheme must be quantile or uniform, got '" + value + "'");
      } else if (key == "n") {
        cfg.grid_n = static_cast<std::size_t>(parse_u64(at, value));
      } else {
        cfg.kappa = parse_double(at, value);
      }
    } else if (section == "protocol") {
      if (key == "dephasing") {
        dephasing_line = line_no;
        if (value == "projective") cfg.dephasing = DephasingMode::Projective;
        else if (value == "fiber") cfg.dephasing = DephasingMode::Fiber;
        else at.fail("dephasing must be projective or fiber, got '" + value + "'");
      } else if (key == "s_ps") {
        cfg.s_ps = parse_double(at, value);
      } else if (key == "tomography") {
        if (value == "exact") cfg.tomography = TomographyMode::Exact;
        else if (value == "counts") cfg.tomography = TomographyMode::Counts;
        else at.fail("tomography must be exact or counts, got '" + value + "'");
      } else if (key == "counts_n") {
        cfg.counts_n = parse_u64(at, value);
      } else if (key == "rotation") {
        if (value == "half_wave_plate") cfg.rotation = RotationMode::HalfWavePlate;
        else if (value == "haar") cfg.rotation = RotationMode::Haar;
        else if (value == "identity") cfg.rotation = RotationMode::Identity;
        else at.fail("rotation must be half_wave_plate, haar or identity");
      } else {
        cfg.seed = parse_u64(at, value);
      }
    } else if (section == "sweep") {
      if (key == "taus") {
        if (value == "coarse") cfg.taus = TauRule::Coarse;
        else if (value == "dense") cfg.taus = TauRule::Dense;
        else at.fail("taus must be coarse or dense, got '" + value + "'");
      } else if (key == "dense_n") {
        cfg.dense_n = static_cast<std::size_t>(parse_u64(at, value));
      } else if (key == "dense_span") {
        cfg.dense_span = parse_double(at, value);
      } else if (key == "etas") {
        if (value == "all") cfg.etas = EtaRule::All;
        else if (value == "single") cfg.etas = EtaRule::Single;
        else at.fail("etas must be all or single, got '" + value + "'");
      } else {
        cfg.eta_rad = parse_double(at, value);
      }
    } else if (section == "fig4") {
      if (key == "k_max") cfg.k_max = static_cast<int>(parse_u64(at, value));
      else if (key == "L_step_mm") cfg.L_step_mm = parse_double(at, value);
      else cfg.mc_seeds = static_cast<int>(parse_u64(at, value));
    } else if (section == "fit") {
      if (key == "sigma") cfg.fit_sigma = parse_double(at, value);
      else if (key == "n_points") cfg.fit_points = static_cast<std::size_t>(parse_u64(at, value));
      else if (key == "span_decay_constants") cfg.fit_span_decay = parse_double(at, value);
      else cfg.fit_x0_mm = parse_double(at, value);
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = value;
      else if (key == "svg") cfg.write_svg = parse_bool(at, value);
      else cfg.write_json = parse_bool(at, value);
    }
  }

  if (omega0_given && wavelength_given)
    throw ConfigError(path + ": give either wavelength_nm or omega0_rad_per_ps, not both");
  if (dw_given && tc_given)
    throw ConfigError(path +
                      ": give either coherence_time_ps or delta_omega_rad_per_ps, not both");
  if (!omega0_given) cfg.omega0 = omega0_from_wavelength_nm(cfg.wavelength_nm);
  if (!dw_given) {
    if (!(cfg.coherence_time_ps > 0.0))
      throw ConfigError(path + ": coherence_time_ps must be > 0");
    cfg.delta_omega = 1.0 / cfg.coherence_time_ps;
  }

  if (cfg.dephasing == DephasingMode::Fiber && cfg.scheme == GridScheme::Quantile) {
    int line = dephasing_line ? dephasing_line : scheme_line;
    throw ConfigError(path + ":" + std::to_string(line ? line : 1) +
                      ": fiber dephasing needs scheme = uniform (the quantile grid "
                      "tail cannot resolve the fiber phase)");
  }

  validate_config(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (!(cfg.omega0 > 0.0)) fail("omega0 must be > 0");
  if (!(cfg.delta_omega > 0.0)) fail("delta_omega must be > 0");
  if (!(cfg.d >= 0.0 && cfg.d <= 0.5)) fail("d must lie in [0, 1/2]");
  if (cfg.L_mm < 0.0) fail("L_mm must be >= 0");
  if (cfg.delta_n < 0.0) fail("delta_n must be >= 0");
  if (cfg.grid_n < 64) fail("grid n must be >= 64");
  if (cfg.scheme == GridScheme::UniformTruncated && !(cfg.kappa >= 10.0))
    fail("kappa must be >= 10");
  if (cfg.counts_n < 1) fail("counts_n must be >= 1");
  if (cfg.dense_n < 2) fail("dense_n must be >= 2");
  if (!(cfg.dense_span > 0.0)) fail("dense_span must be > 0");
  if (!(cfg.eta_rad >= 0.0 && cfg.eta_rad < kPi)) fail("eta_rad must lie in [0, pi)");
  if (cfg.k_max < 0) fail("k_max must be >= 0");
  if (!(cfg.L_step_mm > 0.0)) fail("L_step_mm must be > 0");
  if (cfg.mc_seeds < 0) fail("mc_seeds must be >= 0");
  if (cfg.fit_sigma < 0.0) fail("fit sigma must be >= 0");
  if (cfg.fit_points < 8) fail("fit n_points must be >= 8");
  if (!(cfg.fit_span_decay > 0.0)) fail("fit span must be > 0");
  if (cfg.out_dir.empty()) fail("output dir must be nonempty");
  if (cfg.dephasing == DephasingMode::Fiber) {
    if (!(cfg.s_ps >= 0.0)) fail("s_ps must be >= 0");
    if (cfg.scheme == GridScheme::Quantile)
      fail("fiber dephasing needs scheme = uniform");
  }
}

}  // namespace polfreq::cli
