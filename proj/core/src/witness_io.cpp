#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "polfreq/errors.hpp"
#include "polfreq/witness.hpp"

namespace polfreq {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_witness_csv(const std::string& path, const WitnessCurve& curve) {
  validate_curve(curve);
  std::ofstream out(path);
  if (!out) throw Error("write_witness_csv: cannot open " + path);
  out << "eta_rad,tau_ps,x_mm,delta\n";
  for (std::size_t ie = 0; ie < curve.eta.size(); ++ie)
    for (std::size_t it = 0; it < curve.tau.size(); ++it)
      out << g17(curve.eta[ie]) << ',' << g17(curve.tau[it]) << ','
          << g17(delay_to_displacement_mm(curve.tau[it])) << ','
          << g17(curve.at(ie, it)) << '\n';
}

WitnessCurve read_witness_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_witness_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "eta_rad,tau_ps,x_mm,delta")
    throw Error("read_witness_csv: bad header in " + path);
  std::vector<double> etas, taus, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double cols[4];
    for (int c = 0; c < 4; ++c) {
      if (!std::getline(row, cell, ','))
        throw Error("read_witness_csv: bad row in " + path);
      cols[c] = std::stod(cell);
    }
    etas.push_back(cols[0]);
    taus.push_back(cols[1]);
    values.push_back(cols[3]);
  }
  if (values.empty()) throw Error("read_witness_csv: no data in " + path);

  WitnessCurve curve;
  for (double e : etas)
    if (curve.eta.empty() || e != curve.eta.back()) curve.eta.push_back(e);
  std::size_t n_tau = values.size() / curve.eta.size();
  if (curve.eta.size() * n_tau != values.size())
    throw Error("read_witness_csv: ragged sweep in " + path);
  curve.tau.assign(taus.begin(), taus.begin() + static_cast<long>(n_tau));
  curve.value = values;
  validate_curve(curve);
  return curve;
}

void write_witness_json(const std::string& path, const WitnessCurve& curve) {
  validate_curve(curve);
  nlohmann::ordered_json doc;
  doc["metadata"] = {
      {"dephasing", curve.dephasing},
      {"reference_mode", curve.reference_mode},
      {"degenerate_basis", curve.degenerate_basis},
      {"rotation_mode", to_string(curve.rotation_mode)},
      {"rotation_seed", curve.rotation_seed},
      {"tomo_shots", curve.tomo_shots},
      {"tomo_seed", curve.tomo_seed},
  };
  if (curve.fit) {
    doc["fit"] = {
        {"t_hat_ps", curve.fit->t_hat},
        {"d_hat", curve.fit->d_hat},
        {"residual_rms", curve.fit->residual_rms},
        {"converged", curve.fit->converged},
        {"used_fallback", curve.fit->used_fallback},
    };
  } else {
    doc["fit"] = nullptr;
  }
  doc["eta_rad"] = curve.eta;
  doc["tau_ps"] = curve.tau;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t ie = 0; ie < curve.eta.size(); ++ie) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t it = 0; it < curve.tau.size(); ++it) row.push_back(curve.at(ie, it));
    rows.push_back(row);
  }
  doc["delta"] = rows;
  std::ofstream out(path);
  if (!out) throw Error("write_witness_json: cannot open " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace polfreq
