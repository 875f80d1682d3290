#include "polfreq/tomography.hpp"

#include <cmath>
#include <fstream>

#include "polfreq/errors.hpp"
#include "polfreq/rng.hpp"

namespace polfreq {

std::array<double, 3> bloch_vector(const Mat2& rho) {
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
          rho(0, 0).real() - rho(1, 1).real()};
}

CountRecord simulate_counts(const Mat2& rho, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidParameter("simulate_counts: n must be >= 1");
  validate_qubit_density(rho);
  std::array<double, 3> r = bloch_vector(rho);
  CountRecord counts;
  counts.shots = n;
  for (int k = 0; k < 3; ++k) {
    double p = 0.5 * (1.0 + r[k]);
    p = std::clamp(p, 0.0, 1.0);  // guard sub-1e-12 validation slack
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    counts.n_plus[k] = rng.binomial(n, p);
  }
  return counts;
}

Mat2 reconstruct(const CountRecord& counts) {
  if (counts.shots < 1) throw InvalidParameter("reconstruct: empty count record");
  double n = static_cast<double>(counts.shots);
  std::array<double, 3> r{};
  for (int k = 0; k < 3; ++k) {
    if (counts.n_plus[k] > counts.shots)
      throw InvalidParameter("reconstruct: n_plus exceeds shot count");
    r[k] = (2.0 * static_cast<double>(counts.n_plus[k]) - n) / n;
  }
  double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (len > 1.0)
    for (double& v : r) v /= len;
  Mat2 rho;
  rho(0, 0) = 0.5 * (1.0 + r[2]);
  rho(1, 1) = 0.5 * (1.0 - r[2]);
  rho(0, 1) = std::complex<double>(0.5 * r[0], -0.5 * r[1]);
  rho(1, 0) = std::conj(rho(0, 1));
  return rho;
}

void write_counts_csv(const std::string& path, const CountRecord& counts) {
  std::ofstream out(path);
  if (!out) throw Error("write_counts_csv: cannot open " + path);
  out << "setting,n_plus,n_minus\n";
  const char* names[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k)
    out << names[k] << ',' << counts.n_plus[k] << ','
        << (counts.shots - counts.n_plus[k]) << '\n';
}

CountRecord read_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_counts_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "setting,n_plus,n_minus")
    throw Error("read_counts_csv: bad header in " + path);
  CountRecord counts;
  int row = 0;
  while (std::getline(in, line) && row < 3) {
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw Error("read_counts_csv: bad row in " + path);
    std::uint64_t plus = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
    std::uint64_t minus = std::stoull(line.substr(c2 + 1));
    counts.n_plus[row] = plus;
    counts.shots = plus + minus;
    ++row;
  }
  if (row != 3) throw Error("read_counts_csv: expected three settings");
  return counts;
}

}  // namespace polfreq
