#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "polfreq/cli/config.hpp"
#include "polfreq/cli/runners.hpp"
#include "polfreq/errors.hpp"

namespace {

using polfreq::cli::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t grid_n = 0;
  bool seed_given = false;
  bool grid_n_given = false;
  bool exact_tomography = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file (key = value sections)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "master seed")
      ->each([&](const std::string&) { flags.seed_given = true; });
  cmd->add_option("--grid-n", flags.grid_n, "number of frequency bins")
      ->each([&](const std::string&) { flags.grid_n_given = true; });
  cmd->add_flag("--exact-tomography", flags.exact_tomography,
                "use the exact marginal instead of simulated counts");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) cfg = polfreq::cli::parse_config_file(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed_given) cfg.seed = flags.seed;
  if (flags.grid_n_given) cfg.grid_n = flags.grid_n;
  if (flags.exact_tomography) cfg.tomography = polfreq::cli::TomographyMode::Exact;
  polfreq::cli::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local detection of polarization-frequency correlations"};
  app.require_subcommand(1);

  CommonFlags witness_flags, fig3_flags, fig4_flags, fit_flags, tomo_flags, oracle_flags;
  bool corrupt_tolerance = false;

  CLI::App* witness = app.add_subcommand(
      "witness", "sweep the local trace-distance witness over delays");
  add_common(witness, witness_flags);

  CLI::App* fig3 = app.add_subcommand(
      "fig3", "witness curves for the eight standard measurement bases");
  add_common(fig3, fig3_flags);

  CLI::App* fig4 = app.add_subcommand(
      "fig4", "witness maximum versus crystal length with analytic bounds");
  add_common(fig4, fig4_flags);

  CLI::App* fit = app.add_subcommand(
      "fit-linewidth", "fit a coherence time to a synthesized visibility trace");
  add_common(fit, fit_flags);

  CLI::App* tomo = app.add_subcommand(
      "tomography-demo", "simulate Pauli counts and reconstruct the marginal");
  add_common(tomo, tomo_flags);

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "certify the block representation against dense arithmetic");
  add_common(oracle, oracle_flags);
  oracle->add_flag("--corrupt-tolerance", corrupt_tolerance)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (witness->parsed()) return polfreq::cli::run_witness(resolve(witness_flags));
    if (fig3->parsed()) return polfreq::cli::run_fig3(resolve(fig3_flags));
    if (fig4->parsed()) return polfreq::cli::run_fig4(resolve(fig4_flags));
    if (fit->parsed()) return polfreq::cli::run_fit_linewidth(resolve(fit_flags));
    if (tomo->parsed()) return polfreq::cli::run_tomography_demo(resolve(tomo_flags));
    if (oracle->parsed())
      return polfreq::cli::run_oracle_check(resolve(oracle_flags), corrupt_tolerance);
  } catch (const polfreq::cli::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const polfreq::GridResolutionError& e) {
    std::fprintf(stderr, "grid error: %s\n", e.what());
    return 3;
  } catch (const polfreq::NumericFailure& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const polfreq::FitFailure& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
