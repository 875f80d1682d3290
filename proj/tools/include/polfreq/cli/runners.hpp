#pragma once

#include <string>

#include "polfreq/cli/config.hpp"

namespace polfreq::cli {

// Seed stream labels (master seed -> derived sub-seeds).
inline constexpr std::uint64_t kStreamRotation = 1;
inline constexpr std::uint64_t kStreamTomography = 2;
inline constexpr std::uint64_t kStreamFit = 3;
inline constexpr std::uint64_t kStreamOracle = 4;
inline constexpr std::uint64_t kStreamFig4Rotation = 100;
inline constexpr std::uint64_t kStreamFig4Counts = 1000;

// Each runner validates nothing (the config is already valid), computes, and
// writes its artifacts under cfg.out_dir; returns a process exit code.
int run_witness(const RunConfig& cfg);
int run_fig3(const RunConfig& cfg);
int run_fig4(const RunConfig& cfg);
int run_fit_linewidth(const RunConfig& cfg);
int run_tomography_demo(const RunConfig& cfg);
int run_oracle_check(const RunConfig& cfg, bool corrupt_tolerance);

}  // namespace polfreq::cli
