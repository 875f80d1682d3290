#include "polfreq/cli/runners.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <vector>

#include "polfreq/cli/svg.hpp"
#include "polfreq/constants.hpp"
#include "polfreq/errors.hpp"
#include "polfreq/estimation.hpp"
#include "polfreq/oracle.hpp"
#include "polfreq/rng.hpp"
#include "polfreq/tomography.hpp"

namespace polfreq::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json config_json(const RunConfig& cfg) {
  return ordered_json{
      {"spectrum",
       {{"omega0_rad_per_ps", cfg.omega0},
        {"delta_omega_rad_per_ps", cfg.delta_omega},
        {"wavelength_nm", cfg.wavelength_nm},
        {"coherence_time_ps", cfg.coherence_time_ps}}},
      {"preparation",
       {{"d", cfg.d}, {"delta_n", cfg.delta_n}, {"L_mm", cfg.L_mm}}},
      {"grid",
       {{"scheme", to_string(cfg.scheme)},
        {"n", cfg.grid_n},
        {"kappa", cfg.kappa}}},
      {"protocol",
       {{"dephasing", to_string(cfg.dephasing)},
        {"s_ps", cfg.s_ps},
        {"tomography", to_string(cfg.tomography)},
        {"counts_n", cfg.counts_n},
        {"rotation", to_string(cfg.rotation)},
        {"seed", cfg.seed}}},
      {"sweep",
       {{"taus", to_string(cfg.taus)},
        {"dense_n", cfg.dense_n},
        {"dense_span", cfg.dense_span},
        {"etas", to_string(cfg.etas)},
        {"eta_rad", cfg.eta_rad}}},
      {"fig4",
       {{"k_max", cfg.k_max},
        {"L_step_mm", cfg.L_step_mm},
        {"mc_seeds", cfg.mc_seeds}}},
      {"fit",
       {{"sigma", cfg.fit_sigma},
        {"n_points", cfg.fit_points},
        {"span_decay_constants", cfg.fit_span_decay},
        {"x0_mm", cfg.fit_x0_mm}}},
      {"output",
       {{"dir", cfg.out_dir},
        {"svg", cfg.write_svg},
        {"json", cfg.write_json}}},
  };
}

ordered_json rotation_json(const RotationRecord& record) {
  auto entry = [&](int r, int c) {
    return ordered_json::array({record.U(r, c).real(), record.U(r, c).imag()});
  };
  return ordered_json{
      {"mode", to_string(record.mode)},
      {"seed", record.seed},
      {"unitary_re_im",
       ordered_json::array({entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1)})},
  };
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const ordered_json& seeds, const ordered_json& results,
                    const std::vector<std::string>& outputs) {
  ordered_json doc;
  doc["command"] = command;
  doc["config"] = config_json(cfg);
  doc["seeds"] = seeds;
  if (!results.is_null()) doc["results"] = results;
  doc["outputs"] = outputs;
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
  if (!out) throw Error("cannot write manifest in " + cfg.out_dir);
  out << doc.dump(2) << '\n';
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

struct ProtocolRun {
  AliceState alice;
  Reference ref;
  WitnessCurve curve;
  WitnessMax wmax;
  double delta = 0.0;
};

ProtocolRun run_protocol(const RunConfig& cfg, const FrequencyGrid& grid, double L,
                         std::uint64_t rotation_seed, std::uint64_t tomo_seed,
                         const DelaySweep& sweep) {
  ProtocolRun run;
  run.alice =
      prepare_alice_state(cfg.preparation_at(L), grid, rotation_seed, cfg.rotation);
  run.ref = build_reference(run.alice.state, cfg.reference_options(tomo_seed));
  run.curve = local_distance_curve(run.alice.state, run.ref, sweep);
  run.curve.rotation_mode = run.alice.rotation.mode;
  run.curve.rotation_seed = run.alice.rotation.seed;
  if (cfg.tomography == TomographyMode::Counts) {
    run.curve.tomo_shots = cfg.counts_n;
    run.curve.tomo_seed = tomo_seed;
  }
  run.wmax = witness_max(run.curve, cfg.delta_omega, MaxMethod::FitEq9);
  run.curve.fit = run.wmax.fit;
  run.delta = delta_total(run.alice.state, run.ref.state);
  return run;
}

Series analytic_series(const RunConfig& cfg, double t,
                       const std::vector<double>& taus) {
  Series s;
  s.name = "analytic envelope";
  s.color = "#c0392b";
  s.dashed = true;
  for (double tau : taus) {
    s.x.push_back(delay_to_displacement_mm(tau));
    s.y.push_back(analytic_Delta_lorentzian(cfg.d, cfg.delta_omega, t, tau));
  }
  return s;
}

}  // namespace

int run_witness(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::uint64_t rot_seed = derive_seed(cfg.seed, kStreamRotation);
  std::uint64_t tomo_seed = derive_seed(cfg.seed, kStreamTomography);
  ordered_json seeds{{"master", cfg.seed},
                     {"rotation", rot_seed},
                     {"tomography", tomo_seed}};
  write_manifest(cfg, "witness", seeds, nullptr, {});

  FrequencyGrid grid = discretize(cfg.spectral_density(), cfg.grid_spec());
  ProtocolRun run = run_protocol(cfg, grid, cfg.L_mm, rot_seed, tomo_seed, cfg.sweep());
  double t = run.alice.params.t_ps;
  double eq10 = analytic_max_lorentzian(cfg.d, cfg.delta_omega, t);
  double quad = quad_correlation_integral(cfg.spectral_density(), t, cfg.d);

  std::vector<std::string> outputs = {"witness.csv", "grid.csv", "manifest.json"};
  write_witness_csv(out_path(cfg, "witness.csv"), run.curve);
  write_grid_csv(out_path(cfg, "grid.csv"), grid);
  if (cfg.write_json) {
    write_witness_json(out_path(cfg, "witness.json"), run.curve);
    outputs.push_back("witness.json");
  }
  if (cfg.write_svg) {
    std::vector<Series> chart;
    for (std::size_t ie = 0; ie < run.curve.eta.size(); ++ie) {
      Series s;
      char label[48];
      std::snprintf(label, sizeof label, "eta = %.4g rad", run.curve.eta[ie]);
      s.name = label;
      s.color = "#1f6fb2";
      for (std::size_t it = 0; it < run.curve.tau.size(); ++it) {
        s.x.push_back(delay_to_displacement_mm(run.curve.tau[it]));
        s.y.push_back(run.curve.at(ie, it));
      }
      chart.push_back(std::move(s));
    }
    chart.push_back(analytic_series(cfg, t, run.curve.tau));
    write_svg_chart(out_path(cfg, "witness.svg"), "Local trace-distance witness",
                    "displacement x (mm)", "Delta", chart);
    outputs.push_back("witness.svg");
  }

  ordered_json results{
      {"witness_max", run.wmax.value},
      {"method", run.wmax.fit.used_fallback ? "grid_max_fallback" : "fit_eq9"},
      {"zero_curve", run.wmax.zero_curve},
      {"delta_total", run.delta},
      {"analytic_max", eq10},
      {"quad_correlation_delta", quad},
      {"degenerate_basis", run.curve.degenerate_basis},
      {"t_ps", t},
      {"rotation", rotation_json(run.alice.rotation)},
  };
  write_manifest(cfg, "witness", seeds, results, outputs);

  std::printf("witness_max   = %.6f\n", run.wmax.value);
  std::printf("delta_total   = %.6f\n", run.delta);
  std::printf("analytic_max  = %.6f\n", eq10);
  std::printf("quad_delta    = %.6f\n", quad);
  return 0;
}

int run_fig3(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::uint64_t rot_seed = derive_seed(cfg.seed, kStreamRotation);
  std::uint64_t tomo_seed = derive_seed(cfg.seed, kStreamTomography);
  ordered_json seeds{{"master", cfg.seed},
                     {"rotation", rot_seed},
                     {"tomography", tomo_seed}};
  write_manifest(cfg, "fig3", seeds, nullptr, {});

  FrequencyGrid grid = discretize(cfg.spectral_density(), cfg.grid_spec());
  DelaySweep sweep = coarse_sweep(cfg.delta_omega);
  ProtocolRun run = run_protocol(cfg, grid, cfg.L_mm, rot_seed, tomo_seed, sweep);
  double t = run.alice.params.t_ps;

  std::vector<std::string> outputs = {"fig3.csv", "manifest.json"};
  write_witness_csv(out_path(cfg, "fig3.csv"), run.curve);
  if (cfg.write_json) {
    write_witness_json(out_path(cfg, "fig3.json"), run.curve);
    outputs.push_back("fig3.json");
  }
  if (cfg.write_svg) {
    std::vector<Series> chart;
    const char* palette[8] = {"#1f6fb2", "#2e8b57", "#8e44ad", "#d35400",
                              "#16a085", "#7f8c8d", "#2c3e50", "#c2820a"};
    for (std::size_t ie = 0; ie < run.curve.eta.size(); ++ie) {
      Series s;
      char label[48];
      std::snprintf(label, sizeof label, "eta = %zu pi/16", ie);
      s.name = label;
      s.color = palette[ie % 8];
      s.markers = true;
      for (std::size_t it = 0; it < run.curve.tau.size(); ++it) {
        s.x.push_back(delay_to_displacement_mm(run.curve.tau[it]));
        s.y.push_back(run.curve.at(ie, it));
      }
      chart.push_back(std::move(s));
    }
    chart.push_back(analytic_series(cfg, t, dense_taus(cfg.delta_omega, 481, 6.0)));
    write_svg_chart(out_path(cfg, "fig3.svg"),
                    "Witness versus delay for eight measurement bases",
                    "displacement x (mm)", "Delta", chart);
    outputs.push_back("fig3.svg");
  }

  ordered_json results{
      {"witness_max", run.wmax.value},
      {"delta_total", run.delta},
      {"eta_count", run.curve.eta.size()},
      {"tau_count", run.curve.tau.size()},
      {"degenerate_basis", run.curve.degenerate_basis},
      {"rotation", rotation_json(run.alice.rotation)},
  };
  write_manifest(cfg, "fig3", seeds, results, outputs);
  std::printf("witness_max = %.6f over %zu x %zu points\n", run.wmax.value,
              run.curve.eta.size(), run.curve.tau.size());
  return 0;
}

int run_fig4(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  ordered_json seeds{{"master", cfg.seed}};
  write_manifest(cfg, "fig4", seeds, nullptr, {});

  FrequencyGrid grid = discretize(cfg.spectral_density(), cfg.grid_spec());
  DelaySweep sweep = dense_sweep(cfg.delta_omega, cfg.dense_n, cfg.dense_span);

  std::vector<double> Ls, ts, sims, errs, eq10s, quads;
  for (int k = 0; k <= cfg.k_max; ++k) {
    double L = static_cast<double>(k) * cfg.L_step_mm;
    double t = cfg.preparation_at(L).t_ps;
    std::uint64_t rot_seed = derive_seed(cfg.seed, kStreamFig4Rotation + k);

    double sim = 0.0, err = 0.0;
    if (cfg.tomography == TomographyMode::Counts && cfg.mc_seeds > 1) {
      std::vector<double> values;
      for (int j = 0; j < cfg.mc_seeds; ++j) {
        std::uint64_t tomo_seed = derive_seed(
            cfg.seed, kStreamFig4Counts + static_cast<std::uint64_t>(k) * 10000 + j);
        values.push_back(
            run_protocol(cfg, grid, L, rot_seed, tomo_seed, sweep).wmax.value);
      }
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size() - 1);
      sim = mean;
      err = std::sqrt(var);
    } else {
      std::uint64_t tomo_seed = derive_seed(cfg.seed, kStreamFig4Counts + k);
      sim = run_protocol(cfg, grid, L, rot_seed, tomo_seed, sweep).wmax.value;
    }

    Ls.push_back(L);
    ts.push_back(t);
    sims.push_back(sim);
    errs.push_back(err);
    eq10s.push_back(analytic_max_lorentzian(cfg.d, cfg.delta_omega, t));
    quads.push_back(quad_correlation_integral(cfg.spectral_density(), t, cfg.d));
  }

  std::vector<std::string> outputs = {"fig4.csv", "manifest.json"};
  {
    std::ofstream out(out_path(cfg, "fig4.csv"));
    if (!out) throw Error("cannot write fig4.csv");
    out << "L_mm,t_ps,witness_sim,witness_err,eq10_theory,eq7_delta\n";
    char buf[64];
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      double row[6] = {Ls[i], ts[i], sims[i], errs[i], eq10s[i], quads[i]};
      for (int c = 0; c < 6; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
        out << buf << (c == 5 ? '\n' : ',');
      }
    }
  }
  if (cfg.write_svg) {
    Series sim{"simulated maximum", Ls, sims, "#2c3e50", false, true, errs};
    Series red{"reachable bound", Ls, eq10s, "#c0392b", false, false, {}};
    Series blue{"total distinguishability", Ls, quads, "#1f6fb2", true, false, {}};
    write_svg_chart(out_path(cfg, "fig4.svg"),
                    "Witness maximum versus crystal length", "L (mm)", "Delta",
                    {sim, red, blue});
    outputs.push_back("fig4.svg");
  }

  ordered_json results{{"L_mm", Ls},
                       {"witness_sim", sims},
                       {"witness_err", errs},
                       {"eq10_theory", eq10s},
                       {"eq7_delta", quads}};
  write_manifest(cfg, "fig4", seeds, results, outputs);
  for (std::size_t i = 0; i < Ls.size(); ++i)
    std::printf("L = %7.3f mm  witness = %.6f +- %.6f  bound = %.6f  delta = %.6f\n",
                Ls[i], sims[i], errs[i], eq10s[i], quads[i]);
  return 0;
}

int run_fit_linewidth(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::uint64_t fit_seed = derive_seed(cfg.seed, kStreamFit);
  ordered_json seeds{{"master", cfg.seed}, {"trace", fit_seed}};
  write_manifest(cfg, "fit-linewidth", seeds, nullptr, {});

  // Symmetric scan around the envelope center covering span_decay_constants
  // decay times on each side.
  double reach = cfg.fit_span_decay * kSpeedOfLight_mm_per_ps / (2.0 * cfg.delta_omega);
  std::vector<double> xs(cfg.fit_points);
  for (std::size_t i = 0; i < cfg.fit_points; ++i)
    xs[i] = cfg.fit_x0_mm - reach +
            2.0 * reach * static_cast<double>(i) / static_cast<double>(cfg.fit_points - 1);
  VisibilityTrace trace = synthesize_visibility(cfg.delta_omega, xs, cfg.fit_sigma,
                                                fit_seed, cfg.fit_x0_mm);
  LinewidthFit fit = fit_linewidth(trace);

  std::vector<std::string> outputs = {"linewidth.csv", "manifest.json"};
  write_trace_csv(out_path(cfg, "linewidth.csv"), trace);
  if (cfg.write_svg) {
    Series data{"synthesized trace", trace.x_mm, trace.vis, "#2c3e50", false, true, {}};
    Series model{"fitted envelope", {}, {}, "#c0392b", true, false, {}};
    for (double x : trace.x_mm) {
      model.x.push_back(x);
      model.y.push_back(fit.amplitude *
                        std::exp(-fit.delta_omega * 2.0 * std::abs(x - fit.x0_mm) /
                                 kSpeedOfLight_mm_per_ps));
    }
    write_svg_chart(out_path(cfg, "linewidth.svg"), "Visibility envelope fit",
                    "displacement x (mm)", "visibility", {data, model});
    outputs.push_back("linewidth.svg");
  }

  ordered_json results{{"coherence_time_ps", fit.coherence_time_ps},
                       {"stderr_ps", fit.stderr_ps},
                       {"delta_omega_rad_per_ps", fit.delta_omega},
                       {"x0_mm", fit.x0_mm},
                       {"amplitude", fit.amplitude},
                       {"ssr", fit.ssr},
                       {"true_coherence_time_ps", 1.0 / cfg.delta_omega}};
  write_manifest(cfg, "fit-linewidth", seeds, results, outputs);
  std::printf("coherence_time = %.4f +- %.4f ps (true %.4f)\n", fit.coherence_time_ps,
              fit.stderr_ps, 1.0 / cfg.delta_omega);
  return 0;
}

int run_tomography_demo(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  std::uint64_t rot_seed = derive_seed(cfg.seed, kStreamRotation);
  std::uint64_t tomo_seed = derive_seed(cfg.seed, kStreamTomography);
  ordered_json seeds{{"master", cfg.seed},
                     {"rotation", rot_seed},
                     {"tomography", tomo_seed}};
  write_manifest(cfg, "tomography-demo", seeds, nullptr, {});

  FrequencyGrid grid = discretize(cfg.spectral_density(), cfg.grid_spec());
  AliceState alice =
      prepare_alice_state(cfg.preparation(), grid, rot_seed, cfg.rotation);
  Mat2 rho = reduce_system(alice.state);
  CountRecord counts = simulate_counts(rho, cfg.counts_n, tomo_seed);
  Mat2 rho_hat = reconstruct(counts);
  double dist = trace_distance_qubit(rho, rho_hat);
  auto r_true = bloch_vector(rho);
  auto r_hat = bloch_vector(rho_hat);

  write_counts_csv(out_path(cfg, "counts.csv"), counts);
  ordered_json results{{"trace_distance", dist},
                       {"bloch_true", r_true},
                       {"bloch_reconstructed", r_hat},
                       {"shots", cfg.counts_n}};
  write_manifest(cfg, "tomography-demo", seeds, results,
                 {"counts.csv", "manifest.json"});
  std::printf("trace_distance(rho, rho_hat) = %.6f with %llu shots\n", dist,
              static_cast<unsigned long long>(cfg.counts_n));
  return 0;
}

int run_oracle_check(const RunConfig& cfg, bool corrupt_tolerance) {
  fs::create_directories(cfg.out_dir);
  std::uint64_t seed = derive_seed(cfg.seed, kStreamOracle);
  ordered_json seeds{{"master", cfg.seed}, {"oracle", seed}};
  write_manifest(cfg, "oracle-check", seeds, nullptr, {});

  double shrink = corrupt_tolerance ? 1e-9 : 1.0;
  double tol_embed = 1e-14 * shrink;
  double tol_equiv = 1e-11 * shrink;
  double tol_pair = 1e-12 * shrink;
  double tol_comm = 1e-12 * shrink;
  double tol_quad = 2e-5 * shrink;

  int failures = 0;
  auto report = [&](const std::string& name, double err, double tol) {
    bool ok = err <= tol;
    if (!ok) ++failures;
    std::printf("%s %s  err=%.3e tol=%.3e\n", ok ? "ok  " : "FAIL", name.c_str(), err,
                tol);
  };

  for (std::size_t n : {8u, 32u, 64u}) {
    // Quantile nodes with equal weights: a legal grid small enough to embed.
    FrequencyGrid grid;
    grid.omega0 = cfg.omega0;
    for (std::size_t i = 0; i < n; ++i) {
      double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5;
      grid.omega.push_back(cfg.omega0 + cfg.delta_omega * std::tan(kPi * u));
      grid.weight.push_back(1.0 / static_cast<double>(n));
    }
    validate_grid(grid);

    AliceState alice = prepare_alice_state(cfg.preparation(), grid,
                                           derive_seed(seed, n), cfg.rotation);
    ReferenceOptions opts;  // exact projective reference for the certificate
    Reference ref = build_reference(alice.state, opts);

    DenseJointState dense_alice = dense_embed(alice.state);
    DenseJointState dense_ref = dense_embed(ref.state);

    JointBlockState back = dense_extract_blocks(dense_alice);
    double embed_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      embed_err = std::max(
          embed_err, (back.block[i] - alice.state.block[i]).cwiseAbs().maxCoeff());
    report("embed_round_trip_n" + std::to_string(n), embed_err, tol_embed);

    double reduce_err =
        (dense_reduce_system(dense_alice) - reduce_system(alice.state))
            .cwiseAbs()
            .maxCoeff();
    report("reduce_system_n" + std::to_string(n), reduce_err, tol_equiv);

    double equiv_err = 0.0;
    double t = alice.params.t_ps;
    for (double eta : {0.0, 0.59, 3.0 * kPi / 16.0}) {
      BasisSpec basis = basis_eta(eta);
      for (double tau : {0.0, 0.5 / cfg.delta_omega, -1.3 / cfg.delta_omega, t}) {
        double block_value = local_distance_single(alice.state, ref, basis, tau);
        Eigen::MatrixXcd u = dense_controlled_phase(grid, basis, tau);
        DenseJointState a = dense_alice, b = dense_ref;
        dense_apply_unitary(a, u);
        dense_apply_unitary(b, u);
        double dense_value =
            trace_norm_2x2(dense_reduce_system(a) - dense_reduce_system(b));
        equiv_err = std::max(equiv_err, std::abs(block_value - dense_value));
      }
    }
    report("delta_block_vs_dense_n" + std::to_string(n), equiv_err, tol_equiv);

    double joint_err = std::abs(2.0 * dense_trace_distance(dense_alice, dense_ref) -
                                delta_total(alice.state, ref.state));
    report("joint_distance_n" + std::to_string(n), joint_err, tol_equiv);

    report("eigenvalue_pairing_n" + std::to_string(n),
           dense_pairing_defect(dense_alice, dense_ref), tol_pair);
    report("zero_discord_commutator_n" + std::to_string(n),
           max_block_commutator(ref.state, ref.basis), tol_comm);
  }

  // Quadrature cross-checks against the closed-form correlation integral.
  SpectralDensity spec = cfg.spectral_density();
  double t_ref = cfg.preparation().t_ps;
  if (t_ref <= 0.0) t_ref = 2.2 / cfg.delta_omega;
  double closed = quad_correlation_integral(spec, t_ref, cfg.d);
  std::vector<double> kinks;
  for (int k = 1; k <= 4000; ++k) {
    double x = static_cast<double>(k) * kPi / (cfg.delta_omega * t_ref);
    if (x > 3000.0) break;
    kinks.push_back(spec.omega0 + cfg.delta_omega * x);
    kinks.push_back(spec.omega0 - cfg.delta_omega * x);
  }
  auto integrand = [&](double omega) {
    return std::abs(std::sin((omega - spec.omega0) * t_ref));
  };
  QuadResult coarse = adaptive_quad(integrand, spec, 1e-4, 1.0, kinks);
  QuadResult fine = adaptive_quad(integrand, spec, 1e-5, 1.0, kinks);
  report("adaptive_vs_closed_form", std::abs(2.0 * cfg.d * fine.value - closed),
         tol_quad);
  report("adaptive_two_tolerances", std::abs(fine.value - coarse.value),
         (1e-4 + 1e-5) * shrink);

  ordered_json results{{"failures", failures},
                       {"corrupt_tolerance", corrupt_tolerance}};
  write_manifest(cfg, "oracle-check", seeds, results, {"manifest.json"});
  std::printf("%s (%d failures)\n", failures == 0 ? "PASS" : "FAIL", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace polfreq::cli
