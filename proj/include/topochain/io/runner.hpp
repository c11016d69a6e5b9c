#ifndef TOPOCHAIN_IO_RUNNER_HPP
#define TOPOCHAIN_IO_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "topochain/circuit.hpp"
#include "topochain/dynamics.hpp"
#include "topochain/io/config.hpp"
#include "topochain/io/csv.hpp"
#include "topochain/io/manifest.hpp"
#include "topochain/io/svg.hpp"
#include "topochain/lattice.hpp"
#include "topochain/pumping.hpp"
#include "topochain/spectral.hpp"

namespace topochain::io {

namespace rundetail {

inline std::string index_label(const char* stem, int index, int pad = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", stem, pad, index);
  return buf;
}

// Staged outputs: nothing touches the disk until a run finished cleanly.
struct Emitter {
  RunConfig cfg;
  RunManifest manifest;
  std::vector<std::pair<std::string, std::string>> staged;

  explicit Emitter(const RunConfig& c) : cfg(c) {
    manifest.config_echo = c.echo();
    manifest.seed = c.seed;
  }

  void stage(const std::string& name, const std::string& content) {
    manifest.record_file(name, content);
    staged.emplace_back(name, content);
  }

  void csv(const std::string& name, const Table& table) {
    if (cfg.emit_csv) stage(name, to_csv(table));
  }
  void json(const std::string& name, const nlohmann::json& j) {
    if (cfg.emit_json) stage(name, j.dump(2) + "\n");
  }
  void plot(const std::string& name, const Table& table, PlotKind kind) {
    if (cfg.emit_svg)
      stage(name, kind == PlotKind::line ? render_line_plot(table) : render_heatmap(table));
  }

  std::filesystem::path flush() {
    const std::filesystem::path dir =
        cfg.out_dir.empty()
            ? std::filesystem::path("runs") /
                  (experiment_name(cfg.experiment) + "-" + digest_hex(manifest.config_echo.dump()))
            : std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : staged) write_file_atomic(dir / name, content);
    write_manifest(dir, manifest);
    return dir;
  }
};

inline Table trajectory_table(const Trajectory& traj) {
  Table t;
  t.columns.push_back("t");
  for (int s = 1; s <= traj.sites(); ++s) t.columns.push_back(index_label("site_", s));
  for (int r = 0; r < traj.samples(); ++r) {
    std::vector<double> row{traj.times(r)};
    for (int c = 0; c < traj.sites(); ++c) row.push_back(traj.sigma_z(r, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline DisorderSpec seeded_disorder(const RunConfig& cfg) {
  DisorderSpec d = cfg.disorder;
  d.seed = cfg.seed;
  return d;
}

}  // namespace rundetail

struct RunResult {
  std::filesystem::path dir;
  RunManifest manifest;
};

/// Eigenvalue sweep over the intracell coupling plus eigenstate and
/// <sigma^z> profiles at the configured slice and at the uniform point.
inline void run_spectrum(rundetail::Emitter& em) {
  const RunConfig& cfg = em.cfg;
  const int n = cfg.chain.sites();

  Table sweep;
  sweep.columns.push_back("a");
  for (int l = 0; l < n; ++l) sweep.columns.push_back(rundetail::index_label("level_", l));
  const int points = static_cast<int>(std::floor((cfg.sweep_max - cfg.sweep_min) / cfg.sweep_step + 1e-9)) + 1;
  for (int i = 0; i < points; ++i) {
    ChainSpec spec = cfg.chain;
    spec.intra = cfg.sweep_min + i * cfg.sweep_step;
    const EigenSystem es = eigh_tridiagonal(build_rice_mele(spec));
    std::vector<double> row{spec.intra};
    for (int l = 0; l < n; ++l) row.push_back(es.values(l));
    sweep.rows.push_back(std::move(row));
  }
  em.csv("spectrum_vs_a.csv", sweep);
  em.plot("spectrum_vs_a.svg", sweep, PlotKind::line);

  // Wave functions: the two central levels at the configured slice (the
  // mid-gap doublet in the topological phase) and a typical bulk state at
  // the uniform point a = b.
  const EigenSystem slice = eigh_tridiagonal(build_rice_mele(cfg.chain));
  ChainSpec uniform = cfg.chain;
  uniform.intra = uniform.inter;
  const EigenSystem bulk = eigh_tridiagonal(build_rice_mele(uniform));
  Table profiles, sigma_profiles;
  profiles.columns = {"site", "psi_mid_lower", "psi_mid_upper", "psi_bulk"};
  sigma_profiles.columns = {"site", "sz_mid_lower", "sz_mid_upper", "sz_bulk"};
  const Eigen::VectorXd lo = slice.vectors.col(n / 2 - 1);
  const Eigen::VectorXd up = slice.vectors.col(n / 2);
  const Eigen::VectorXd bk = bulk.vectors.col(n / 2);
  for (int s = 0; s < n; ++s) {
    profiles.add_row({double(s + 1), lo(s), up(s), bk(s)});
    sigma_profiles.add_row({double(s + 1), 2 * lo(s) * lo(s) - 1, 2 * up(s) * up(s) - 1,
                            2 * bk(s) * bk(s) - 1});
  }
  em.csv("state_profiles.csv", profiles);
  em.csv("sigma_z_profiles.csv", sigma_profiles);
  em.plot("sigma_z_profiles.svg", sigma_profiles, PlotKind::line);

  nlohmann::json edge;
  try {
    const EdgeModeReport report = find_edge_modes(slice, cfg.chain);
    edge = {{"found", true},
            {"lower_index", report.lower_index},
            {"upper_index", report.upper_index},
            {"splitting", report.splitting},
            {"xi_fit", report.xi_fit},
            {"xi_theory", report.xi_theory}};
  } catch (const NoEdgeModeError& e) {
    edge = {{"found", false}, {"reason", e.what()}};
  }
  em.json("edge_report.json", edge);
}

/// Quench after flipping qubit 1: <sigma_n^z(t)> heat-map data and the
/// site-1 trace, for the configured chain or for both reference chains.
inline void run_quench(rundetail::Emitter& em) {
  const RunConfig& cfg = em.cfg;
  struct Variant {
    std::string prefix;
    ChainSpec spec;
  };
  std::vector<Variant> variants;
  if (cfg.quench_both_chains) {
    ChainSpec ssh = cfg.chain;
    ChainSpec uniform = cfg.chain;
    uniform.intra = uniform.inter;
    variants.push_back({"ssh_", ssh});
    variants.push_back({"uniform_", uniform});
  } else {
    variants.push_back({"", cfg.chain});
  }
  for (const auto& variant : variants) {
    const TridiagonalHamiltonian h =
        apply_disorder(build_rice_mele(variant.spec), rundetail::seeded_disorder(cfg));
    Trajectory traj = evolve_static(h, initial_excitation(variant.spec.cells, 1), cfg.grid);
    // Thin to the record stride for emission.
    Trajectory thin;
    const int kept = (cfg.grid.n_steps / cfg.record_stride) + 1 +
                     ((cfg.grid.n_steps % cfg.record_stride) ? 1 : 0);
    thin.times.resize(kept);
    thin.sigma_z.resize(kept, traj.sites());
    int row = 0;
    for (int k = 0; k <= cfg.grid.n_steps; ++k) {
      if (k % cfg.record_stride == 0 || k == cfg.grid.n_steps) {
        thin.times(row) = traj.times(k);
        thin.sigma_z.row(row) = traj.sigma_z.row(k);
        ++row;
      }
    }
    thin.times.conservativeResize(row);
    thin.sigma_z.conservativeResize(row, traj.sites());

    const Table table = rundetail::trajectory_table(thin);
    em.csv(variant.prefix + "quench_sigma_z.csv", table);
    em.plot(variant.prefix + "quench_heatmap.svg", table, PlotKind::heatmap);
    Table site1;
    site1.columns = {"t", "site_01"};
    for (int r = 0; r < thin.samples(); ++r) site1.add_row({thin.times(r), thin.sigma_z(r, 0)});
    em.csv(variant.prefix + "quench_site1.csv", site1);
    em.plot(variant.prefix + "quench_site1.svg", site1, PlotKind::line);
  }
}

/// Pump cycle: clean instantaneous spectrum with the tracked branch, the
/// driven trajectory with frozen disorder, the adiabatic-fidelity trace,
/// and a transfer summary.
inline void run_pump(rundetail::Emitter& em) {
  const RunConfig& cfg = em.cfg;
  const int n = cfg.chain.sites();
  const PumpSchedule schedule = make_pump_schedule(cfg.pump_period, cfg.pump_u_amp);

  const InstantaneousSpectrum spectrum =
      instantaneous_spectrum(schedule, cfg.chain.cells, cfg.pump_samples);
  Table spec_table;
  spec_table.columns.push_back("t");
  for (int l = 0; l < n; ++l) spec_table.columns.push_back(rundetail::index_label("level_", l));
  spec_table.columns.push_back("tracked_index");
  spec_table.columns.push_back("tracked_level");
  for (int s = 0; s < cfg.pump_samples; ++s) {
    std::vector<double> row{spectrum.t_samples(s)};
    for (int l = 0; l < n; ++l) row.push_back(spectrum.levels(s, l));
    row.push_back(static_cast<double>(spectrum.edge_branch[s]));
    row.push_back(spectrum.tracked_level(s));
    spec_table.rows.push_back(std::move(row));
  }
  em.csv("pump_spectrum.csv", spec_table);
  em.plot("pump_spectrum.svg", spec_table, PlotKind::line);

  StepperConfig stepper;
  stepper.dt_max = cfg.dt_max;
  stepper.record_stride = cfg.record_stride;
  stepper.retain_states = true;
  const Trajectory traj = topochain::run_pump(cfg.chain.cells, schedule, cfg.pump_cycles,
                                              rundetail::seeded_disorder(cfg), stepper);
  const Table traj_table = rundetail::trajectory_table(traj);
  em.csv("pump_sigma_z.csv", traj_table);
  em.plot("pump_heatmap.svg", traj_table, PlotKind::heatmap);

  const std::vector<double> fidelity = adiabatic_fidelity(traj, schedule);
  Table fid_table;
  fid_table.columns = {"t", "fidelity"};
  for (int r = 0; r < traj.samples(); ++r) fid_table.add_row({traj.times(r), fidelity[r]});
  em.csv("pump_fidelity.csv", fid_table);
  em.plot("pump_fidelity.svg", fid_table, PlotKind::line);

  nlohmann::json summary;
  summary["period"] = cfg.pump_period;
  summary["cycles"] = cfg.pump_cycles;
  for (int k = 1; k <= cfg.pump_cycles; ++k) {
    const double t = k * cfg.pump_period;
    summary["transfer"].push_back({{"cycle", k},
                                   {"p_first", transfer_probability(traj, 1, t)},
                                   {"p_last", transfer_probability(traj, n, t)}});
  }
  em.json("pump_summary.json", summary);
}

/// Flux-qubit sweeps at the reference parameter set: levels and coupling
/// elements against f_eps, the tunable gap against f_alpha, and the
/// two-level reduction.
inline void run_circuit(rundetail::Emitter& em) {
  const RunConfig& cfg = em.cfg;
  const CircuitParams& base = cfg.circuit_params;

  Table levels, gperp, gpar;
  levels.columns.push_back("f_eps");
  for (int l = 0; l < cfg.circuit_levels; ++l)
    levels.columns.push_back(rundetail::index_label("level_", l));
  gperp.columns = {"f_eps", "g_perp"};
  gpar.columns = {"f_eps", "g_par", "current_ground", "current_excited"};
  for (int i = 0; i < cfg.circuit_feps_points; ++i) {
    CircuitParams p = base;
    p.f_eps = -cfg.circuit_feps_span +
              2.0 * cfg.circuit_feps_span * i / (cfg.circuit_feps_points - 1);
    const Eigen::VectorXd vals = qubit_spectrum(p, cfg.circuit_levels);
    std::vector<double> row{p.f_eps};
    for (int l = 0; l < cfg.circuit_levels; ++l) row.push_back(vals(l));
    levels.rows.push_back(std::move(row));
    const CouplingReport rep = coupling_elements(p);
    gperp.add_row({p.f_eps, rep.g_perp});
    gpar.add_row({p.f_eps, rep.g_par, rep.current_ground, rep.current_excited});
  }
  em.csv("circuit_levels_vs_feps.csv", levels);
  em.plot("circuit_levels_vs_feps.svg", levels, PlotKind::line);
  em.csv("circuit_gperp_vs_feps.csv", gperp);
  em.plot("circuit_gperp_vs_feps.svg", gperp, PlotKind::line);
  em.csv("circuit_gpar_vs_feps.csv", gpar);
  em.plot("circuit_gpar_vs_feps.svg", gpar, PlotKind::line);

  Table gaps;
  gaps.columns = {"f_alpha", "gap"};
  std::vector<double> f_alpha_values(cfg.circuit_falpha_points);
  for (int i = 0; i < cfg.circuit_falpha_points; ++i)
    f_alpha_values[i] = cfg.circuit_falpha_min +
                        (cfg.circuit_falpha_max - cfg.circuit_falpha_min) * i /
                            (cfg.circuit_falpha_points - 1);
  const Eigen::VectorXd gap_values = gap_vs_falpha(base, f_alpha_values);
  for (int i = 0; i < cfg.circuit_falpha_points; ++i)
    gaps.add_row({f_alpha_values[i], gap_values(i)});
  em.csv("circuit_gap_vs_falpha.csv", gaps);
  em.plot("circuit_gap_vs_falpha.svg", gaps, PlotKind::line);

  const QubitReduction red = two_level_reduction(base);
  em.json("circuit_two_level.json",
          {{"omega", red.omega},
           {"delta", red.delta},
           {"eps_bias", red.eps_bias},
           {"persistent_current", red.persistent_current}});

  if (cfg.circuit_convergence_check) {
    CircuitParams finer = base;
    finer.n_charge += 3;
    const Eigen::VectorXd coarse = qubit_spectrum(base, 2);
    const Eigen::VectorXd fine = qubit_spectrum(finer, 2);
    const double drift = std::abs((coarse(1) - coarse(0)) - (fine(1) - fine(0)));
    if (drift > 1e-6 * base.ej)
      em.manifest.warnings.push_back(
          "charge cutoff " + std::to_string(base.n_charge) + " not converged: gap drifts " +
          format_double(drift) + " against cutoff " + std::to_string(finer.n_charge));
  }
}

/// Frequency-modulated chain: eigenvalues against the modulation phase.
inline void run_aah(rundetail::Emitter& em) {
  const RunConfig& cfg = em.cfg;
  Table table;
  table.columns.push_back("phase");
  for (int l = 0; l < cfg.aah_sites; ++l)
    table.columns.push_back(rundetail::index_label("level_", l));
  for (int i = 0; i < cfg.aah_phase_points; ++i) {
    const double phase = 2.0 * M_PI * i / cfg.aah_phase_points;
    const EigenSystem es = eigh_tridiagonal(
        build_aah(cfg.aah_sites, cfg.aah_coupling, cfg.aah_omega, cfg.aah_modulation, phase));
    std::vector<double> row{phase};
    for (int l = 0; l < cfg.aah_sites; ++l) row.push_back(es.values(l));
    table.rows.push_back(std::move(row));
  }
  em.csv("aah_spectrum_vs_phase.csv", table);
  em.plot("aah_spectrum_vs_phase.svg", table, PlotKind::line);
}

/// Validate, dispatch, and write the staged outputs plus manifest.
inline RunResult execute(const RunConfig& cfg) {
  cfg.validate();
  rundetail::Emitter em(cfg);
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.experiment) {
    case Experiment::spectrum: run_spectrum(em); break;
    case Experiment::quench: run_quench(em); break;
    case Experiment::pump: run_pump(em); break;
    case Experiment::circuit: run_circuit(em); break;
    case Experiment::aah: run_aah(em); break;
  }
  em.manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunResult result;
  result.dir = em.flush();
  result.manifest = em.manifest;
  return result;
}

// ---------------------------------------------------------------------------
// Presets: one per reproduced data figure.
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  Experiment experiment;
  std::string description;
  std::function<void(RunConfig&)> apply;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = {
      {"fig3", Experiment::spectrum,
       "14-site chain: spectrum vs a in [0,2], mid-gap/bulk wave functions and sigma_z profiles",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::spectrum;
         cfg.chain = {7, 0.1, 1.0, 0.0, 0.0};
         cfg.sweep_min = 0.0;
         cfg.sweep_max = 2.0;
         cfg.sweep_step = 0.02;
       }},
      {"fig4", Experiment::quench,
       "quench of qubit 1: pinned soliton (a=0.1) vs ballistic spreading (a=b=1), 1% noise",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::quench;
         cfg.chain = {7, 0.1, 1.0, 0.0, 0.0};
         cfg.disorder.coupling_sigma = 0.01;
         cfg.disorder.frequency_sigma = 0.01;
         cfg.grid = {0.0, 100.0, 10000};
         cfg.record_stride = 10;
         cfg.quench_both_chains = true;
       }},
      {"fig5", Experiment::pump,
       "clean pump cycle T=100: instantaneous spectrum with tracked branch and transfer",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::pump;
         cfg.chain = {7, 0.0, 1.0, 0.0, 0.0};
         cfg.disorder = {};
         cfg.pump_period = 100.0;
         cfg.pump_u_amp = 1.0;
         cfg.pump_cycles = 1;
         cfg.record_stride = 10;
       }},
      {"fig6", Experiment::pump,
       "pump cycle T=100 with 1% quenched noise on couplings and frequencies",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::pump;
         cfg.chain = {7, 0.0, 1.0, 0.0, 0.0};
         cfg.disorder.coupling_sigma = 0.01;
         cfg.disorder.frequency_sigma = 0.01;
         cfg.pump_period = 100.0;
         cfg.pump_u_amp = 1.0;
         cfg.pump_cycles = 1;
         cfg.record_stride = 10;
       }},
      {"fig7", Experiment::circuit,
       "flux qubit at the reference working point: levels, tunable gap, g_par and g_perp",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::circuit;
         cfg.circuit_params = CircuitParams::at_flux(0.2);
         cfg.circuit_feps_span = 0.01;
         cfg.circuit_feps_points = 101;
         cfg.circuit_falpha_min = 0.0;
         cfg.circuit_falpha_max = 0.5;
         cfg.circuit_falpha_points = 26;
         cfg.circuit_levels = 6;
       }},
      {"aah-golden", Experiment::aah,
       "55-site golden-ratio modulated chain: spectrum swept over one phase period",
       [](RunConfig& cfg) {
         cfg.experiment = Experiment::aah;
         cfg.aah_sites = 55;
         cfg.aah_coupling = 1.0;
         cfg.aah_omega = 1.0;
         cfg.aah_modulation = 0.6180339887498949;
         cfg.aah_phase_points = 64;
       }},
  };
  return list;
}

inline void apply_preset(RunConfig& cfg, const std::string& name) {
  for (const auto& preset : presets()) {
    if (preset.name == name) {
      preset.apply(cfg);
      return;
    }
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace topochain::io

#endif
