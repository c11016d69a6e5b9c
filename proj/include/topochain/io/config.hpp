#ifndef TOPOCHAIN_IO_CONFIG_HPP
#define TOPOCHAIN_IO_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topochain/circuit.hpp"
#include "topochain/dynamics.hpp"
#include "topochain/errors.hpp"
#include "topochain/lattice.hpp"

namespace topochain::io {

enum class Experiment { spectrum, quench, pump, circuit, aah };

inline std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::spectrum: return "spectrum";
    case Experiment::quench: return "quench";
    case Experiment::pump: return "pump";
    case Experiment::circuit: return "circuit";
    case Experiment::aah: return "aah";
  }
  return "unknown";
}

/// Resolved settings of one run. Field defaults are the documented
/// defaults of each subcommand; presets and config files override them.
struct RunConfig {
  Experiment experiment = Experiment::spectrum;
  std::string out_dir;  // empty -> config-hash-named folder under runs/
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = true;
  std::uint64_t seed = 1;

  ChainSpec chain{7, 0.1, 1.0, 0.0, 0.0};
  DisorderSpec disorder{};  // sigmas 0 by default; seed is taken from `seed`

  // spectrum: sweep of the intracell coupling
  double sweep_min = 0.0;
  double sweep_max = 2.0;
  double sweep_step = 0.02;

  // quench / pump time grid
  TimeGrid grid{0.0, 100.0, 10000};
  int record_stride = 10;
  bool quench_both_chains = false;

  // pump
  double pump_period = 100.0;
  double pump_u_amp = 1.0;
  int pump_cycles = 1;
  int pump_samples = 201;  // instantaneous-spectrum sampling
  double dt_max = 0.01;

  // aah
  int aah_sites = 55;
  double aah_coupling = 1.0;
  double aah_omega = 1.0;
  double aah_modulation = 0.6180339887498949;  // (sqrt(5)-1)/2
  int aah_phase_points = 64;

  // circuit
  CircuitParams circuit_params = CircuitParams::at_flux(0.2);
  double circuit_feps_span = 0.01;  // symmetric sweep in [-span, +span]
  int circuit_feps_points = 101;
  double circuit_falpha_min = 0.0;
  double circuit_falpha_max = 0.5;
  int circuit_falpha_points = 26;
  int circuit_levels = 6;
  bool circuit_convergence_check = false;

  void validate() const;
  nlohmann::json echo() const;
};

inline void RunConfig::validate() const {
  try {
    switch (experiment) {
      case Experiment::spectrum:
        chain.validate();
        if (!(sweep_step > 0.0) || sweep_max < sweep_min)
          throw InvalidSpecError("spectrum: sweep requires step > 0 and max >= min");
        break;
      case Experiment::quench:
        chain.validate();
        disorder.validate();
        grid.validate();
        if (record_stride < 1) throw InvalidSpecError("quench: record_stride must be >= 1");
        break;
      case Experiment::pump:
        if (chain.cells < 1) throw InvalidSpecError("pump: cells must be >= 1");
        disorder.validate();
        if (!(pump_period > 0.0)) throw InvalidSpecError("pump: period must be > 0");
        if (pump_u_amp == 0.0) throw InvalidSpecError("pump: u_amp must be nonzero");
        if (pump_cycles < 1) throw InvalidSpecError("pump: cycles must be >= 1");
        if (pump_samples < 2) throw InvalidSpecError("pump: need >= 2 spectrum samples");
        if (!(dt_max > 0.0)) throw InvalidSpecError("pump: dt_max must be > 0");
        break;
      case Experiment::circuit:
        circuit_params.validate();
        if (circuit_feps_points < 2 || circuit_falpha_points < 2)
          throw InvalidSpecError("circuit: sweeps need >= 2 points");
        if (!(circuit_feps_span > 0.0))
          throw InvalidSpecError("circuit: f_eps span must be > 0");
        if (circuit_levels < 2 || circuit_levels > 10)
          throw InvalidSpecError("circuit: levels must lie in 2..10");
        break;
      case Experiment::aah:
        if (aah_sites < 2) throw InvalidSpecError("aah: need at least 2 sites");
        if (!(aah_coupling > 0.0)) throw InvalidSpecError("aah: coupling must be > 0");
        if (aah_phase_points < 1) throw InvalidSpecError("aah: need >= 1 phase point");
        break;
    }
  } catch (const InvalidSpecError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

inline nlohmann::json RunConfig::echo() const {
  nlohmann::json j;
  j["run"] = {{"experiment", experiment_name(experiment)},
              {"seed", seed},
              {"formats", {{"csv", emit_csv}, {"json", emit_json}, {"svg", emit_svg}}}};
  j["chain"] = {{"cells", chain.cells},
                {"intra", chain.intra},
                {"inter", chain.inter},
                {"omega", chain.omega},
                {"stagger", chain.stagger}};
  j["disorder"] = {{"coupling_sigma", disorder.coupling_sigma},
                   {"frequency_sigma", disorder.frequency_sigma}};
  switch (experiment) {
    case Experiment::spectrum:
      j["sweep"] = {{"min", sweep_min}, {"max", sweep_max}, {"step", sweep_step}};
      break;
    case Experiment::quench:
      j["grid"] = {{"t0", grid.t0}, {"t1", grid.t1}, {"n_steps", grid.n_steps},
                   {"record_stride", record_stride}};
      j["quench"] = {{"both_chains", quench_both_chains}};
      break;
    case Experiment::pump:
      j["pump"] = {{"period", pump_period}, {"u_amp", pump_u_amp},
                   {"cycles", pump_cycles},  {"samples", pump_samples},
                   {"dt_max", dt_max},       {"record_stride", record_stride}};
      break;
    case Experiment::circuit:
      j["circuit"] = {{"ej", circuit_params.ej},
                      {"ej_over_ec", circuit_params.ej_over_ec},
                      {"alpha", circuit_params.alpha},
                      {"beta", circuit_params.beta},
                      {"f_alpha", circuit_params.f_alpha},
                      {"f_eps", circuit_params.f_eps},
                      {"f_sigma", circuit_params.f_sigma},
                      {"fluxoids", circuit_params.fluxoids},
                      {"fluxoid_diff", circuit_params.fluxoid_diff},
                      {"n_charge", circuit_params.n_charge},
                      {"feps_span", circuit_feps_span},
                      {"feps_points", circuit_feps_points},
                      {"falpha_min", circuit_falpha_min},
                      {"falpha_max", circuit_falpha_max},
                      {"falpha_points", circuit_falpha_points},
                      {"levels", circuit_levels},
                      {"convergence_check", circuit_convergence_check}};
      break;
    case Experiment::aah:
      j["aah"] = {{"sites", aah_sites},
                  {"coupling", aah_coupling},
                  {"omega", aah_omega},
                  {"modulation", aah_modulation},
                  {"phase_points", aah_phase_points}};
      break;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Key-value config files: `[section]` headers, `key = value` lines, `#` or
// `;` comments. Unknown keys are errors so typos fail loudly.
// ---------------------------------------------------------------------------

namespace cfgdetail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline double to_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace cfgdetail

inline Experiment parse_experiment(const std::string& name) {
  if (name == "spectrum") return Experiment::spectrum;
  if (name == "quench") return Experiment::quench;
  if (name == "pump") return Experiment::pump;
  if (name == "circuit") return Experiment::circuit;
  if (name == "aah") return Experiment::aah;
  throw ConfigError("unknown experiment '" + name + "'");
}

inline void apply_format_list(RunConfig& cfg, const std::string& list) {
  cfg.emit_csv = cfg.emit_json = cfg.emit_svg = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = cfgdetail::trim(item);
    if (item == "csv")
      cfg.emit_csv = true;
    else if (item == "json")
      cfg.emit_json = true;
    else if (item == "svg")
      cfg.emit_svg = true;
    else if (!item.empty())
      throw ConfigError("unknown output format '" + item + "'");
  }
  if (!cfg.emit_csv && !cfg.emit_json && !cfg.emit_svg)
    throw ConfigError("format list selects nothing");
}

inline void apply_config_entry(RunConfig& cfg, const std::string& section,
                               const std::string& key, const std::string& value) {
  using namespace cfgdetail;
  const std::string path = section + "." + key;
  if (path == "run.experiment") cfg.experiment = parse_experiment(value);
  else if (path == "run.seed") cfg.seed = static_cast<std::uint64_t>(to_int(path, value));
  else if (path == "run.out") cfg.out_dir = value;
  else if (path == "run.formats") apply_format_list(cfg, value);
  else if (path == "chain.cells") cfg.chain.cells = static_cast<int>(to_int(path, value));
  else if (path == "chain.intra") cfg.chain.intra = to_double(path, value);
  else if (path == "chain.inter") cfg.chain.inter = to_double(path, value);
  else if (path == "chain.omega") cfg.chain.omega = to_double(path, value);
  else if (path == "chain.stagger") cfg.chain.stagger = to_double(path, value);
  else if (path == "disorder.coupling_sigma") cfg.disorder.coupling_sigma = to_double(path, value);
  else if (path == "disorder.frequency_sigma") cfg.disorder.frequency_sigma = to_double(path, value);
  else if (path == "sweep.min") cfg.sweep_min = to_double(path, value);
  else if (path == "sweep.max") cfg.sweep_max = to_double(path, value);
  else if (path == "sweep.step") cfg.sweep_step = to_double(path, value);
  else if (path == "grid.t0") cfg.grid.t0 = to_double(path, value);
  else if (path == "grid.t1") cfg.grid.t1 = to_double(path, value);
  else if (path == "grid.n_steps") cfg.grid.n_steps = static_cast<int>(to_int(path, value));
  else if (path == "grid.record_stride") cfg.record_stride = static_cast<int>(to_int(path, value));
  else if (path == "quench.both_chains") cfg.quench_both_chains = to_bool(path, value);
  else if (path == "pump.period") cfg.pump_period = to_double(path, value);
  else if (path == "pump.u_amp") cfg.pump_u_amp = to_double(path, value);
  else if (path == "pump.cycles") cfg.pump_cycles = static_cast<int>(to_int(path, value));
  else if (path == "pump.samples") cfg.pump_samples = static_cast<int>(to_int(path, value));
  else if (path == "pump.dt_max") cfg.dt_max = to_double(path, value);
  else if (path == "aah.sites") cfg.aah_sites = static_cast<int>(to_int(path, value));
  else if (path == "aah.coupling") cfg.aah_coupling = to_double(path, value);
  else if (path == "aah.omega") cfg.aah_omega = to_double(path, value);
  else if (path == "aah.modulation") cfg.aah_modulation = to_double(path, value);
  else if (path == "aah.phase_points") cfg.aah_phase_points = static_cast<int>(to_int(path, value));
  else if (path == "circuit.ej") cfg.circuit_params.ej = to_double(path, value);
  else if (path == "circuit.ej_over_ec") cfg.circuit_params.ej_over_ec = to_double(path, value);
  else if (path == "circuit.alpha") cfg.circuit_params.alpha = to_double(path, value);
  else if (path == "circuit.beta") cfg.circuit_params.beta = to_double(path, value);
  else if (path == "circuit.f_alpha") {
    cfg.circuit_params.f_alpha = to_double(path, value);
    cfg.circuit_params.f_sigma = 50.0 * cfg.circuit_params.f_alpha;
  } else if (path == "circuit.f_eps") cfg.circuit_params.f_eps = to_double(path, value);
  else if (path == "circuit.f_sigma") cfg.circuit_params.f_sigma = to_double(path, value);
  else if (path == "circuit.fluxoids") cfg.circuit_params.fluxoids = static_cast<int>(to_int(path, value));
  else if (path == "circuit.fluxoid_diff") cfg.circuit_params.fluxoid_diff = static_cast<int>(to_int(path, value));
  else if (path == "circuit.n_charge") cfg.circuit_params.n_charge = static_cast<int>(to_int(path, value));
  else if (path == "circuit.feps_span") cfg.circuit_feps_span = to_double(path, value);
  else if (path == "circuit.feps_points") cfg.circuit_feps_points = static_cast<int>(to_int(path, value));
  else if (path == "circuit.falpha_min") cfg.circuit_falpha_min = to_double(path, value);
  else if (path == "circuit.falpha_max") cfg.circuit_falpha_max = to_double(path, value);
  else if (path == "circuit.falpha_points") cfg.circuit_falpha_points = static_cast<int>(to_int(path, value));
  else if (path == "circuit.levels") cfg.circuit_levels = static_cast<int>(to_int(path, value));
  else if (path == "circuit.convergence_check") cfg.circuit_convergence_check = to_bool(path, value);
  else throw ConfigError("unknown config key '" + path + "'");
}

inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = cfgdetail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed section");
      section = cfgdetail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = cfgdetail::trim(line.substr(0, eq));
    const std::string value = cfgdetail::trim(line.substr(eq + 1));
    apply_config_entry(cfg, section, key, value);
  }
}

}  // namespace topochain::io

#endif
