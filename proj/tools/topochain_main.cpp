// Command-line front end: one subcommand per experiment, presets for the
// reference figures, deterministic outputs plus a run manifest.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "topochain/io/runner.hpp"
#include "topochain/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void list_presets() {
  std::printf("available presets:\n");
  for (const auto& preset : topochain::io::presets())
    std::printf("  %-12s (%s)  %s\n", preset.name.c_str(),
                topochain::io::experiment_name(preset.experiment).c_str(),
                preset.description.c_str());
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::string formats;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key-value config file (see README)");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--preset", flags.preset, "named preset, see --list-presets");
  cmd->add_option("--format", flags.formats, "comma list from csv,json,svg");
  cmd->add_option("--seed", flags.seed, "RNG seed for disorder draws")
      ->each([&flags](const std::string&) { flags.seed_given = true; });
}

int run(topochain::io::Experiment experiment, const CommonFlags& flags) {
  topochain::io::RunConfig cfg;
  cfg.experiment = experiment;
  if (!flags.preset.empty()) {
    topochain::io::apply_preset(cfg, flags.preset);
    if (cfg.experiment != experiment)
      throw topochain::ConfigError("preset '" + flags.preset + "' belongs to subcommand '" +
                                   topochain::io::experiment_name(cfg.experiment) + "'");
  }
  if (!flags.config_path.empty()) topochain::io::load_config_file(cfg, flags.config_path);
  if (cfg.experiment != experiment)
    throw topochain::ConfigError("config file switches the experiment; run the matching subcommand");
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.formats.empty()) topochain::io::apply_format_list(cfg, flags.formats);
  if (flags.seed_given) cfg.seed = flags.seed;

  const topochain::io::RunResult result = topochain::io::execute(cfg);
  std::printf("wrote %zu files to %s\n", result.manifest.files.size() + 1,
              result.dir.string().c_str());
  for (const auto& warning : result.manifest.warnings)
    std::fprintf(stderr, "warning: %s\n", warning.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation toolkit for a dimerized superconducting-qubit chain"};
  app.set_version_flag("--version", topochain::kVersion);
  bool want_presets = false;
  app.add_flag("--list-presets", want_presets, "list figure presets and exit");
  app.require_subcommand(0, 1);

  struct Sub {
    const char* name;
    const char* help;
    topochain::io::Experiment experiment;
  };
  const Sub subs[] = {
      {"spectrum", "eigenvalue sweep and edge-state diagnostics", topochain::io::Experiment::spectrum},
      {"quench", "time evolution after flipping qubit 1", topochain::io::Experiment::quench},
      {"pump", "adiabatic pump cycle of the modulated chain", topochain::io::Experiment::pump},
      {"circuit", "flux-qubit circuit sweeps and two-level reduction", topochain::io::Experiment::circuit},
      {"aah", "frequency-modulated chain spectrum sweep", topochain::io::Experiment::aah},
  };
  CommonFlags flags[5];
  CLI::App* cmds[5];
  for (int i = 0; i < 5; ++i) {
    cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
    add_common_flags(cmds[i], flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (want_presets) {
    list_presets();
    return kExitOk;
  }
  try {
    for (int i = 0; i < 5; ++i)
      if (cmds[i]->parsed()) return run(subs[i].experiment, flags[i]);
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return kExitConfig;
  } catch (const topochain::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const topochain::InvalidSpecError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
