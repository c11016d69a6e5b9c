#include <catch2/catch.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "topochain/io/config.hpp"
#include "topochain/io/csv.hpp"
#include "topochain/io/manifest.hpp"
#include "topochain/io/runner.hpp"
#include "topochain/io/svg.hpp"

using namespace topochain;
using namespace topochain::io;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("topochain_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("csv_formatting_round_trips_doubles") {
  Table t;
  t.columns = {"x", "value"};
  const double tricky = 0.1 + 0.2;
  t.add_row({1.0, tricky});
  const std::string csv = to_csv(t);
  CHECK(csv.find("x,value\r\n") == 0);
  double parsed = 0.0;
  std::sscanf(csv.c_str() + csv.find("\r\n") + 2, "%*[^,],%lf", &parsed);
  CHECK(parsed == tricky);
}

TEST_CASE("csv_quotes_awkward_headers") {
  Table t;
  t.columns = {"plain", "with,comma", "with\"quote"};
  t.add_row({1, 2, 3});
  const std::string csv = to_csv(t);
  CHECK(csv.find("plain,\"with,comma\",\"with\"\"quote\"") == 0);
  CHECK_THROWS_AS(t.add_row({1.0}), ConfigError);
}

TEST_CASE("config_file_parsing") {
  const auto dir = temp_dir("config");
  const auto path = dir / "run.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "[run]\n"
        << "experiment = quench\n"
        << "seed = 9\n"
        << "formats = csv,svg\n"
        << "[chain]\n"
        << "cells = 5\n"
        << "intra = 0.3   ; trailing comment\n"
        << "[grid]\n"
        << "t1 = 42.5\n";
  }
  RunConfig cfg;
  load_config_file(cfg, path);
  CHECK(cfg.experiment == Experiment::quench);
  CHECK(cfg.seed == 9);
  CHECK(cfg.emit_csv);
  CHECK_FALSE(cfg.emit_json);
  CHECK(cfg.emit_svg);
  CHECK(cfg.chain.cells == 5);
  CHECK(cfg.chain.intra == 0.3);
  CHECK(cfg.grid.t1 == 42.5);
  cfg.validate();
}

TEST_CASE("config_rejects_unknown_keys_and_bad_values") {
  const auto dir = temp_dir("badconfig");
  {
    std::ofstream out(dir / "typo.cfg");
    out << "[chain]\nintera = 0.3\n";
  }
  RunConfig cfg;
  CHECK_THROWS_AS(load_config_file(cfg, dir / "typo.cfg"), ConfigError);
  {
    std::ofstream out(dir / "badnum.cfg");
    out << "[chain]\nintra = lots\n";
  }
  CHECK_THROWS_AS(load_config_file(cfg, dir / "badnum.cfg"), ConfigError);
  CHECK_THROWS_AS(load_config_file(cfg, dir / "missing.cfg"), ConfigError);
}

TEST_CASE("config_validation_rejects_degenerate_chain") {
  RunConfig cfg;
  cfg.experiment = Experiment::spectrum;
  cfg.chain.inter = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.chain.inter = 1.0;
  cfg.sweep_step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("svg_emission_is_deterministic") {
  Table t;
  t.columns = {"t", "site_01", "site_02"};
  for (int i = 0; i <= 10; ++i) t.add_row({0.1 * i, std::sin(0.1 * i), std::cos(0.1 * i)});
  const std::string once = render_line_plot(t);
  const std::string twice = render_line_plot(t);
  CHECK(once == twice);
  CHECK(once.find("<svg") == 0);
  CHECK(once.find("polyline") != std::string::npos);
  const std::string heat = render_heatmap(t);
  CHECK(heat.find("<svg") == 0);

  const auto dir = temp_dir("svg");
  emit_plot(t, PlotKind::line, dir / "plot.svg");
  CHECK(slurp(dir / "plot.svg") == once);

  Table empty;
  empty.columns = {"x", "y"};
  CHECK_THROWS_AS(emit_plot(empty, PlotKind::line, dir / "nope.svg"), ConfigError);
  CHECK_FALSE(std::filesystem::exists(dir / "nope.svg"));
}

TEST_CASE("manifest_digests") {
  CHECK(digest_hex("") == "cbf29ce484222325");  // FNV-1a offset basis
  RunManifest m;
  m.record_file("a.csv", "x,y\r\n1,2\r\n");
  CHECK(m.files.size() == 1);
  CHECK(m.files[0].bytes == 10);
  const auto j = m.to_json();
  CHECK(j["files"][0]["name"] == "a.csv");
  CHECK(j["generator"] == "mt19937_64/box-muller");
}

TEST_CASE("spectrum_run_writes_digested_files") {
  RunConfig cfg;
  cfg.experiment = Experiment::spectrum;
  cfg.chain = {4, 0.2, 1.0, 0.0, 0.0};
  cfg.sweep_min = 0.0;
  cfg.sweep_max = 0.4;
  cfg.sweep_step = 0.1;
  cfg.out_dir = temp_dir("spectrumrun").string();
  const RunResult result = execute(cfg);
  REQUIRE(std::filesystem::exists(result.dir / "manifest.json"));
  for (const auto& record : result.manifest.files) {
    const std::string bytes = slurp(result.dir / record.name);
    REQUIRE(bytes.size() == record.bytes);
    REQUIRE(digest_hex(bytes) == record.digest);
  }
  // Determinism: the same config reproduces every digest.
  cfg.out_dir = temp_dir("spectrumrun2").string();
  const RunResult again = execute(cfg);
  REQUIRE(again.manifest.files.size() == result.manifest.files.size());
  for (size_t i = 0; i < result.manifest.files.size(); ++i) {
    CHECK(again.manifest.files[i].name == result.manifest.files[i].name);
    CHECK(again.manifest.files[i].digest == result.manifest.files[i].digest);
  }
}

TEST_CASE("quench_run_respects_format_selection") {
  RunConfig cfg;
  cfg.experiment = Experiment::quench;
  cfg.chain = {4, 0.1, 1.0, 0.0, 0.0};
  cfg.grid = {0.0, 5.0, 100};
  cfg.record_stride = 10;
  cfg.emit_svg = false;
  cfg.emit_json = false;
  cfg.out_dir = temp_dir("quenchrun").string();
  const RunResult result = execute(cfg);
  for (const auto& record : result.manifest.files) {
    CHECK(record.name.find(".svg") == std::string::npos);
    CHECK(record.name.find(".json") == std::string::npos);
  }
  CHECK(std::filesystem::exists(result.dir / "quench_sigma_z.csv"));
}

TEST_CASE("invalid_run_config_leaves_no_files") {
  RunConfig cfg;
  cfg.experiment = Experiment::spectrum;
  cfg.chain.inter = 0.0;  // malformed
  cfg.out_dir = (std::filesystem::temp_directory_path() / "topochain_test_never").string();
  std::filesystem::remove_all(cfg.out_dir);
  CHECK_THROWS_AS(execute(cfg), ConfigError);
  CHECK_FALSE(std::filesystem::exists(cfg.out_dir));
}

TEST_CASE("presets_cover_every_data_figure") {
  const auto& list = presets();
  for (const char* name : {"fig3", "fig4", "fig5", "fig6", "fig7"}) {
    bool found = false;
    for (const auto& preset : list) found = found || preset.name == name;
    CHECK(found);
  }
  RunConfig cfg;
  apply_preset(cfg, "fig4");
  CHECK(cfg.experiment == Experiment::quench);
  CHECK(cfg.quench_both_chains);
  CHECK(cfg.disorder.coupling_sigma == 0.01);
  CHECK_THROWS_AS(apply_preset(cfg, "fig99"), ConfigError);
}

TEST_CASE("aah_run_emits_spectrum_sweep") {
  RunConfig cfg;
  cfg.experiment = Experiment::aah;
  cfg.aah_sites = 13;
  cfg.aah_phase_points = 8;
  cfg.out_dir = temp_dir("aahrun").string();
  const RunResult result = execute(cfg);
  const std::string csv = slurp(result.dir / "aah_spectrum_vs_phase.csv");
  CHECK(csv.find("phase,level_00") == 0);
  // 8 phase rows plus the header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("aah_golden_sweep_keeps_main_gap_open") {
  // Quasiperiodic modulation at the golden ratio: the spectrum stays inside
  // |E| <= omega + 2a and a dominant gap persists at every phase.
  const double golden = 0.6180339887498949;
  for (int i = 0; i < 16; ++i) {
    const double phase = 2.0 * M_PI * i / 16.0;
    const EigenSystem es = eigh_tridiagonal(build_aah(55, 1.0, 1.0, golden, phase));
    REQUIRE(es.values(0) >= -3.0);
    REQUIRE(es.values(54) <= 3.0);
    double largest_gap = 0.0;
    for (int k = 1; k < 55; ++k)
      largest_gap = std::max(largest_gap, es.values(k) - es.values(k - 1));
    REQUIRE(largest_gap > 0.5);
  }
}

TEST_CASE("spectrum_csv_has_one_level_column_per_site") {
  RunConfig cfg;
  cfg.experiment = Experiment::spectrum;
  cfg.chain = {7, 0.1, 1.0, 0.0, 0.0};
  cfg.sweep_min = 0.0;
  cfg.sweep_max = 2.0;
  cfg.sweep_step = 0.5;
  cfg.out_dir = temp_dir("speccsv").string();
  const RunResult result = execute(cfg);
  const std::string csv = slurp(result.dir / "spectrum_vs_a.csv");
  const std::string header = csv.substr(0, csv.find("\r\n"));
  CHECK(std::count(header.begin(), header.end(), ',') == 14);  // a + 14 levels
  CHECK(header.find("level_13") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 sweep rows
}

TEST_CASE("circuit_convergence_warning_follows_the_drift_rule") {
  RunConfig cfg;
  cfg.experiment = Experiment::circuit;
  cfg.circuit_params = CircuitParams::at_flux(0.2);
  cfg.circuit_feps_points = 2;
  cfg.circuit_falpha_points = 2;
  cfg.circuit_levels = 2;
  cfg.circuit_convergence_check = true;
  cfg.emit_svg = false;

  cfg.circuit_params.n_charge = 5;  // gap drifts ~1e-5 against cutoff 8
  cfg.out_dir = temp_dir("circuit5").string();
  CHECK_FALSE(execute(cfg).manifest.warnings.empty());

  cfg.circuit_params.n_charge = 8;  // already converged to ~3e-10
  cfg.out_dir = temp_dir("circuit8").string();
  CHECK(execute(cfg).manifest.warnings.empty());
}

TEST_CASE("config_falpha_key_ties_total_flux") {
  const auto dir = temp_dir("fluxtie");
  {
    std::ofstream out(dir / "tie.cfg");
    out << "[run]\nexperiment = circuit\n[circuit]\nf_alpha = 0.3\n";
  }
  RunConfig cfg;
  load_config_file(cfg, dir / "tie.cfg");
  CHECK(cfg.circuit_params.f_alpha == 0.3);
  CHECK(cfg.circuit_params.f_sigma == Approx(15.0));
  {
    std::ofstream out(dir / "untie.cfg");
    out << "[run]\nexperiment = circuit\n[circuit]\nf_alpha = 0.3\nf_sigma = 2.0\n";
  }
  RunConfig cfg2;
  load_config_file(cfg2, dir / "untie.cfg");
  CHECK(cfg2.circuit_params.f_sigma == 2.0);
}

TEST_CASE("cli_exit_codes") {
  const char* cli = std::getenv("TOPOCHAIN_CLI");
  if (cli == nullptr || std::string(cli).empty()) {
    WARN("TOPOCHAIN_CLI not set; skipping the exit-code check (run through ctest)");
    return;
  }
  const auto dir = temp_dir("cliexit");
  {
    std::ofstream out(dir / "bad.cfg");
    out << "[chain]\ninter = 0\n";
  }
  const std::string quiet = " > /dev/null 2>&1";
  const auto run = [&](const std::string& args) {
    const int status = std::system(('"' + std::string(cli) + "\" " + args + quiet).c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("spectrum --config \"" + (dir / "bad.cfg").string() + "\"") == 2);
  CHECK(run("spectrum --preset fig99") == 2);
  CHECK(run("--list-presets") == 0);
  // Malformed configs leave no output behind.
  CHECK(run("spectrum --config \"" + (dir / "bad.cfg").string() + "\" --out \"" +
            (dir / "never").string() + "\"") == 2);
  CHECK_FALSE(std::filesystem::exists(dir / "never"));
}
