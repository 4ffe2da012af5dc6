// eosvac: spectra, variances, delay scans, density maps and duration sweeps.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "eosvac/cli.hpp"

using namespace eosvac;

int main(int argc, char** argv) {
  CLI::App app{"Electro-optic sampling of the polaritonic vacuum"};
  app.set_version_flag("--version", cli::version);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_file, preset, out_dir = ".", scan_file;
  unsigned threads = 0;
  std::vector<std::string> overrides;
  bool normalizations = false;
  auto* cfg_opt = app.add_option("--config", config_file, "INI configuration file");
  auto* preset_opt = app.add_option("--preset", preset, "shipped preset (riek2015, benea2019)");
  cfg_opt->excludes(preset_opt);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_option("--set", overrides, "override, section.key=value")->take_all();

  auto* spectrum = app.add_subcommand("spectrum", "s2(Omega) per component");
  spectrum->add_flag("--normalized", normalizations, "add s2/N^2 and s2/sqrt(C) columns");
  auto* variance = app.add_subcommand("variance", "integrated variances and ratios");
  auto* delay = app.add_subcommand("delay-scan", "synthesise a delay scan and invert it");
  auto* density = app.add_subcommand("density", "filter, correlation and density maps");
  auto* sweep = app.add_subcommand("sweep", "variance split over probe durations");
  auto* ingest = app.add_subcommand("ingest", "invert a measured delay scan");
  ingest->add_option("--file", scan_file, "scan file with header delay_fs,s2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::config_error;
  }

  try {
    if (config_file.empty() && preset.empty()) {
      throw Error(ErrorCode::ConfigError, "one of --config or --preset is required");
    }
    const auto cfg =
        config_file.empty() ? config::load_preset(preset, overrides) : config::load_file(config_file, overrides);

    cli::CommandResult result;
    if (spectrum->parsed()) result = cli::cmd_spectrum(cfg, threads, normalizations);
    else if (variance->parsed()) result = cli::cmd_variance(cfg, threads);
    else if (delay->parsed()) result = cli::cmd_delay_scan(cfg, threads);
    else if (density->parsed()) result = cli::cmd_density(cfg, threads);
    else if (sweep->parsed()) result = cli::cmd_sweep(cfg, threads);
    else result = cli::cmd_ingest(cfg, scan_file, threads);

    cli::write_outputs(out_dir, result.files);
    for (const auto& line : result.summary) std::cout << line << "\n";
    for (const auto& f : result.files) std::cout << "wrote " << f.name << "\n";
    return cli::ok;
  } catch (const Error& e) {
    std::cerr << "eosvac: " << e.what() << "\n";
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "eosvac: " << e.what() << "\n";
    return cli::config_error;
  }
}
