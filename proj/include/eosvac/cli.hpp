#pragma once

// Command implementations behind the eosvac executable. Each command returns
// the files it would write so that tests can inspect them without touching
// the filesystem.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eosvac/config.hpp"
#include "eosvac/error.hpp"
#include "eosvac/scan.hpp"
#include "eosvac/signal/density.hpp"
#include "eosvac/signal/spectrum.hpp"
#include "eosvac/signal/sweep.hpp"

namespace eosvac::cli {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { ok = 0, config_error = 2, convergence_failure = 3, io_error = 4 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::GridTooCoarse:
      return convergence_failure;
    case ErrorCode::IoError:
    case ErrorCode::FormatError:
    case ErrorCode::NonMonotoneDelays:
      return io_error;
    default:
      return config_error;
  }
}

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  /// Human-readable lines for stdout.
  std::vector<std::string> summary;
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Commented header: version, command, preset, overrides, every resolved key
/// and the modelling choices that are not visible in the keys.
inline std::string metadata(const config::RunConfig& cfg, const std::string& command,
                            const std::vector<std::string>& extra = {}) {
  std::ostringstream os;
  os << "# eosvac " << version << "\n";
  os << "# command = " << command << "\n";
  os << "# preset = " << cfg.preset << "\n";
  os << "# source = " << std::filesystem::path(cfg.source).filename().string() << "\n";
  for (const auto& [k, v] : cfg.overrides) os << "# override " << k << " = " << v << "\n";
  for (const auto& [k, v] : cfg.entries) os << "# " << k << " = " << v << "\n";
  os << "# flag units = SI internally, frequencies in files are ordinary THz\n";
  os << "# flag prefactor_index = n(omega_c) from the laser Sellmeier model\n";
  os << "# flag taylor_partner = dk_plus\n";
  os << "# flag waist_symbol = beam waist w\n";
  os << "# flag longitudinal_thermal_weight = 2 n_T + 1\n";
  os << "# flag tabulated_interpolation = linear in Omega for n_re and alpha\n";
  os << "# flag absorptive_split = first/second without the n_g -> -n_g partner\n";
  os << "# flag fourier = s2(|W|) = (1/pi) int dt S2(dt) exp(i W dt)\n";
  for (const auto& line : extra) os << "# " << line << "\n";
  return os.str();
}

inline std::vector<std::string> model_notes(const signal::SignalModel& m) {
  std::vector<std::string> notes = {
      "n_center = " + num(m.n_center()),
      "group_index = " + num(m.group_index()),
      "omega_p_thz = " + num(rad_to_thz(m.omega_p())),
      "rayleigh_length_um = " + num(m.rayleigh().rayleigh_length / um),
  };
  for (const auto& w : m.warnings()) notes.push_back("warning: " + w);
  return notes;
}

inline CommandResult cmd_spectrum(const config::RunConfig& cfg, unsigned threads, bool normalizations) {
  const signal::SignalModel m(cfg.experiment);
  auto opt = cfg.spectrum;
  opt.threads = threads;
  const auto omegas = cfg.grid.omegas();
  const auto r = signal::compute_spectrum(m, omegas, cfg.components, opt);

  std::ostringstream os;
  auto notes = model_notes(m);
  if (normalizations) notes.push_back("s2_over_sqrtC uses sqrt(C) = 2 |chi2(Omega)| L omega_p N / (n eps0 c)");
  os << metadata(cfg, "spectrum", notes);
  os << "freq_thz,s2,err,component" << (normalizations ? ",s2_over_N2,s2_over_sqrtC" : "") << "\n";
  const double N = m.photon_number();
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    for (std::size_t c = 0; c < r.components.size(); ++c) {
      const double v = r.values[c][i];
      os << num(rad_to_thz(omegas[i])) << "," << num(v) << "," << num(r.errors[c][i]) << ","
         << signal::to_string(r.components[c]);
      if (normalizations) os << "," << num(v / (N * N)) << "," << num(v / m.sqrt_c_normalisation(omegas[i]));
      os << "\n";
    }
  }
  return {{{"spectrum.csv", os.str()}}, {"wrote " + std::to_string(omegas.size() * r.components.size()) + " rows"}};
}

inline CommandResult cmd_variance(const config::RunConfig& cfg, unsigned threads) {
  const signal::SignalModel m(cfg.experiment);
  auto opt = cfg.spectrum;
  opt.threads = threads;
  const auto omegas = cfg.grid.omegas();
  const auto r = signal::compute_spectrum(m, omegas, cfg.components, opt);

  const auto reference = std::find(cfg.components.begin(), cfg.components.end(), signal::Component::full) !=
                                 cfg.components.end()
                             ? signal::Component::full
                             : cfg.components.front();
  std::vector<signal::VarianceResult> v;
  for (auto c : r.components) v.push_back(signal::variance(r, c, cfg.variance_rel_tol));
  const double ref = v[r.index_of(reference)].value;

  CommandResult out;
  std::ostringstream os;
  auto notes = model_notes(m);
  notes.push_back("reference = " + signal::to_string(reference));
  os << metadata(cfg, "variance", notes);
  os << "component,variance,halved_grid,rel_change,ratio_to_reference\n";
  for (std::size_t c = 0; c < r.components.size(); ++c) {
    const double ratio = ref != 0.0 ? v[c].value / ref : 0.0;
    os << signal::to_string(r.components[c]) << "," << num(v[c].value) << "," << num(v[c].halved) << ","
       << num(v[c].rel_change()) << "," << num(ratio) << "\n";
    out.summary.push_back(signal::to_string(r.components[c]) + ": " + num(v[c].value) + " (ratio " + num(ratio) + ")");
  }
  out.files.push_back({"variance.csv", os.str()});
  return out;
}

inline CommandResult cmd_delay_scan(const config::RunConfig& cfg, unsigned threads) {
  const signal::SignalModel m(cfg.experiment);
  auto opt = cfg.spectrum;
  opt.threads = threads;
  const auto delays = scan::symmetric_delays(cfg.scan.step, cfg.scan.half_points);
  const auto grid = scan::synthesis_grid(delays, cfg.grid.max);
  // Omega = 0 carries s^2 = 0; every component needs Omega > 0
  const std::vector<double> positive(grid.begin() + 1, grid.end());
  const auto spec = signal::compute_spectrum(m, positive, {cfg.scan.component}, opt);
  std::vector<double> s2{0.0};
  s2.insert(s2.end(), spec.values[0].begin(), spec.values[0].end());
  const auto sc = scan::synthesize_delay_scan(grid, s2, delays);

  scan::InversionOptions inv_opt;
  inv_opt.taper_fraction = cfg.scan.taper_fraction;
  inv_opt.leakage_threshold = cfg.scan.leakage_threshold;
  inv_opt.component = cfg.scan.component;
  const auto inv = scan::spectrum_from_delay_scan(sc, inv_opt);

  // direct evaluation on the interior conjugate bins
  std::vector<double> bins;
  for (double W : inv.spectrum.omegas) {
    if (W > 0.0 && W < cfg.grid.max) bins.push_back(W);
  }
  std::vector<double> direct(bins.size(), 0.0);
  signal::parallel_for(bins.size(), threads, [&](std::size_t i) {
    direct[i] = signal::evaluate_component(m, cfg.scan.component, bins[i], opt).value;
  });
  double peak = 0.0, residual = 0.0;
  for (double v : s2) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    residual = std::max(residual, std::abs(inv.spectrum.values[0][i + 1] - direct[i]));
  }
  residual = peak > 0.0 ? residual / peak : 0.0;
  const double var = signal::trapezoid(grid, s2);

  std::vector<std::string> notes = model_notes(m);
  notes.push_back("component = " + signal::to_string(cfg.scan.component));
  notes.push_back("variance = " + num(var));
  notes.push_back("scan_at_zero_delay = " + num(sc.values[static_cast<std::size_t>(cfg.scan.half_points)]));
  notes.push_back("roundtrip_residual = " + num(residual));
  notes.push_back("imag_residue = " + num(inv.imag_residue));
  notes.push_back("edge_ratio = " + num(inv.edge_ratio));
  notes.push_back(std::string("leakage = ") + (inv.leakage ? "true" : "false"));
  for (const auto& w : inv.warnings) notes.push_back("warning: " + w);

  std::ostringstream a;
  a << metadata(cfg, "delay-scan", notes) << "delay_fs,s2\n";
  for (std::size_t j = 0; j < sc.delays.size(); ++j) a << num(sc.delays[j] / fs) << "," << num(sc.values[j]) << "\n";
  std::ostringstream b;
  b << metadata(cfg, "delay-scan", notes) << "freq_thz,s2_inverted,s2_direct,residual\n";
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const double v = inv.spectrum.values[0][i + 1];
    b << num(rad_to_thz(bins[i])) << "," << num(v) << "," << num(direct[i]) << "," << num(v - direct[i]) << "\n";
  }
  CommandResult out{{{"delay_scan.csv", a.str()}, {"delay_scan_spectrum.csv", b.str()}},
                    {"roundtrip residual " + num(residual), "S2(0) / variance " + num(sc.values[cfg.scan.half_points] / var)}};
  if (inv.leakage) out.summary.push_back("warning: " + inv.warnings.front());
  return out;
}

inline std::string density_table(const signal::DensityMaps& d) {
  std::ostringstream os;
  const bool xy = d.plane == signal::Plane::xy;
  os << (xy ? "x_um,y_um" : "z_um,freq_thz") << ",filter,correlation,density\n";
  const std::size_t n2 = d.axis2.size();
  for (std::size_t i = 0; i < d.axis1.size(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const double a2 = xy ? d.axis2[j] / um : rad_to_thz(d.axis2[j]);
      os << num(d.axis1[i] / um) << "," << num(a2) << "," << num(d.filter[i * n2 + j]) << ","
         << num(d.correlation[i * n2 + j]) << "," << num(d.density[i * n2 + j]) << "\n";
    }
  }
  return os.str();
}

inline CommandResult cmd_density(const config::RunConfig& cfg, unsigned threads) {
  const signal::SignalModel m(cfg.experiment);
  auto xy = cfg.density_xy;
  auto zw = cfg.density_z_omega;
  xy.threads = zw.threads = threads;
  xy.quadrature.rel_tol = zw.quadrature.rel_tol = cfg.spectrum.quadrature.rel_tol;
  const auto a = signal::density_maps(m, xy);
  const auto b = signal::density_maps(m, zw);
  auto notes = model_notes(m);
  notes.push_back("fields are normalised to unit maximum modulus; r' is the origin");
  return {{{"density_xy.csv", metadata(cfg, "density", notes) + density_table(a)},
           {"density_z_omega.csv", metadata(cfg, "density", notes) + density_table(b)}},
          {"wrote xy and z-Omega maps"}};
}

inline CommandResult cmd_sweep(const config::RunConfig& cfg, unsigned threads) {
  auto opt = cfg.sweep.options;
  opt.threads = threads;
  const auto rows = signal::duration_sweep(config::sweep_experiment(cfg), cfg.sweep.durations(), opt);
  std::ostringstream os;
  os << metadata(cfg, "sweep",
                 {"duration_mapping = " + cfg.sweep.duration_mapping + " (delta_omega = " +
                  num(cfg.sweep.options.time_bandwidth) + " / delta_t)"});
  os << "delta_t_fs,total,longitudinal,transverse,longitudinal_fraction,error\n";
  CommandResult out;
  for (const auto& r : rows) {
    const double frac = r.total != 0.0 ? r.longitudinal / r.total : 0.0;
    os << num(r.delta_t / fs) << "," << num(r.total) << "," << num(r.longitudinal) << "," << num(r.transverse) << ","
       << num(frac) << "," << num(r.error) << "\n";
  }
  out.files.push_back({"sweep.csv", os.str()});
  out.summary.push_back("wrote " + std::to_string(rows.size()) + " durations");
  return out;
}

inline CommandResult cmd_ingest(const config::RunConfig& cfg, const std::string& file, unsigned threads) {
  const std::string path = file.empty() ? cfg.ingest_file : file;
  if (path.empty()) throw Error(ErrorCode::ConfigError, "ingest needs --file or ingest.file");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scan file '" + path + "'");
  const auto raw = scan::ingest_experimental_scan(in);
  const auto sc = scan::even_extension(raw);

  scan::InversionOptions inv_opt;
  inv_opt.taper_fraction = cfg.scan.taper_fraction;
  inv_opt.leakage_threshold = cfg.scan.leakage_threshold;
  inv_opt.component = cfg.scan.component;
  const auto inv = scan::spectrum_from_delay_scan(sc, inv_opt);

  const signal::SignalModel m(cfg.experiment);
  auto opt = cfg.spectrum;
  std::vector<double> bins;
  for (double W : inv.spectrum.omegas) {
    if (W > 0.0 && W <= cfg.grid.max) bins.push_back(W);
  }
  std::vector<double> theory(bins.size(), 0.0);
  signal::parallel_for(bins.size(), threads, [&](std::size_t i) {
    theory[i] = signal::evaluate_component(m, cfg.scan.component, bins[i], opt).value;
  });

  std::vector<std::string> notes = model_notes(m);
  notes.push_back("scan_file = " + std::filesystem::path(path).filename().string());
  notes.push_back(std::string("resampled = ") + (raw.resampled ? "true" : "false"));
  notes.push_back(std::string("even_extended = ") + (sc.delays.size() != raw.delays.size() ? "true" : "false"));
  notes.push_back("imag_residue = " + num(inv.imag_residue));
  notes.push_back(std::string("leakage = ") + (inv.leakage ? "true" : "false"));
  for (const auto& w : inv.warnings) notes.push_back("warning: " + w);

  std::ostringstream a;
  a << metadata(cfg, "ingest", notes) << "delay_fs,s2\n";
  for (std::size_t j = 0; j < sc.delays.size(); ++j) a << num(sc.delays[j] / fs) << "," << num(sc.values[j]) << "\n";
  std::ostringstream b;
  b << metadata(cfg, "ingest", notes) << "freq_thz,s2_measured,s2_theory\n";
  for (std::size_t i = 0; i < bins.size(); ++i) {
    b << num(rad_to_thz(bins[i])) << "," << num(inv.spectrum.values[0][i + 1]) << "," << num(theory[i]) << "\n";
  }
  return {{{"ingested_scan.csv", a.str()}, {"ingested_spectrum.csv", b.str()}},
          {"ingested " + std::to_string(raw.delays.size()) + " delays" + (raw.resampled ? " (resampled)" : "")}};
}

inline void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& f : files) {
    const auto path = std::filesystem::path(dir) / f.name;
    std::ofstream out(path, std::ios::binary);
    out << f.content;
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  }
}

}  // namespace eosvac::cli
