#pragma once

// Run configuration from INI files. Every physical key carries its unit in
// the name; unknown keys and missing required keys are errors.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/io/csv.hpp"
#include "eosvac/materials.hpp"
#include "eosvac/pulse.hpp"
#include "eosvac/scan.hpp"
#include "eosvac/signal/density.hpp"
#include "eosvac/signal/experiment.hpp"
#include "eosvac/signal/spectrum.hpp"
#include "eosvac/signal/sweep.hpp"

namespace eosvac::config {

struct GridSpec {
  bool log_spacing = true;
  double min = 0.0;  // rad/s
  double max = 0.0;
  int points = 0;

  std::vector<double> omegas() const {
    return log_spacing ? signal::log_grid(min, max, points) : signal::linear_grid(min, max, points);
  }
};

struct ScanSpec {
  double step = 0.0;  // s
  int half_points = 0;
  double taper_fraction = 0.0;
  double leakage_threshold = 1e-3;
  signal::Component component = signal::Component::absorptive;
};

struct SweepSpec {
  double min = 0.0;  // s
  double max = 0.0;
  int points = 0;
  std::string duration_mapping = "two_pi";
  bool thz_absorption = false;
  signal::SweepOptions options;

  std::vector<double> durations() const { return signal::log_grid(min, max, points); }
};

struct RunConfig {
  std::string preset;
  std::string source;  // file the configuration came from
  signal::ExperimentConfig experiment;
  GridSpec grid;
  std::vector<signal::Component> components;
  signal::SpectrumOptions spectrum;
  double variance_rel_tol = 2e-2;
  ScanSpec scan;
  signal::DensityOptions density_xy;
  signal::DensityOptions density_z_omega;
  SweepSpec sweep;
  std::string ingest_file;
  /// Flattened key/value pairs after overrides, in key order.
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::pair<std::string, std::string>> overrides;
};

namespace detail {

using boost::property_tree::ptree;

// key -> required (true) or optional
inline const std::map<std::string, bool>& schema() {
  static const std::map<std::string, bool> keys = {
      {"preset.name", true},
      {"crystal.length_um", true},
      {"crystal.temperature_K", true},
      {"beam.waist_um", true},
      {"laser.sellmeier_A", true},
      {"laser.sellmeier_B", true},
      {"laser.sellmeier_C_um2", true},
      {"laser.group_index", true},
      {"thz.model", true},
      {"thz.eps_inf", false},
      {"thz.omega_TO_thz", false},
      {"thz.omega_LO_thz", false},
      {"thz.gamma_thz", false},
      {"thz.absorption", false},
      {"thz.table", false},
      {"thz.absorption_scale", true},
      {"chi2.mode", true},
      {"chi2.constant_C_per_V2", false},
      {"chi2.r41_pm_per_V", false},
      {"chi2.C0", false},
      {"chi2.omega_TO_thz", false},
      {"chi2.gamma_thz", false},
      {"chi2.denominator", false},
      {"pulse.shape", true},
      {"pulse.center_thz", false},
      {"pulse.bandwidth_thz", false},
      {"pulse.duration_fs", false},
      {"pulse.table", false},
      {"pulse.photon_number", true},
      {"pulse.efficiency_table", false},
      {"grid.spacing", true},
      {"grid.min_thz", true},
      {"grid.max_thz", true},
      {"grid.points", true},
      {"spectrum.components", true},
      {"quadrature.rel_tol", true},
      {"quadrature.full_rel_tol", true},
      {"quadrature.full_omega_nodes", true},
      {"quadrature.full_radial_nodes", true},
      {"quadrature.full_angular_nodes", true},
      {"quadrature.full_psi_nodes", true},
      {"variance.rel_tol", true},
      {"scan.step_fs", true},
      {"scan.half_points", true},
      {"scan.taper_fraction", true},
      {"scan.leakage_threshold", true},
      {"scan.component", true},
      {"density.omega_thz", true},
      {"density.half_extent_um", true},
      {"density.points", true},
      {"density.z_min_um", true},
      {"density.z_max_um", true},
      {"density.z_points", true},
      {"density.omega_min_thz", true},
      {"density.omega_max_thz", true},
      {"density.omega_points", true},
      {"sweep.min_fs", true},
      {"sweep.max_fs", true},
      {"sweep.points", true},
      {"sweep.duration_mapping", true},
      {"sweep.thz_absorption", true},
      {"sweep.rel_tol", true},
      {"ingest.file", false},
  };
  return keys;
}

class Reader {
 public:
  Reader(std::map<std::string, std::string> values, std::filesystem::path base)
      : values_(std::move(values)), base_(std::move(base)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorCode::ConfigError, "missing key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const auto& s = text(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "key '" + key + "': not a number: '" + s + "'");
    }
  }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) throw Error(ErrorCode::ConfigError, "key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key) const {
    const auto& s = text(key);
    if (s == "true" || s == "1" || s == "on") return true;
    if (s == "false" || s == "0" || s == "off") return false;
    throw Error(ErrorCode::ConfigError, "key '" + key + "' must be true or false");
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> options) const {
    const auto& s = text(key);
    for (const char* o : options) {
      if (s == o) return s;
    }
    std::string all;
    for (const char* o : options) all += (all.empty() ? "" : ", ") + std::string(o);
    throw Error(ErrorCode::ConfigError, "key '" + key + "' must be one of {" + all + "}, got '" + s + "'");
  }

  std::string path(const std::string& key) const {
    std::filesystem::path p(text(key));
    return (p.is_absolute() ? p : base_ / p).string();
  }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_;
};

inline std::map<std::string, std::string> flatten(const ptree& tree) {
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorCode::ConfigError, "key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) out[section + "." + key] = io::trim(value.data());
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& item : io::split_commas(s)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline materials::ThzIndex read_thz(const Reader& r) {
  const auto model = r.choice("thz.model", {"phonon", "tabulated"});
  if (model == "tabulated") return materials::TabulatedIndex::from_csv_file(r.path("thz.table"));
  materials::PhononResonanceModel ph;
  ph.eps_inf = r.number("thz.eps_inf");
  ph.omega_TO = thz_to_rad(r.number("thz.omega_TO_thz"));
  ph.omega_LO = thz_to_rad(r.number("thz.omega_LO_thz"));
  ph.gamma = thz_to_rad(r.number("thz.gamma_thz"));
  ph.absorption_enabled = r.flag("thz.absorption");
  try {
    ph.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return ph;
}

inline materials::Chi2Model read_chi2(const Reader& r) {
  materials::Chi2Model chi;
  if (r.choice("chi2.mode", {"constant", "dispersive"}) == "constant") {
    chi.dispersive = false;
    chi.constant_value = r.number("chi2.constant_C_per_V2");
    return chi;
  }
  chi.dispersive = true;
  chi.r41 = r.number("chi2.r41_pm_per_V") * 1e-12;
  chi.C0 = r.number("chi2.C0");
  chi.omega_TO = thz_to_rad(r.number("chi2.omega_TO_thz"));
  chi.gamma = thz_to_rad(r.number("chi2.gamma_thz"));
  chi.denominator = r.choice("chi2.denominator", {"resonant", "as-printed"}) == "resonant"
                        ? materials::Chi2Denominator::resonant
                        : materials::Chi2Denominator::as_printed;
  return chi;
}

inline std::function<double(double)> read_efficiency(const std::string& file) {
  const auto rows = io::read_numeric_csv_file(file, {"freq_thz", "eta"});
  if (rows.size() < 2) throw Error(ErrorCode::ConfigError, "efficiency table needs at least two rows");
  std::vector<std::pair<double, double>> t;
  for (const auto& row : rows) t.emplace_back(thz_to_rad(row[0]), row[1]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i].first > t[i - 1].first)) throw Error(ErrorCode::ConfigError, "efficiency table must increase in frequency");
  }
  return [t](double w) {
    if (w <= t.front().first) return t.front().second;
    if (w >= t.back().first) return t.back().second;
    auto it = std::lower_bound(t.begin(), t.end(), w, [](const auto& p, double x) { return p.first < x; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lo.second + (w - lo.first) / (hi.first - lo.first) * (hi.second - lo.second);
  };
}

inline pulse::PulseSpectrum read_pulse(const Reader& r) {
  pulse::PulseSpectrum p;
  const auto shape = r.choice("pulse.shape", {"rectangular", "gaussian", "tabulated"});
  if (shape == "rectangular") {
    p.shape = pulse::Rectangular{thz_to_rad(r.number("pulse.center_thz")), thz_to_rad(r.number("pulse.bandwidth_thz"))};
  } else if (shape == "gaussian") {
    p.shape = pulse::Gaussian{thz_to_rad(r.number("pulse.center_thz")), r.number("pulse.duration_fs") * fs};
  } else {
    std::ifstream in(r.path("pulse.table"));
    if (!in) throw Error(ErrorCode::IoError, "cannot open pulse table '" + r.path("pulse.table") + "'");
    p.shape = pulse::read_tabulated_spectrum(in);
  }
  p.photon_number = r.number("pulse.photon_number");
  if (r.has("pulse.efficiency_table")) p.efficiency = read_efficiency(r.path("pulse.efficiency_table"));
  return p;
}

}  // namespace detail

/// Builds a RunConfig from an INI stream. `overrides` are `section.key=value`
/// strings applied before validation; relative paths resolve against `base`.
inline RunConfig parse(std::istream& in, const std::filesystem::path& base,
                       const std::vector<std::string>& overrides = {}, const std::string& source = "<stream>") {
  detail::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed configuration: ") + e.what());
  }
  auto values = detail::flatten(tree);

  RunConfig cfg;
  cfg.source = source;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigError, "override '" + o + "' is not key=value");
    const auto key = io::trim(o.substr(0, eq));
    const auto value = io::trim(o.substr(eq + 1));
    values[key] = value;
    cfg.overrides.emplace_back(key, value);
  }

  const auto& schema = detail::schema();
  for (const auto& [key, value] : values) {
    if (!schema.count(key)) throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
  }
  for (const auto& [key, required] : schema) {
    if (required && !values.count(key)) throw Error(ErrorCode::ConfigError, "missing required key '" + key + "'");
  }
  cfg.entries.assign(values.begin(), values.end());
  const detail::Reader r(values, base);

  cfg.preset = r.text("preset.name");
  auto& e = cfg.experiment;
  e.crystal_length = r.number("crystal.length_um") * um;
  e.temperature = r.number("crystal.temperature_K");
  e.beam_waist = r.number("beam.waist_um") * um;
  e.laser_index = {r.number("laser.sellmeier_A"), r.number("laser.sellmeier_B"), r.number("laser.sellmeier_C_um2")};
  if (r.text("laser.group_index") != "sellmeier") e.group_index_override = r.number("laser.group_index");
  e.thz_index = detail::read_thz(r);
  e.thz_absorption_scale = r.number("thz.absorption_scale");
  e.chi2 = detail::read_chi2(r);
  e.pulse = detail::read_pulse(r);
  e.pulse.beam_waist = e.beam_waist;
  try {
    e.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::ConfigError, err.what());
  }

  cfg.grid.log_spacing = r.choice("grid.spacing", {"log", "linear"}) == "log";
  cfg.grid.min = thz_to_rad(r.number("grid.min_thz"));
  cfg.grid.max = thz_to_rad(r.number("grid.max_thz"));
  cfg.grid.points = r.integer("grid.points");
  if (!(cfg.grid.max > cfg.grid.min) || cfg.grid.points < 2 || (cfg.grid.log_spacing && !(cfg.grid.min > 0.0))) {
    throw Error(ErrorCode::ConfigError, "grid needs min < max, points >= 2 and min > 0 for log spacing");
  }

  for (const auto& name : detail::split_list(r.text("spectrum.components"))) {
    cfg.components.push_back(signal::component_from_string(name));
  }
  if (cfg.components.empty()) throw Error(ErrorCode::ConfigError, "spectrum.components is empty");

  cfg.spectrum.quadrature.rel_tol = r.number("quadrature.rel_tol");
  cfg.spectrum.full.rel_tol = r.number("quadrature.full_rel_tol");
  cfg.spectrum.full.omega_nodes = r.integer("quadrature.full_omega_nodes");
  cfg.spectrum.full.radial_nodes = r.integer("quadrature.full_radial_nodes");
  cfg.spectrum.full.angular_nodes = r.integer("quadrature.full_angular_nodes");
  cfg.spectrum.full.psi_nodes = r.integer("quadrature.full_psi_nodes");
  if (!(cfg.spectrum.quadrature.rel_tol > 0.0) || !(cfg.spectrum.full.rel_tol > 0.0)) {
    throw Error(ErrorCode::ConfigError, "quadrature tolerances must be positive");
  }
  cfg.variance_rel_tol = r.number("variance.rel_tol");

  cfg.scan.step = r.number("scan.step_fs") * fs;
  cfg.scan.half_points = r.integer("scan.half_points");
  cfg.scan.taper_fraction = r.number("scan.taper_fraction");
  cfg.scan.leakage_threshold = r.number("scan.leakage_threshold");
  cfg.scan.component = signal::component_from_string(r.text("scan.component"));
  if (!(cfg.scan.step > 0.0) || cfg.scan.half_points < 1) {
    throw Error(ErrorCode::ConfigError, "scan needs step_fs > 0 and half_points >= 1");
  }

  auto& xy = cfg.density_xy;
  xy.plane = signal::Plane::xy;
  xy.omega = thz_to_rad(r.number("density.omega_thz"));
  xy.half_extent = r.number("density.half_extent_um") * um;
  xy.points = r.integer("density.points");
  auto& zw = cfg.density_z_omega;
  zw.plane = signal::Plane::z_omega;
  zw.z_min = r.number("density.z_min_um") * um;
  zw.z_max = r.number("density.z_max_um") * um;
  zw.z_points = r.integer("density.z_points");
  zw.omegas = signal::linear_grid(thz_to_rad(r.number("density.omega_min_thz")),
                                  thz_to_rad(r.number("density.omega_max_thz")), r.integer("density.omega_points"));

  cfg.sweep.min = r.number("sweep.min_fs") * fs;
  cfg.sweep.max = r.number("sweep.max_fs") * fs;
  cfg.sweep.points = r.integer("sweep.points");
  cfg.sweep.duration_mapping = r.choice("sweep.duration_mapping", {"two_pi", "unit"});
  cfg.sweep.options.time_bandwidth = cfg.sweep.duration_mapping == "two_pi" ? 2.0 * constants::pi : 1.0;
  cfg.sweep.thz_absorption = r.flag("sweep.thz_absorption");
  cfg.sweep.options.outer.rel_tol = r.number("sweep.rel_tol");
  cfg.sweep.options.inner.rel_tol = cfg.spectrum.quadrature.rel_tol;
  if (!(cfg.sweep.min > 0.0 && cfg.sweep.max > cfg.sweep.min) || cfg.sweep.points < 2) {
    throw Error(ErrorCode::ConfigError, "sweep needs 0 < min_fs < max_fs and points >= 2");
  }

  if (r.has("ingest.file")) cfg.ingest_file = r.path("ingest.file");
  return cfg;
}

inline RunConfig load_file(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open configuration '" + path + "'");
  return parse(in, std::filesystem::path(path).parent_path(), overrides, path);
}

/// Directory holding the shipped presets: $EOSVAC_PRESET_DIR, else the
/// compiled-in default.
inline std::string preset_directory() {
  if (const char* env = std::getenv("EOSVAC_PRESET_DIR")) return env;
#ifdef EOSVAC_PRESET_DIR
  return EOSVAC_PRESET_DIR;
#else
  return "presets";
#endif
}

inline RunConfig load_preset(const std::string& name, const std::vector<std::string>& overrides = {}) {
  if (name.empty() || name.find_first_of("/\\.") != std::string::npos) {
    throw Error(ErrorCode::ConfigError, "invalid preset name '" + name + "'");
  }
  const auto path = std::filesystem::path(preset_directory()) / (name + ".ini");
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "'");
  return load_file(path.string(), overrides);
}

/// Copy of the experiment used by the duration sweep: THz absorption is
/// switched on or off as configured.
inline signal::ExperimentConfig sweep_experiment(const RunConfig& cfg) {
  auto e = cfg.experiment;
  if (auto* ph = std::get_if<materials::PhononResonanceModel>(&e.thz_index)) {
    ph->absorption_enabled = cfg.sweep.thz_absorption;
  } else if (!cfg.sweep.thz_absorption) {
    e.thz_absorption_scale = 0.0;
  }
  return e;
}

}  // namespace eosvac::config
