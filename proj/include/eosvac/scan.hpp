#pragma once

// Delay scans and the cosine transform pair
//   S^2(dt)   = \int_0^inf dOmega s^2(Omega) cos(Omega dt)
//   s^2(|W|)  = (1/pi) \int dt S^2(dt) e^{i W dt}

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <string>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/io/csv.hpp"
#include "eosvac/signal/spectrum.hpp"

namespace eosvac::scan {

struct DelayScan {
  std::vector<double> delays;  // s, uniform
  std::vector<double> values;
  double dt_step = 0.0;
  /// Set when the input grid was non-uniform and has been interpolated.
  bool resampled = false;

  bool symmetric(double tol = 1e-9) const {
    const std::size_t n = delays.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(delays[i] + delays[n - 1 - i]) > tol * dt_step) return false;
    }
    return true;
  }

  void validate() const {
    if (delays.size() < 3 || values.size() != delays.size()) {
      throw Error(ErrorCode::InvalidArgument, "delay scan needs at least three (delay, value) pairs");
    }
    if (!(dt_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "delay step must be positive");
    for (std::size_t i = 1; i < delays.size(); ++i) {
      const double d = delays[i] - delays[i - 1];
      if (!(d > 0.0)) throw Error(ErrorCode::NonMonotoneDelays, "delays must be strictly increasing");
      if (std::abs(d - dt_step) > 1e-6 * dt_step) throw Error(ErrorCode::InvalidArgument, "delay grid is not uniform");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "delay scan value is not finite");
    }
  }
};

/// 2 n_half + 1 delays k dt, k = -n_half..n_half.
inline std::vector<double> symmetric_delays(double dt, int n_half) {
  if (!(dt > 0.0) || n_half < 1) throw Error(ErrorCode::InvalidArgument, "symmetric delay grid needs dt > 0, n_half >= 1");
  std::vector<double> d(2 * n_half + 1);
  for (int k = -n_half; k <= n_half; ++k) d[k + n_half] = k * dt;
  return d;
}

inline double max_abs_delay(const std::vector<double>& delays) {
  double m = 0.0;
  for (double t : delays) m = std::max(m, std::abs(t));
  return m;
}

/// Largest Omega spacing that still puts 8 points on each cos(Omega max|dt|)
/// oscillation.
inline double required_spacing(const std::vector<double>& delays) {
  const double t = max_abs_delay(delays);
  return t > 0.0 ? 2.0 * constants::pi / (8.0 * t) : std::numeric_limits<double>::infinity();
}

/// Linear grid from 0 to omega_max fine enough for `delays`. The first node
/// is Omega = 0, where every s^2 component vanishes.
inline std::vector<double> synthesis_grid(const std::vector<double>& delays, double omega_max) {
  if (!(omega_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "synthesis grid needs omega_max > 0");
  const auto intervals = static_cast<int>(std::ceil(omega_max / required_spacing(delays)));
  return signal::linear_grid(0.0, omega_max, std::max(intervals, 1) + 1);
}

/// S^2 at each delay by trapezoid quadrature over the spectrum grid.
inline DelayScan synthesize_delay_scan(const std::vector<double>& omegas, const std::vector<double>& s2,
                                       const std::vector<double>& delays) {
  signal::validate_grid(omegas);
  if (s2.size() != omegas.size()) throw Error(ErrorCode::InvalidArgument, "spectrum and grid lengths differ");
  if (delays.size() < 3) throw Error(ErrorCode::InvalidArgument, "delay scan needs at least three delays");
  double widest = 0.0;
  for (std::size_t i = 1; i < omegas.size(); ++i) widest = std::max(widest, omegas[i] - omegas[i - 1]);
  const double need = required_spacing(delays);
  if (widest > need * (1.0 + 1e-12)) {
    throw Error(ErrorCode::UnderresolvedSpectrum,
                "spectrum spacing " + std::to_string(rad_to_thz(widest)) + " THz exceeds the " +
                    std::to_string(rad_to_thz(need)) + " THz needed for 8 points per oscillation at max |dt|");
  }
  DelayScan out;
  out.delays = delays;
  out.dt_step = delays[1] - delays[0];
  out.values.resize(delays.size());
  std::vector<double> y(omegas.size());
  for (std::size_t j = 0; j < delays.size(); ++j) {
    for (std::size_t i = 0; i < omegas.size(); ++i) y[i] = s2[i] * std::cos(omegas[i] * delays[j]);
    out.values[j] = signal::trapezoid(omegas, y);
  }
  out.validate();
  return out;
}

inline DelayScan synthesize_delay_scan(const signal::SpectrumResult& spectrum, signal::Component c,
                                       const std::vector<double>& delays) {
  return synthesize_delay_scan(spectrum.omegas, spectrum.of(c), delays);
}

struct InversionOptions {
  /// Fraction of each scan end multiplied by a raised-cosine taper; 0 = no window.
  double taper_fraction = 0.0;
  /// Edge-to-peak ratio above which leakage is flagged.
  double leakage_threshold = 1e-3;
  signal::Component component = signal::Component::absorptive;
};

struct InvertedSpectrum {
  signal::SpectrumResult spectrum;
  /// max |Im transform| / max |Re transform|
  double imag_residue = 0.0;
  double edge_ratio = 0.0;
  bool leakage = false;
  std::vector<std::string> warnings;
};

inline std::vector<double> taper_weights(const DelayScan& scan, double fraction) {
  std::vector<double> w(scan.delays.size(), 1.0);
  if (fraction <= 0.0) return w;
  if (fraction > 0.5) throw Error(ErrorCode::InvalidArgument, "taper fraction must be <= 0.5");
  const double t0 = scan.delays.front(), t1 = scan.delays.back();
  const double span = fraction * (t1 - t0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double edge = std::min(scan.delays[i] - t0, t1 - scan.delays[i]);
    if (edge < span) w[i] = 0.5 * (1.0 - std::cos(constants::pi * edge / span));
  }
  return w;
}

/// s^2 on the conjugate grid 2 pi m / (N dt), m = 0..floor(N/2), by a
/// trapezoid-weighted direct transform.
inline InvertedSpectrum spectrum_from_delay_scan(const DelayScan& scan, const InversionOptions& opt = {}) {
  scan.validate();
  const std::size_t n = scan.delays.size();
  const double dt = scan.dt_step;
  const auto window = taper_weights(scan, opt.taper_fraction);

  InvertedSpectrum out;
  double peak = 0.0;
  for (double v : scan.values) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(scan.values.front()), std::abs(scan.values.back()));
  out.edge_ratio = peak > 0.0 ? edge / peak : 0.0;
  out.leakage = out.edge_ratio > opt.leakage_threshold;
  if (out.leakage) {
    out.warnings.push_back("scan edges reach " + std::to_string(out.edge_ratio) +
                           " of the peak; the spectrum carries truncation leakage");
  }
  if (!scan.symmetric()) out.warnings.push_back("delay grid is not symmetric about zero");

  const std::size_t bins = n / 2 + 1;
  auto& s = out.spectrum;
  s.components = {opt.component};
  s.omegas.resize(bins);
  s.values.assign(1, std::vector<double>(bins, 0.0));
  s.errors.assign(1, std::vector<double>(bins, 0.0));
  double re_peak = 0.0, im_peak = 0.0;
  for (std::size_t m = 0; m < bins; ++m) {
    const double W = 2.0 * constants::pi * static_cast<double>(m) / (static_cast<double>(n) * dt);
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wt = (j == 0 || j + 1 == n ? 0.5 : 1.0) * dt * window[j] * scan.values[j];
      re += wt * std::cos(W * scan.delays[j]);
      im += wt * std::sin(W * scan.delays[j]);
    }
    s.omegas[m] = W;
    s.values[0][m] = re / constants::pi;
    re_peak = std::max(re_peak, std::abs(re));
    im_peak = std::max(im_peak, std::abs(im));
  }
  out.imag_residue = re_peak > 0.0 ? im_peak / re_peak : 0.0;
  return out;
}

/// Uniform grid spanning the input at its smallest spacing, filled by linear
/// interpolation.
inline DelayScan resample_uniform(const std::vector<double>& t, const std::vector<double>& v) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) step = std::min(step, t[i] - t[i - 1]);
  const auto count = static_cast<std::size_t>(std::llround((t.back() - t.front()) / step)) + 1;
  DelayScan out;
  out.dt_step = (t.back() - t.front()) / static_cast<double>(count - 1);
  out.resampled = true;
  std::size_t k = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = t.front() + static_cast<double>(i) * out.dt_step;
    while (k + 2 < t.size() && t[k + 1] <= x) ++k;
    const double u = std::clamp((x - t[k]) / (t[k + 1] - t[k]), 0.0, 1.0);
    out.delays.push_back(x);
    out.values.push_back(v[k] + u * (v[k + 1] - v[k]));
  }
  return out;
}

/// Reads `delay_fs,s2` rows. Delays must strictly increase; a non-uniform
/// grid is resampled and flagged.
inline DelayScan ingest_experimental_scan(std::istream& in) {
  std::vector<double> t, v;
  for (const auto& row : io::read_numeric_csv(in, {"delay_fs", "s2"})) {
    t.push_back(row[0] * fs);
    v.push_back(row[1]);
  }
  if (t.size() < 3) throw Error(ErrorCode::FormatError, "scan file needs at least three rows");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw Error(ErrorCode::NonMonotoneDelays, "delays must be strictly increasing (row " + std::to_string(i + 1) + ")");
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    lo = std::min(lo, t[i] - t[i - 1]);
    hi = std::max(hi, t[i] - t[i - 1]);
  }
  DelayScan out;
  if (hi - lo <= 1e-6 * lo) {
    out.delays = std::move(t);
    out.values = std::move(v);
    out.dt_step = (out.delays.back() - out.delays.front()) / static_cast<double>(out.delays.size() - 1);
  } else {
    out = resample_uniform(t, v);
  }
  out.validate();
  return out;
}

/// Mirrors a one-sided scan starting at dt = 0 onto negative delays.
inline DelayScan even_extension(const DelayScan& scan) {
  scan.validate();
  if (scan.symmetric()) return scan;
  if (std::abs(scan.delays.front()) > 1e-9 * scan.dt_step) {
    throw Error(ErrorCode::InvalidArgument, "only scans that are symmetric or start at zero delay can be inverted");
  }
  DelayScan out = scan;
  out.delays.clear();
  out.values.clear();
  for (std::size_t i = scan.delays.size() - 1; i > 0; --i) {
    out.delays.push_back(-scan.delays[i]);
    out.values.push_back(scan.values[i]);
  }
  out.delays.insert(out.delays.end(), scan.delays.begin(), scan.delays.end());
  out.values.insert(out.values.end(), scan.values.begin(), scan.values.end());
  return out;
}

}  // namespace eosvac::scan
