#pragma once

// Variance split into matter (longitudinal) and free-field (transverse)
// parts as the probe duration changes.

#include <algorithm>
#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/numerics/quadrature.hpp"
#include "eosvac/signal/model.hpp"
#include "eosvac/signal/spectrum.hpp"

namespace eosvac::signal {

struct SweepOptions {
  /// Rectangular spectra get delta_omega = time_bandwidth / delta_t.
  double time_bandwidth = 2.0 * constants::pi;
  numerics::QuadratureSpec outer{.rel_tol = 1e-4};
  numerics::QuadratureSpec inner{.rel_tol = 1e-6};
  unsigned threads = 0;
};

struct SweepRow {
  double delta_t = 0.0;
  double total = 0.0;
  double longitudinal = 0.0;
  double transverse = 0.0;
  double error = 0.0;
};

/// Copy of `cfg` whose pulse has duration delta_t and the same centre.
inline ExperimentConfig with_duration(const ExperimentConfig& cfg, double delta_t, double time_bandwidth) {
  if (!(delta_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "pulse duration must be positive");
  ExperimentConfig out = cfg;
  if (auto* r = std::get_if<pulse::Rectangular>(&out.pulse.shape)) {
    r->delta_omega = time_bandwidth / delta_t;
  } else if (auto* g = std::get_if<pulse::Gaussian>(&out.pulse.shape)) {
    g->delta_t = delta_t;
  } else {
    throw Error(ErrorCode::ConfigError, "a tabulated pulse spectrum has no duration to sweep");
  }
  return out;
}

namespace detail {

inline std::vector<double> sweep_breakpoints(const SignalModel& m, double hi) {
  std::vector<double> pts{0.0};
  if (const auto* ph = std::get_if<materials::PhononResonanceModel>(&m.config().thz_index)) {
    for (double x : {ph->omega_TO - 3.0 * ph->gamma, ph->omega_TO, ph->omega_TO + 3.0 * ph->gamma, ph->omega_LO}) {
      if (x > 0.0 && x < hi) pts.push_back(x);
    }
  }
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

inline SweepRow sweep_point(const ExperimentConfig& cfg, double delta_t, const SweepOptions& opt = {}) {
  const SignalModel m(with_duration(cfg, delta_t, opt.time_bandwidth));
  const auto [lo, hi] = m.config().pulse.support();
  const auto pts = detail::sweep_breakpoints(m, hi - lo);
  auto integrate = [&](auto&& fn) {
    return numerics::integrate_1d([&](double W) { return W > 0.0 ? fn(W) : 0.0; }, std::span<const double>(pts),
                                  opt.outer);
  };
  const auto total = integrate([&](double W) { return s2_absorptive(m, W, AbsorptiveTerm::total, opt.inner).value; });
  const auto lon = integrate([&](double W) { return s2_longitudinal(m, W, opt.inner).value; });
  return {delta_t, total.value, lon.value, total.value - lon.value, total.error + lon.error};
}

inline std::vector<SweepRow> duration_sweep(const ExperimentConfig& cfg, const std::vector<double>& delta_ts,
                                            const SweepOptions& opt = {}) {
  if (delta_ts.empty()) throw Error(ErrorCode::InvalidArgument, "duration sweep needs at least one duration");
  std::vector<SweepRow> rows(delta_ts.size());
  parallel_for(delta_ts.size(), opt.threads, [&](std::size_t i) { rows[i] = sweep_point(cfg, delta_ts[i], opt); });
  return rows;
}

}  // namespace eosvac::signal
