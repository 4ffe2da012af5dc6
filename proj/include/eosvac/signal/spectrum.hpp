#pragma once

// Spectrum assembly over an Omega grid and the integrated variance.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "eosvac/error.hpp"
#include "eosvac/signal/full_result.hpp"
#include "eosvac/signal/model.hpp"

namespace eosvac::signal {

enum class Component {
  full,
  laser_paraxial,
  taylor,
  paraxial,
  paraxial_cutoff,
  absorptive,
  absorptive_first,
  absorptive_second,
  longitudinal,
  transverse,
};

inline constexpr std::array<Component, 10> all_components = {
    Component::full,       Component::laser_paraxial,   Component::taylor,
    Component::paraxial,   Component::paraxial_cutoff,  Component::absorptive,
    Component::absorptive_first, Component::absorptive_second, Component::longitudinal,
    Component::transverse,
};

inline std::string to_string(Component c) {
  switch (c) {
    case Component::full: return "full";
    case Component::laser_paraxial: return "laser_paraxial";
    case Component::taylor: return "taylor";
    case Component::paraxial: return "paraxial";
    case Component::paraxial_cutoff: return "paraxial_cutoff";
    case Component::absorptive: return "absorptive";
    case Component::absorptive_first: return "absorptive_first";
    case Component::absorptive_second: return "absorptive_second";
    case Component::longitudinal: return "longitudinal";
    case Component::transverse: return "transverse";
  }
  return "unknown";
}

inline Component component_from_string(const std::string& s) {
  for (auto c : all_components) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorCode::ConfigError, "unknown component '" + s + "'");
}

struct SpectrumOptions {
  numerics::QuadratureSpec quadrature;
  FullResultOptions full;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;
};

inline PointValue evaluate_component(const SignalModel& m, Component c, double Omega, const SpectrumOptions& opt) {
  switch (c) {
    case Component::full: return s2_full(m, Omega, opt.full);
    case Component::laser_paraxial: return s2_laser_paraxial(m, Omega, opt.quadrature);
    case Component::taylor: return {s2_taylor(m, Omega), 0.0};
    case Component::paraxial: return {s2_paraxial(m, Omega), 0.0};
    case Component::paraxial_cutoff: return {s2_paraxial_cutoff(m, Omega), 0.0};
    case Component::absorptive: return s2_absorptive(m, Omega, AbsorptiveTerm::total, opt.quadrature);
    case Component::absorptive_first: return s2_absorptive(m, Omega, AbsorptiveTerm::first, opt.quadrature);
    case Component::absorptive_second: return s2_absorptive(m, Omega, AbsorptiveTerm::second, opt.quadrature);
    case Component::longitudinal: return s2_longitudinal(m, Omega, opt.quadrature);
    case Component::transverse: return s2_transverse(m, Omega, opt.quadrature);
  }
  return {};
}

/// s^2 on a strictly increasing Omega grid, one row of values per component.
struct SpectrumResult {
  std::vector<double> omegas;
  std::vector<Component> components;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> errors;

  std::size_t index_of(Component c) const {
    auto it = std::find(components.begin(), components.end(), c);
    if (it == components.end()) throw Error(ErrorCode::InvalidArgument, "component " + to_string(c) + " not computed");
    return static_cast<std::size_t>(it - components.begin());
  }
  const std::vector<double>& of(Component c) const { return values[index_of(c)]; }
  const std::vector<double>& error_of(Component c) const { return errors[index_of(c)]; }
};

inline void validate_grid(const std::vector<double>& omegas) {
  if (omegas.size() < 2) throw Error(ErrorCode::InvalidArgument, "Omega grid needs at least two points");
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (!(omegas[i] > omegas[i - 1])) throw Error(ErrorCode::InvalidArgument, "Omega grid must be strictly increasing");
  }
}

/// Runs `task(i)` for i in [0, n) on a pool of workers. Results are written
/// by index, so the output order never depends on scheduling. The exception
/// of the lowest failing index is rethrown.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::optional<std::size_t> failed_index;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

inline SpectrumResult compute_spectrum(const SignalModel& m, const std::vector<double>& omegas,
                                       const std::vector<Component>& components, const SpectrumOptions& opt = {}) {
  validate_grid(omegas);
  if (components.empty()) throw Error(ErrorCode::ConfigError, "no components requested");
  SpectrumResult out;
  out.omegas = omegas;
  out.components = components;
  out.values.assign(components.size(), std::vector<double>(omegas.size(), 0.0));
  out.errors.assign(components.size(), std::vector<double>(omegas.size(), 0.0));
  parallel_for(omegas.size(), opt.threads, [&](std::size_t i) {
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto v = evaluate_component(m, components[c], omegas[i], opt);
      out.values[c][i] = v.value;
      out.errors[c][i] = v.error;
    }
  });
  return out;
}

/// n points from lo to hi, equally spaced in log(Omega).
inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw Error(ErrorCode::InvalidArgument, "log grid needs 0 < lo < hi, n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  g.back() = hi;
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  if (!(hi > lo) || n < 2) throw Error(ErrorCode::InvalidArgument, "linear grid needs lo < hi, n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y, std::size_t stride = 1) {
  double s = 0.0;
  std::size_t last = 0;
  for (std::size_t i = stride; i < x.size(); i += stride) {
    s += 0.5 * (x[i] - x[i - stride]) * (y[i] + y[i - stride]);
    last = i;
  }
  // an odd leftover point is joined to the last coarse node
  if (last + 1 < x.size()) s += 0.5 * (x.back() - x[last]) * (y.back() + y[last]);
  return s;
}

struct VarianceResult {
  double value = 0.0;
  double halved = 0.0;  // same integral on every other grid point
  double rel_change() const {
    if (value == 0.0) return halved == 0.0 ? 0.0 : 1.0;
    return std::abs(halved - value) / std::abs(value);
  }
};

/// <:S^2:> = \int dOmega s^2 by the trapezoid rule; GridTooCoarse when the
/// grid-halving check moves the result by more than rel_tol.
inline VarianceResult variance(const std::vector<double>& omegas, const std::vector<double>& s2, double rel_tol) {
  validate_grid(omegas);
  if (s2.size() != omegas.size()) throw Error(ErrorCode::InvalidArgument, "spectrum and grid lengths differ");
  VarianceResult r{trapezoid(omegas, s2), trapezoid(omegas, s2, 2)};
  if (omegas.size() >= 3 && r.rel_change() > rel_tol) {
    throw Error(ErrorCode::GridTooCoarse, "grid halving changes the variance by " + std::to_string(r.rel_change()) +
                                              " (> " + std::to_string(rel_tol) + "); refine the Omega grid");
  }
  return r;
}

inline VarianceResult variance(const SpectrumResult& s, Component c, double rel_tol) {
  return variance(s.omegas, s.of(c), rel_tol);
}

inline VarianceResult variance(const SignalModel& m, Component c, const std::vector<double>& omegas, double rel_tol,
                               const SpectrumOptions& opt = {}) {
  return variance(compute_spectrum(m, omegas, {c}, opt), c, rel_tol);
}

}  // namespace eosvac::signal
