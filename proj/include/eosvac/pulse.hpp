#pragma once

// Probe-pulse spectra and the three functionals every signal formula is
// parameterised by: the mean detected frequency omega_p, the spectral
// autocorrelation f(Omega) and the detected photon number N.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/io/csv.hpp"
#include "eosvac/numerics/quadrature.hpp"

namespace eosvac::pulse {

/// Flat spectrum equal to one on [omega_c - delta_omega/2, omega_c + delta_omega/2].
struct Rectangular {
  double omega_c;
  double delta_omega;
};

/// E(w) = sigma^-1/2 exp(-(w - w_c)^2 / sigma^2) / (2 pi)^1/4, sigma = sqrt(2/pi) / delta_t.
struct Gaussian {
  double omega_c;
  double delta_t;
  double sigma() const { return std::sqrt(2.0 / constants::pi) / delta_t; }
};

/// Sampled amplitude, linear in between, zero outside the samples.
struct TabulatedSpectrum {
  std::vector<std::pair<double, double>> samples;  // (omega, amplitude)
};

using Shape = std::variant<Rectangular, Gaussian, TabulatedSpectrum>;

struct PulseSpectrum {
  Shape shape = Rectangular{thz_to_rad(255.0), thz_to_rad(75.0)};
  double photon_number = 1.0;
  double beam_waist = 3.0 * um;
  /// Detector efficiency eta(omega); empty means identically one.
  std::function<double(double)> efficiency;
  /// Multiplies the amplitude. Only N depends on it.
  double amplitude_scale = 1.0;

  double eta(double omega) const { return efficiency ? efficiency(omega) : 1.0; }
  bool unit_efficiency() const { return !efficiency; }

  void validate() const {
    if (!(photon_number > 0.0)) throw Error(ErrorCode::InvalidArgument, "photon number must be positive");
    if (!(beam_waist > 0.0)) throw Error(ErrorCode::InvalidArgument, "beam waist must be positive");
    if (const auto* r = std::get_if<Rectangular>(&shape)) {
      if (!(r->delta_omega > 0.0) || !(r->delta_omega < 2.0 * r->omega_c)) {
        throw Error(ErrorCode::InvalidArgument, "rectangular spectrum needs 0 < delta_omega < 2 omega_c");
      }
    } else if (const auto* g = std::get_if<Gaussian>(&shape)) {
      if (!(g->omega_c > 0.0) || !(g->delta_t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gaussian spectrum needs omega_c > 0 and delta_t > 0");
      }
    } else {
      const auto& t = std::get<TabulatedSpectrum>(shape);
      if (t.samples.size() < 2) throw Error(ErrorCode::InvalidArgument, "tabulated spectrum needs two samples");
      for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if (!(t.samples[i].first > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectrum support must be positive");
        if (i > 0 && !(t.samples[i].first > t.samples[i - 1].first)) {
          throw Error(ErrorCode::InvalidArgument, "tabulated spectrum must be strictly increasing in frequency");
        }
      }
    }
  }

  /// Spectral amplitude; zero for omega <= 0 and outside the support.
  double amplitude(double omega) const {
    if (omega <= 0.0) return 0.0;
    return amplitude_scale * std::visit([&](const auto& s) { return shape_amplitude(s, omega); }, shape);
  }

  /// Interval outside of which the amplitude is zero (or below 1e-35 of its
  /// peak for the Gaussian).
  std::pair<double, double> support() const {
    return std::visit(
        [](const auto& s) -> std::pair<double, double> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Rectangular>) {
            return {s.omega_c - 0.5 * s.delta_omega, s.omega_c + 0.5 * s.delta_omega};
          } else if constexpr (std::is_same_v<S, Gaussian>) {
            const double half = 9.0 * s.sigma();
            return {std::max(0.0, s.omega_c - half), s.omega_c + half};
          } else {
            return {s.samples.front().first, s.samples.back().first};
          }
        },
        shape);
  }

  double center() const {
    return std::visit(
        [](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, TabulatedSpectrum>) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 1; i < s.samples.size(); ++i) {
              const double dw = s.samples[i].first - s.samples[i - 1].first;
              const double a2 = 0.5 * (s.samples[i].second * s.samples[i].second +
                                       s.samples[i - 1].second * s.samples[i - 1].second);
              num += a2 * 0.5 * (s.samples[i].first + s.samples[i - 1].first) * dw;
              den += a2 * dw;
            }
            return num / den;
          } else {
            return s.omega_c;
          }
        },
        shape);
  }

 private:
  static double shape_amplitude(const Rectangular& s, double omega) {
    return std::abs(omega - s.omega_c) <= 0.5 * s.delta_omega ? 1.0 : 0.0;
  }
  static double shape_amplitude(const Gaussian& s, double omega) {
    const double sigma = s.sigma();
    const double x = (omega - s.omega_c) / sigma;
    return std::exp(-x * x) / (std::sqrt(sigma) * std::pow(2.0 * constants::pi, 0.25));
  }
  static double shape_amplitude(const TabulatedSpectrum& s, double omega) {
    const auto& v = s.samples;
    if (omega < v.front().first || omega > v.back().first) return 0.0;
    auto it = std::lower_bound(v.begin(), v.end(), omega, [](const auto& p, double w) { return p.first < w; });
    if (it->first == omega) return it->second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (omega - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
  }
};

/// Header `freq_thz,amplitude`.
inline TabulatedSpectrum read_tabulated_spectrum(std::istream& in) {
  auto rows = io::read_numeric_csv(in, {"freq_thz", "amplitude"});
  TabulatedSpectrum out;
  for (const auto& r : rows) out.samples.emplace_back(thz_to_rad(r[0]), r[1]);
  return out;
}

namespace detail {

inline numerics::QuadratureSpec functional_spec() {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  return spec;
}

// Breakpoints at the support edges and, for tabulated shapes, at every node
// (shifted by `shift`), so that kinks never sit inside a panel.
inline std::vector<double> breakpoints(const PulseSpectrum& p, double lo, double hi, double shift = 0.0) {
  std::vector<double> pts{lo, hi};
  auto add = [&](double x) {
    if (x > lo && x < hi) pts.push_back(x);
  };
  const auto [s_lo, s_hi] = p.support();
  add(s_lo);
  add(s_hi);
  add(s_lo - shift);
  add(s_hi - shift);
  add(s_lo + shift);
  add(s_hi + shift);
  if (const auto* t = std::get_if<TabulatedSpectrum>(&p.shape)) {
    for (const auto& s : t->samples) {
      add(s.first);
      add(s.first - shift);
      add(s.first + shift);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

/// int eta E^2 domega over the support.
inline double detected_energy_integral(const PulseSpectrum& p) {
  const auto [lo, hi] = p.support();
  if (p.unit_efficiency()) {
    if (const auto* r = std::get_if<Rectangular>(&p.shape)) {
      return p.amplitude_scale * p.amplitude_scale * r->delta_omega;
    }
  }
  const auto pts = detail::breakpoints(p, lo, hi);
  return numerics::integrate_1d(
             [&](double w) {
               const double e = p.amplitude(w);
               return p.eta(w) * e * e;
             },
             std::span<const double>(pts), detail::functional_spec())
      .value;
}

/// omega_p by adaptive quadrature of both moments.
inline double mean_detected_frequency_quadrature(const PulseSpectrum& p) {
  p.validate();
  const auto [lo, hi] = p.support();
  const auto pts = detail::breakpoints(p, lo, hi);
  const auto spec = detail::functional_spec();
  const double num = numerics::integrate_1d(
                         [&](double w) {
                           const double e = p.amplitude(w);
                           return p.eta(w) * e * e;
                         },
                         std::span<const double>(pts), spec)
                         .value;
  const double den = numerics::integrate_1d(
                         [&](double w) {
                           const double e = p.amplitude(w);
                           return p.eta(w) * e * e / w;
                         },
                         std::span<const double>(pts), spec)
                         .value;
  return num / den;
}

/// omega_p = int eta E^2 / int (eta / omega) E^2.
inline double mean_detected_frequency(const PulseSpectrum& p) {
  p.validate();
  if (p.unit_efficiency()) {
    if (const auto* r = std::get_if<Rectangular>(&p.shape)) {
      const double lo = r->omega_c - 0.5 * r->delta_omega;
      return r->delta_omega / std::log1p(r->delta_omega / lo);
    }
  }
  return mean_detected_frequency_quadrature(p);
}

/// f(Omega) by direct quadrature of the overlap integrals.
inline double spectral_autocorrelation_quadrature(const PulseSpectrum& p, double Omega) {
  p.validate();
  Omega = std::abs(Omega);
  const auto [lo, hi] = p.support();
  const auto spec = detail::functional_spec();
  const auto pts = detail::breakpoints(p, lo, hi, Omega);
  const double overlap = numerics::integrate_1d(
                             [&](double w) {
                               const double e = p.amplitude(w);
                               return e * (p.amplitude(w + Omega) + p.amplitude(w - Omega));
                             },
                             std::span<const double>(pts), spec)
                             .value;
  return overlap / (2.0 * detected_energy_integral(p));
}

/// Spectral autocorrelation f(Omega); even in Omega, f(0) = 1 for eta = 1.
/// Triangle (rectangular) and Gaussian closed forms are used when eta = 1.
inline double spectral_autocorrelation(const PulseSpectrum& p, double Omega) {
  p.validate();
  Omega = std::abs(Omega);
  if (p.unit_efficiency()) {
    if (const auto* r = std::get_if<Rectangular>(&p.shape)) {
      return std::max(0.0, 1.0 - Omega / r->delta_omega);
    }
    if (const auto* g = std::get_if<Gaussian>(&p.shape)) {
      const double sigma = g->sigma();
      if (g->omega_c > 9.0 * sigma) return std::exp(-Omega * Omega / (2.0 * sigma * sigma));
    }
  }
  return spectral_autocorrelation_quadrature(p, Omega);
}

/// Photon number implied by the current amplitude:
/// N = 4 pi eps0 c n(omega_c) int eta E^2 / (hbar omega).
inline double implied_photon_number(const PulseSpectrum& p, double n_center) {
  p.validate();
  const auto [lo, hi] = p.support();
  double integral = 0.0;
  if (p.unit_efficiency() && std::holds_alternative<Rectangular>(p.shape)) {
    integral = p.amplitude_scale * p.amplitude_scale * std::log1p((hi - lo) / lo);
  } else {
    const auto pts = detail::breakpoints(p, lo, hi);
    integral = numerics::integrate_1d(
                   [&](double w) {
                     const double e = p.amplitude(w);
                     return p.eta(w) * e * e / w;
                   },
                   std::span<const double>(pts), detail::functional_spec())
                   .value;
  }
  return 4.0 * constants::pi * constants::epsilon0 * constants::c * n_center * integral / constants::hbar;
}

/// Multiplicative amplitude scale that makes the implied photon number equal
/// the configured one. Signal formulas only see N, omega_p and f, so this is
/// a consistency check rather than an input.
inline double photon_number_scale(const PulseSpectrum& p, double n_center) {
  PulseSpectrum unit = p;
  unit.amplitude_scale = 1.0;
  return std::sqrt(p.photon_number / implied_photon_number(unit, n_center));
}

}  // namespace eosvac::pulse
