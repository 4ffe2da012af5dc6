#pragma once

// Spatial and spectral maps of the filter, the ground-state correlation and
// their product.
//
// Filter:      |F| = (2 |chi| c mu0 N omega_p / (w^2 n))^2 f^2 e^{-(r^2 + r'^2)/w^2}
// Correlation: (2 hbar mu0 / pi) Omega^2 (1/2 + n_T) Im G_xx(r, r', Omega)
// Both are taken with r' at the origin. Each field is divided by its maximum
// modulus, so prefactors constant over a map drop out.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/greens.hpp"
#include "eosvac/signal/model.hpp"
#include "eosvac/signal/spectrum.hpp"

namespace eosvac::signal {

enum class Plane { xy, z_omega };

struct DensityOptions {
  Plane plane = Plane::xy;
  /// xy plane: fixed Omega and a square grid of half-width `half_extent`.
  double omega = thz_to_rad(300.0);
  double half_extent = 0.0;  // 0 means 2 w
  int points = 61;
  /// z-Omega plane: z from z_min to z_max (0 and 0 mean [0, L]).
  double z_min = 0.0;
  double z_max = 0.0;
  int z_points = 61;
  std::vector<double> omegas;  // empty means 71 points over [10, 150] THz
  numerics::QuadratureSpec quadrature{.rel_tol = 1e-6};
  unsigned threads = 0;
};

/// Fields are row-major with axis1 as the slow index: field[i * axis2.size() + j].
struct DensityMaps {
  Plane plane = Plane::xy;
  std::vector<double> axis1;  // x (m) or z (m)
  std::vector<double> axis2;  // y (m) or Omega (rad/s)
  std::vector<double> filter;
  std::vector<double> correlation;
  std::vector<double> density;
  /// density * density_scale == filter * correlation
  double density_scale = 1.0;
};

namespace detail {

inline double normalize_in_place(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw Error(ErrorCode::DomainError, "density map field vanishes or is not finite on the requested grid");
  }
  for (double& x : v) x /= peak;
  return peak;
}

inline double correlation_weight(const SignalModel& m, double Omega) {
  return 2.0 * constants::hbar * constants::mu0 / constants::pi * Omega * Omega *
         (0.5 + materials::thermal_occupation(Omega, m.config().temperature));
}

inline double filter_weight(const SignalModel& m, double Omega, double n) {
  const double w = m.waist();
  const double amp = 2.0 * std::abs(m.chi2(Omega)) * constants::c * constants::mu0 * m.photon_number() * m.omega_p() /
                     (w * w * n);
  const double fv = m.f(Omega);
  return amp * amp * fv * fv;
}

inline double lossless_index(const SignalModel& m, double Omega) {
  const double n = m.n_thz_real(Omega);
  if (!(n > 0.0)) {
    throw Error(ErrorCode::DomainError, "density map needs Re n(Omega) > 0; " + std::to_string(rad_to_thz(Omega)) +
                                            " THz lies inside the reststrahlen band");
  }
  return n;
}

}  // namespace detail

inline DensityMaps density_maps(const SignalModel& m, const DensityOptions& opt = {}) {
  DensityMaps out;
  out.plane = opt.plane;
  const auto medium = greens::BulkMedium{[&m](double W) { return complex(m.n_thz_real(W), 0.0); }};
  const double w = m.waist();

  if (opt.plane == Plane::xy) {
    if (opt.points < 2) throw Error(ErrorCode::InvalidArgument, "density map needs at least two points per axis");
    detail::require_positive(opt.omega);
    detail::lossless_index(m, opt.omega);
    const double h = opt.half_extent > 0.0 ? opt.half_extent : 2.0 * w;
    out.axis1 = linear_grid(-h, h, opt.points);
    out.axis2 = out.axis1;
    const std::size_t n1 = out.axis1.size(), n2 = out.axis2.size();
    out.filter.resize(n1 * n2);
    out.correlation.resize(n1 * n2);
    const double cw = detail::correlation_weight(m, opt.omega);
    // Im G_xx is even in x and in y on a grid symmetric about the origin
    auto mirror = [](std::size_t i, std::size_t n) { return std::min(i, n - 1 - i); };
    std::vector<double> quadrant((n1 / 2 + 1) * (n2 / 2 + 1), 0.0);
    const std::size_t q2 = n2 / 2 + 1;
    parallel_for(n1 / 2 + 1, opt.threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < q2; ++j) {
        quadrant[i * q2 + j] = cw * greens::imag_green_xx(medium, {out.axis1[i], out.axis2[j], 0.0}, {0.0, 0.0, 0.0},
                                                          opt.omega, opt.quadrature);
      }
    });
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double x = out.axis1[i], y = out.axis2[j];
        out.filter[i * n2 + j] = std::exp(-(x * x + y * y) / (w * w));
        out.correlation[i * n2 + j] = quadrant[mirror(i, n1) * q2 + mirror(j, n2)];
      }
    }
  } else {
    if (opt.z_points < 2) throw Error(ErrorCode::InvalidArgument, "density map needs at least two z points");
    const double z0 = (opt.z_min == 0.0 && opt.z_max == 0.0) ? 0.0 : opt.z_min;
    const double z1 = (opt.z_min == 0.0 && opt.z_max == 0.0) ? m.length() : opt.z_max;
    out.axis1 = linear_grid(z0, z1, opt.z_points);
    out.axis2 = opt.omegas.empty() ? linear_grid(thz_to_rad(10.0), thz_to_rad(150.0), 71) : opt.omegas;
    validate_grid(out.axis2);
    const std::size_t n1 = out.axis1.size(), n2 = out.axis2.size();
    out.filter.resize(n1 * n2);
    out.correlation.resize(n1 * n2);
    std::vector<double> fw(n2), cw(n2);
    for (std::size_t j = 0; j < n2; ++j) {
      detail::require_positive(out.axis2[j]);
      fw[j] = detail::filter_weight(m, out.axis2[j], detail::lossless_index(m, out.axis2[j]));
      cw[j] = detail::correlation_weight(m, out.axis2[j]);
    }
    parallel_for(n1, opt.threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < n2; ++j) {
        out.filter[i * n2 + j] = fw[j];
        out.correlation[i * n2 + j] =
            cw[j] * greens::imag_green_xx(medium, {0.0, 0.0, out.axis1[i]}, {0.0, 0.0, 0.0}, out.axis2[j],
                                          opt.quadrature);
      }
    });
  }

  detail::normalize_in_place(out.filter);
  detail::normalize_in_place(out.correlation);
  out.density.resize(out.filter.size());
  for (std::size_t i = 0; i < out.density.size(); ++i) out.density[i] = out.filter[i] * out.correlation[i];
  out.density_scale = detail::normalize_in_place(out.density);
  return out;
}

}  // namespace eosvac::signal
