#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"

namespace eosvac::numerics {

/// sin(x)/x, with the Taylor series below |x| = 1e-4.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

inline std::complex<double> sinc(std::complex<double> z) {
  if (std::abs(z) < 1e-4) {
    const auto z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

namespace detail {

inline constexpr double gamma_crossover = 1.0;

// E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
inline double e1_series(double z) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return -constants::euler_gamma - std::log(z) - sum;
}

// e^z E1(z) by the modified Lentz continued fraction.
inline double scaled_e1_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return h;
  }
  throw NonConvergence("continued fraction for E1 did not converge at z = " + std::to_string(z), h, 0.0);
}

}  // namespace detail

/// Upper incomplete gamma of order zero, Gamma(0, z) = int_z^inf e^-t / t dt
/// (the exponential integral E1). Series below z = 1, continued fraction above.
inline double upper_incomplete_gamma0(double z) {
  if (!(z > 0.0)) throw Error(ErrorCode::DomainError, "upper_incomplete_gamma0 requires z > 0");
  if (z <= detail::gamma_crossover) return detail::e1_series(z);
  return std::exp(-z) * detail::scaled_e1_continued_fraction(z);
}

/// e^z Gamma(0, z), finite for large z where the two factors alone over/underflow.
inline double scaled_upper_incomplete_gamma0(double z) {
  if (!(z > 0.0)) throw Error(ErrorCode::DomainError, "scaled_upper_incomplete_gamma0 requires z > 0");
  if (z <= detail::gamma_crossover) return std::exp(z) * detail::e1_series(z);
  return detail::scaled_e1_continued_fraction(z);
}

}  // namespace eosvac::numerics
