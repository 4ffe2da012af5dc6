#pragma once

// Bulk dyadic Green's tensor of a homogeneous crystal in the Weyl (plane-wave)
// representation, and its split into longitudinal and transverse parts.
//
// Convention: G(r, r') = \int d^2k_par e^{i k_par . (r_par - r'_par)} g(k_par, z - z').
// The delta(z - z') e_z e_z term shared by the full and longitudinal tensors
// is never evaluated pointwise; see `delta_weight`.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/materials.hpp"
#include "eosvac/numerics/quadrature.hpp"

namespace eosvac::greens {

using complex = std::complex<double>;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

/// Dense 3x3 complex tensor, zero-initialised.
struct Tensor3 {
  std::array<complex, 9> m{};

  complex& operator()(int i, int j) { return m[3 * i + j]; }
  const complex& operator()(int i, int j) const { return m[3 * i + j]; }

  static Tensor3 identity() {
    Tensor3 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }
  static Tensor3 outer(const std::array<complex, 3>& a, const std::array<complex, 3>& b) {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = a[i] * b[j];
    return t;
  }

  Tensor3 transpose() const {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (int i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    for (int i = 0; i < 9; ++i) m[i] -= o.m[i];
    return *this;
  }
  Tensor3& operator*=(complex s) {
    for (auto& v : m) v *= s;
    return *this;
  }
};

inline Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
inline Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
inline Tensor3 operator*(Tensor3 a, complex s) { return a *= s; }
inline Tensor3 operator*(complex s, Tensor3 a) { return a *= s; }
inline Tensor3 operator*(Tensor3 a, double s) { return a *= complex(s, 0.0); }

inline Tensor3 operator*(const Tensor3& a, const Tensor3& b) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) t(i, j) += a(i, k) * b(k, j);
  return t;
}

/// Largest entry modulus; the quadrature engine finds this by ADL.
inline double norm_of(const Tensor3& t) {
  double n = 0.0;
  for (const auto& v : t.m) n = std::max(n, std::abs(v));
  return n;
}

/// Homogeneous crystal described by its complex index at angular frequency omega.
struct BulkMedium {
  std::function<complex(double)> index;

  static BulkMedium constant(complex n) {
    return {[n](double) { return n; }};
  }
  static BulkMedium from_thz_index(materials::ThzIndex model) {
    return {[model = std::move(model)](double w) { return materials::thz_index(model, w); }};
  }

  /// k = n omega / c with Im k >= 0.
  complex wavenumber(double omega) const {
    if (!(omega > 0.0)) throw Error(ErrorCode::NonpositiveFrequency, "Green's tensor needs omega > 0");
    const complex k = index(omega) * omega / constants::c;
    if (k.imag() < 0.0) throw Error(ErrorCode::BranchViolation, "medium index has Im n < 0 (not passive)");
    return k;
  }
};

/// k_z = sqrt(k^2 - k_par^2) on the branch Im k_z >= 0.
inline complex axial_wavenumber(complex k, double k_par) {
  complex kz = std::sqrt(k * k - k_par * k_par);
  if (kz.imag() < 0.0) kz = -kz;
  if (kz.imag() == 0.0 && kz.real() < 0.0) kz = -kz;
  return kz;
}

enum class Part { full, longitudinal, transverse };

namespace detail {

// Full Weyl integrand with the lossless-safe k_z supplied by the caller.
inline Tensor3 full_kernel(complex k, complex kz, double kx, double ky, double dz) {
  const double kp = std::hypot(kx, ky);
  Tensor3 t;
  if (kp == 0.0) {
    // s and p span the transverse plane: e_s e_s + e_p e_p = diag(1, 1, 0)
    t(0, 0) = t(1, 1) = 1.0;
  } else {
    const double sgn = dz >= 0.0 ? 1.0 : -1.0;
    const std::array<complex, 3> es{ky / kp, -kx / kp, 0.0};
    const std::array<complex, 3> ep{-sgn * kx * kz / (kp * k), -sgn * ky * kz / (kp * k), kp / k};
    t = Tensor3::outer(es, es) + Tensor3::outer(ep, ep);
  }
  const complex pref = complex(0.0, 1.0) / (8.0 * constants::pi * constants::pi * kz) *
                       std::exp(complex(0.0, 1.0) * kz * std::abs(dz));
  return t * pref;
}

// Longitudinal integrand times k^2 (geometry only).
inline Tensor3 longitudinal_kernel_k2(double kx, double ky, double dz) {
  const double kp = std::hypot(kx, ky);
  Tensor3 t;
  if (kp > 0.0) {
    t(0, 0) = kx * kx / kp;
    t(0, 1) = t(1, 0) = kx * ky / kp;
    t(1, 1) = ky * ky / kp;
  }
  t(2, 2) = -kp;
  const double sgn = dz > 0.0 ? 1.0 : (dz < 0.0 ? -1.0 : 0.0);
  const complex im(0.0, sgn);
  t(0, 2) += im * kx;
  t(2, 0) += im * kx;
  t(1, 2) += im * ky;
  t(2, 1) += im * ky;
  return t * (-std::exp(-kp * std::abs(dz)) / (8.0 * constants::pi * constants::pi));
}

}  // namespace detail

/// Regular part of the Weyl integrand g(k_par, dz) for the chosen part.
inline Tensor3 weyl_kernel(Part part, complex k, double kx, double ky, double dz) {
  const complex kz = axial_wavenumber(k, std::hypot(kx, ky));
  if (kz.imag() < -1e-14 * std::abs(kz)) throw Error(ErrorCode::BranchViolation, "Im k_z < 0");
  switch (part) {
    case Part::full:
      return detail::full_kernel(k, kz, kx, ky, dz);
    case Part::longitudinal:
      return detail::longitudinal_kernel_k2(kx, ky, dz) * (1.0 / (k * k));
    case Part::transverse:
      return detail::full_kernel(k, kz, kx, ky, dz) - detail::longitudinal_kernel_k2(kx, ky, dz) * (1.0 / (k * k));
  }
  return {};
}

/// Weight of the delta(z - z') e_z e_z term in the full and longitudinal
/// integrands: g contains delta_weight(k) * delta(dz) * e_z e_z.
inline complex delta_weight(complex k) { return -1.0 / (4.0 * constants::pi * constants::pi * k * k); }

/// Longitudinal projector Khat Khat for the 3D wavevector (kx, ky, Kz).
inline Tensor3 longitudinal_projector(double kx, double ky, double Kz) {
  const double K2 = kx * kx + ky * ky + Kz * Kz;
  if (!(K2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "projector needs a nonzero wavevector");
  const std::array<complex, 3> kh{kx / std::sqrt(K2), ky / std::sqrt(K2), Kz / std::sqrt(K2)};
  return Tensor3::outer(kh, kh);
}

inline Tensor3 transverse_projector(double kx, double ky, double Kz) {
  return Tensor3::identity() - longitudinal_projector(kx, ky, Kz);
}

/// \int dz e^{-i Kz z} g(k_par, z) by adaptive quadrature on both half lines.
/// The delta term is added for the full and longitudinal parts. Requires
/// Im k > 0 so the propagating exponential decays.
inline Tensor3 axial_fourier_transform(Part part, complex k, double kx, double ky, double Kz,
                                       const numerics::QuadratureSpec& spec = {}) {
  if (!(k.imag() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "axial Fourier transform needs an absorbing medium (Im k > 0)");
  }
  const complex kz = axial_wavenumber(k, std::hypot(kx, ky));
  const double decay = std::min(kz.imag(), std::hypot(kx, ky) > 0.0 ? std::hypot(kx, ky) : kz.imag());
  const double scale = 1.0 / decay;
  auto half_line = [&](double sgn) {
    const std::array<double, 2> pts{0.0, std::numeric_limits<double>::infinity()};
    return numerics::integrate_1d(
               [&](double u) {
                 const double z = sgn * u * scale;
                 return weyl_kernel(part, k, kx, ky, z) * (std::exp(complex(0.0, -Kz * z)) * scale);
               },
               std::span<const double>(pts), spec)
        .value;
  };
  Tensor3 out = half_line(1.0) + half_line(-1.0);
  if (part != Part::transverse) out(2, 2) += delta_weight(k);
  return out;
}

namespace detail {

inline numerics::QuadratureSpec angular_spec(const numerics::QuadratureSpec& spec) {
  numerics::QuadratureSpec a = spec;
  a.rel_tol = spec.rel_tol / 4.0;
  a.abs_tol = spec.abs_tol / 4.0;
  return a;
}

// \int_0^{2pi} dphi kernel(k_par cos, k_par sin) e^{i k_par rho cos(phi - phi_rho)},
// with phi measured from the direction of the lateral separation so that
// mirrored separations sample mirrored nodes.
template <class Kernel>
Tensor3 angular_integral(Kernel&& kernel, double kp, double rx, double ry, const numerics::QuadratureSpec& spec) {
  const double rho = std::hypot(rx, ry);
  const double phi0 = rho > 0.0 ? std::atan2(ry, rx) : 0.0;
  const int start_points = 8 + 2 * static_cast<int>(std::ceil(kp * rho));
  return numerics::integrate_periodic(
             [&](double phi) {
               const double a = phi + phi0;
               const double kx = kp * std::cos(a);
               const double ky = kp * std::sin(a);
               return kernel(kx, ky) * std::exp(complex(0.0, kp * rho * std::cos(phi)));
             },
             0.0, 2.0 * constants::pi, angular_spec(spec), start_points)
      .value;
}

}  // namespace detail

/// Full bulk Green's tensor G(r, r', omega) by Weyl quadrature. Requires
/// z != z'; the radial integral is split at Re k with k_par = Re k sin(theta)
/// below and Re k cosh(t) above so the 1/k_z branch point carries no weight.
inline Tensor3 bulk_green(const BulkMedium& medium, const Vec3& r, const Vec3& rp, double omega,
                          const numerics::QuadratureSpec& spec = {}) {
  const Vec3 d = r - rp;
  if (d.z == 0.0) {
    throw Error(ErrorCode::CoincidenceRequest,
                "full Green's tensor at z = z' contains a distributional term; use imag_green_xx");
  }
  const complex k = medium.wavenumber(omega);
  const double kr = k.real();
  const bool lossless = k.imag() == 0.0;
  const double adz = std::abs(d.z);

  auto kernel_at = [&](double kp, complex kz) {
    return [&, kp, kz](double kx, double ky) { return detail::full_kernel(k, kz, kx, ky, d.z); };
  };

  // theta in (0, pi/2): k_par = kr sin(theta), d k_par = kr cos(theta) d theta
  auto inner = numerics::integrate_1d(
      [&](double th) {
        const double kp = kr * std::sin(th);
        const complex kz = lossless ? complex(kr * std::cos(th), 0.0) : axial_wavenumber(k, kp);
        return detail::angular_integral(kernel_at(kp, kz), kp, d.x, d.y, spec) * (kp * kr * std::cos(th));
      },
      0.0, constants::pi / 2.0, spec);

  // t > 0: k_par = kr cosh(t); the evanescent factor e^{-kr sinh(t) |dz|}
  // is below 1e-30 past t_max.
  const double t_max = std::asinh(70.0 / (kr * adz));
  auto outer = numerics::integrate_1d(
      [&](double t) {
        const double kp = kr * std::cosh(t);
        const complex kz = lossless ? complex(0.0, kr * std::sinh(t)) : axial_wavenumber(k, kp);
        return detail::angular_integral(kernel_at(kp, kz), kp, d.x, d.y, spec) * (kp * kr * std::sinh(t));
      },
      0.0, t_max, spec);
  return inner.value + outer.value;
}

inline complex bulk_green_xx(const BulkMedium& medium, const Vec3& r, const Vec3& rp, double omega,
                             const numerics::QuadratureSpec& spec = {}) {
  return bulk_green(medium, r, rp, omega, spec)(0, 0);
}

/// Im G_xx(r, r', omega) for a lossless medium. Only the propagating band
/// contributes, so coincidence (r = r') is allowed.
inline double imag_green_xx(const BulkMedium& medium, const Vec3& r, const Vec3& rp, double omega,
                            const numerics::QuadratureSpec& spec = {}) {
  const complex k = medium.wavenumber(omega);
  if (k.imag() != 0.0) {
    throw Error(ErrorCode::AbsorptiveMediumUnsupported, "imag_green_xx is restricted to lossless media");
  }
  const double kr = k.real();
  const Vec3 d = r - rp;
  auto value = numerics::integrate_1d(
      [&](double th) {
        const double kp = kr * std::sin(th);
        const double kz = kr * std::cos(th);
        // e_s e_s + e_p e_p, xx entry, times i e^{i kz |dz|} / (8 pi^2 kz), with the
        // k_par d k_par / kz measure reduced to kr sin(theta) d theta
        auto xx = [&](double kx, double ky) {
          Tensor3 t;
          if (kp == 0.0) {
            t(0, 0) = 1.0;
          } else {
            const double s = ky / kp;
            const double c = kx / kp;
            t(0, 0) = s * s + c * c * kz * kz / (kr * kr);
          }
          return t;
        };
        const Tensor3 ang = detail::angular_integral(xx, kp, d.x, d.y, spec);
        const complex phase = complex(0.0, 1.0) * std::exp(complex(0.0, kz * std::abs(d.z)));
        return (ang(0, 0) * phase).imag() * kr * std::sin(th) / (8.0 * constants::pi * constants::pi);
      },
      0.0, constants::pi / 2.0, spec);
  return value.value;
}

/// Regular part of the longitudinal tensor; scales exactly as 1/k^2.
/// Requires z != z'.
inline Tensor3 longitudinal_green(const Vec3& r, const Vec3& rp, complex k, const numerics::QuadratureSpec& spec = {}) {
  const Vec3 d = r - rp;
  if (d.z == 0.0) {
    throw Error(ErrorCode::CoincidenceRequest, "longitudinal Green's tensor at z = z' is distributional");
  }
  const double adz = std::abs(d.z);
  // u = k_par |dz|, k_par d k_par = u du / dz^2
  const std::array<double, 2> pts{0.0, std::numeric_limits<double>::infinity()};
  auto value = numerics::integrate_1d(
      [&](double u) {
        const double kp = u / adz;
        auto kern = [&](double kx, double ky) { return detail::longitudinal_kernel_k2(kx, ky, d.z); };
        return detail::angular_integral(kern, kp, d.x, d.y, spec) * (u / (adz * adz));
      },
      std::span<const double>(pts), spec);
  return value.value * (1.0 / (k * k));
}

inline Tensor3 longitudinal_green(const BulkMedium& medium, const Vec3& r, const Vec3& rp, double omega,
                                  const numerics::QuadratureSpec& spec = {}) {
  return longitudinal_green(r, rp, medium.wavenumber(omega), spec);
}

/// G - longitudinal part.
inline Tensor3 transverse_green(const BulkMedium& medium, const Vec3& r, const Vec3& rp, double omega,
                                const numerics::QuadratureSpec& spec = {}) {
  return bulk_green(medium, r, rp, omega, spec) - longitudinal_green(medium, r, rp, omega, spec);
}

}  // namespace eosvac::greens
