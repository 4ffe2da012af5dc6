#pragma once

// The full result without paraxial approximations: an outer integral over
// the vacuum wavevector q_par (restricted to q_par < q) of |J|^2, where J is
// an inner integral over the laser frequency and the laser transverse
// wavevector.
//
// With p = k_par + q_par / 2 the inner Gaussian becomes e^{-p^2 w^2 / 2}
// e^{q_par^2 w^2 / 8}, so
//   J_-(q_par) = w^2 / (4 pi \int eta E^2) \int d omega \int d^2p
//                n eta omega / (c k_z) (1 - k_x^2 / k^2) e^{-p^2 w^2 / 2}
//                [E E(omega - Omega) sinc(L/2 (k(omega - Omega) - k_z + q_z))
//                 + E E(omega + Omega) sinc(L/2 (k(omega + Omega) - k_z - q_z))]
// and J_+ flips the sign of q_z. In the laser-paraxial limit J -> f sinc, and
//   s^2 = P 4 \int_0^{pi/2} d theta q sin(theta) \int_0^{pi/2} d psi
//         (1 - sin^2(theta) cos^2(psi)) e^{-q_par^2 w^2 / 4} (|J_-|^2 + |J_+|^2)
// reduces to the laser-paraxial result exactly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/materials.hpp"
#include "eosvac/numerics/quadrature.hpp"
#include "eosvac/numerics/special.hpp"
#include "eosvac/signal/model.hpp"

namespace eosvac::signal {

struct FullResultOptions {
  /// Relative tolerance of the outer theta integral and of the coarse/fine
  /// agreement of the inner rules.
  double rel_tol = 1e-3;
  int omega_nodes = 16;
  int radial_nodes = 16;
  int angular_nodes = 8;
  int psi_nodes = 6;
  /// Radial extent of the inner p integral in units of 1/w.
  double radial_extent = 9.1;
  /// Times the inner rules are refined by a factor 1.5 before giving up.
  int max_refinements = 4;
};

namespace detail {

struct InnerRule {
  // Frequency nodes of the sum (E(omega) E(omega - Omega)) and difference
  // (E(omega) E(omega + Omega)) parts.
  struct FreqNode {
    double k;        // k(omega)
    double k_shift;  // k(omega -+ Omega)
    double weight;   // GL weight * n eta omega / c * E E(omega -+ Omega)
    bool sum;
  };
  std::vector<FreqNode> freq;
  std::vector<double> p;         // radial nodes
  std::vector<double> p_weight;  // GL weight * p * e^{-p^2 w^2 / 2} * 2 pi / M
  std::vector<double> cos_phi, sin_phi;
  double norm = 0.0;  // w^2 / (4 pi \int eta E^2)
};

inline std::vector<std::pair<double, double>> overlap_intervals(const pulse::PulseSpectrum& p, double shift) {
  // Support of E(omega) E(omega - shift), split at tabulated nodes is left to
  // the Gauss rule; Gaussian and rectangular spectra are smooth inside.
  const auto [lo, hi] = p.support();
  const double a = std::max(lo, lo + shift);
  const double b = std::min(hi, hi + shift);
  if (!(b > a)) return {};
  return {{a, b}};
}

inline InnerRule build_inner_rule(const SignalModel& m, double Omega, int n_omega, int n_radial, int n_angular,
                                  double radial_extent) {
  InnerRule rule;
  const auto& cfg = m.config();
  const auto& pulse = cfg.pulse;
  const double w = m.waist();
  rule.norm = w * w / (4.0 * constants::pi * pulse::detected_energy_integral(pulse));

  const numerics::GaussLegendre gl_omega(n_omega);
  for (int part = 0; part < 2; ++part) {
    const bool sum = part == 0;
    const double shift = sum ? Omega : -Omega;  // E(omega - shift) nonzero
    for (const auto& [a, b] : overlap_intervals(pulse, shift)) {
      const auto [x, wt] = gl_omega.on(a, b);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double om = x[i];
        const double om_s = om - shift;
        if (!(om_s > 0.0)) continue;
        const double n = materials::sellmeier_index(cfg.laser_index, om);
        const double k = n * om / constants::c;
        const double k_s = materials::laser_wavenumber(cfg.laser_index, om_s);
        const double amp = pulse.amplitude(om) * pulse.amplitude(om_s);
        rule.freq.push_back({k, k_s, wt[i] * n * pulse.eta(om) * om / constants::c * amp, sum});
      }
    }
  }

  const numerics::GaussLegendre gl_p(n_radial);
  const auto [px, pw] = gl_p.on(0.0, radial_extent / w);
  for (std::size_t i = 0; i < px.size(); ++i) {
    rule.p.push_back(px[i]);
    rule.p_weight.push_back(pw[i] * px[i] * std::exp(-0.5 * px[i] * px[i] * w * w) * 2.0 * constants::pi / n_angular);
  }
  for (int j = 0; j < n_angular; ++j) {
    const double phi = (j + 0.5) * 2.0 * constants::pi / n_angular;
    rule.cos_phi.push_back(std::cos(phi));
    rule.sin_phi.push_back(std::sin(phi));
  }
  return rule;
}

// J_- and J_+ at q_par = (qx, qy), q_z.
inline std::pair<complex, complex> inner_amplitudes(const InnerRule& rule, double qx, double qy, double qz, double L) {
  double jm = 0.0, jp = 0.0;
  complex jm_c{}, jp_c{};
  for (std::size_t ip = 0; ip < rule.p.size(); ++ip) {
    const double p = rule.p[ip];
    for (std::size_t ia = 0; ia < rule.cos_phi.size(); ++ia) {
      const double kx = p * rule.cos_phi[ia] - 0.5 * qx;
      const double ky = p * rule.sin_phi[ia] - 0.5 * qy;
      const double kp2 = kx * kx + ky * ky;
      double acc_m = 0.0, acc_p = 0.0;
      complex accc_m{}, accc_p{};
      for (const auto& fn : rule.freq) {
        const double k2 = fn.k * fn.k;
        const double sign = fn.sum ? 1.0 : -1.0;
        if (kp2 < k2) {
          const double kz = std::sqrt(k2 - kp2);
          const double common = fn.weight * (1.0 - kx * kx / k2) / kz;
          const double base = fn.k_shift - kz;
          acc_m += common * numerics::sinc(0.5 * L * (base + sign * qz));
          acc_p += common * numerics::sinc(0.5 * L * (base - sign * qz));
        } else {
          // evanescent laser component; only reachable for waists near the
          // optical wavelength
          const complex kz = greens::axial_wavenumber(complex(fn.k, 0.0), std::sqrt(kp2));
          const complex common = fn.weight * (1.0 - kx * kx / k2) / kz;
          const complex base = fn.k_shift - kz;
          accc_m += common * numerics::sinc(0.5 * L * (base + sign * qz));
          accc_p += common * numerics::sinc(0.5 * L * (base - sign * qz));
        }
      }
      const double wgt = rule.p_weight[ip];
      jm += wgt * acc_m;
      jp += wgt * acc_p;
      jm_c += wgt * accc_m;
      jp_c += wgt * accc_p;
    }
  }
  return {rule.norm * (jm + jm_c), rule.norm * (jp + jp_c)};
}

}  // namespace detail

/// Full result at one Omega. The error combines the outer adaptive estimate
/// with the change between a coarse and a fine inner rule.
inline PointValue s2_full(const SignalModel& m, double Omega, const FullResultOptions& opt = {}) {
  detail::require_positive(Omega);
  const double fv = m.f(Omega);
  if (fv == 0.0) return {};
  const double n = m.n_thz_real(Omega);
  const double q = n * Omega / constants::c;
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  const double w = m.waist();

  const numerics::GaussLegendre gl_psi(opt.psi_nodes);
  const auto [psi, psi_w] = gl_psi.on(0.0, constants::pi / 2.0);
  std::vector<double> cos_psi(psi.size()), sin_psi(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    cos_psi[i] = std::cos(psi[i]);
    sin_psi[i] = std::sin(psi[i]);
  }

  auto evaluate = [&](double scale, bool strict, double& outer_error) {
    auto nodes = [&](int base) { return std::max(2, static_cast<int>(std::lround(base * scale))); };
    const auto rule = detail::build_inner_rule(m, Omega, nodes(opt.omega_nodes), nodes(opt.radial_nodes),
                                               nodes(opt.angular_nodes), opt.radial_extent);
    numerics::QuadratureSpec spec;
    spec.rel_tol = opt.rel_tol / 4.0;
    spec.strict = strict;
    spec.max_subdivisions = 400;
    spec.oscillatory_hint = 2.0 * constants::pi / (0.5 * L * q);
    const auto pts = detail::theta_breakpoints(q, a, w, constants::pi / 2.0);
    auto r = numerics::integrate_1d(
        [&](double th) {
          const double st = std::sin(th);
          const double qp = q * st;
          const double qz = q * std::cos(th);
          double acc = 0.0;
          for (std::size_t i = 0; i < cos_psi.size(); ++i) {
            const auto [jm, jp] = detail::inner_amplitudes(rule, qp * cos_psi[i], qp * sin_psi[i], qz, L);
            acc += psi_w[i] * (1.0 - st * st * cos_psi[i] * cos_psi[i]) * (std::norm(jm) + std::norm(jp));
          }
          return 4.0 * q * st * std::exp(-0.25 * qp * qp * w * w) * acc;
        },
        std::span<const double>(pts), spec);
    outer_error = r.error;
    return r.value;
  };

  const double pref = m.vacuum_prefactor(Omega);
  double scale = 1.0;
  double err_coarse = 0.0, err_fine = 0.0;
  double coarse = evaluate(0.6 * scale, false, err_coarse);
  double fine = evaluate(scale, false, err_fine);
  for (int level = 0; level < opt.max_refinements; ++level) {
    if (std::abs(fine - coarse) <= opt.rel_tol * std::abs(fine)) break;
    scale *= 1.5;
    coarse = fine;
    err_coarse = err_fine;
    fine = evaluate(scale, false, err_fine);
  }
  const double error = std::abs(fine - coarse) + err_fine;
  if (error > opt.rel_tol * std::abs(fine) && error > 0.0) {
    throw NonConvergence("full result did not reach rel_tol " + std::to_string(opt.rel_tol) + " at Omega = " +
                             std::to_string(rad_to_thz(Omega)) + " THz",
                         pref * std::abs(fine), pref * error);
  }
  return {pref * fine, pref * error};
}

}  // namespace eosvac::signal
