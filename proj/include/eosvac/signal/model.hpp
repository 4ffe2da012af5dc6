#pragma once

// Signal spectrum s^2(Omega) in the closed-form and singly integrated
// approximations: laser-paraxial, Taylor, paraxial, paraxial with cutoff,
// absorptive (with its first/second split), longitudinal and transverse.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/greens.hpp"
#include "eosvac/materials.hpp"
#include "eosvac/numerics/quadrature.hpp"
#include "eosvac/numerics/special.hpp"
#include "eosvac/pulse.hpp"
#include "eosvac/signal/experiment.hpp"

namespace eosvac::signal {

/// Gaussian truncation of transverse wavevector integrals, in units of 1/w:
/// e^{-q^2 w^2 / 4} < 1e-18 beyond it.
inline constexpr double gaussian_cutoff = 12.9;

struct PointValue {
  double value = 0.0;
  double error = 0.0;
};

/// Caches the pulse functionals and laser-band quantities of a config and
/// evaluates the frequency-dependent material response.
class SignalModel {
 public:
  explicit SignalModel(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    cfg_.pulse.beam_waist = cfg_.beam_waist;
    omega_c_ = cfg_.pulse.center();
    n_c_ = materials::sellmeier_index(cfg_.laser_index, omega_c_);
    n_g_ = cfg_.group_index_override ? *cfg_.group_index_override
                                     : materials::group_index(cfg_.laser_index, omega_c_);
    omega_p_ = pulse::mean_detected_frequency(cfg_.pulse);
    if (cfg_.chi2.dispersive) cfg_.chi2.n_ref = n_c_;
    const double k_c = n_c_ * omega_c_ / constants::c;
    rayleigh_ = {cfg_.beam_waist * cfg_.beam_waist * k_c / 2.0, cfg_.crystal_length};
    if (!rayleigh_.satisfied()) {
      warnings_.push_back("crystal length " + std::to_string(cfg_.crystal_length / um) +
                          " um is not shorter than the Rayleigh length " +
                          std::to_string(rayleigh_.rayleigh_length / um) + " um");
    }
  }

  const ExperimentConfig& config() const { return cfg_; }
  double omega_c() const { return omega_c_; }
  double n_center() const { return n_c_; }
  double group_index() const { return n_g_; }
  double omega_p() const { return omega_p_; }
  double length() const { return cfg_.crystal_length; }
  double waist() const { return cfg_.beam_waist; }
  double photon_number() const { return cfg_.pulse.photon_number; }
  const RayleighCheck& rayleigh() const { return rayleigh_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  double f(double Omega) const { return pulse::spectral_autocorrelation(cfg_.pulse, Omega); }

  /// THz index with Im n scaled by the configured absorption scale.
  complex n_thz(double Omega) const {
    const complex n = materials::thz_index(cfg_.thz_index, Omega);
    return {n.real(), n.imag() * cfg_.thz_absorption_scale};
  }

  /// Real THz index; components derived for lossless media refuse Im n != 0.
  double n_thz_real(double Omega) const {
    const complex n = n_thz(Omega);
    if (n.imag() != 0.0) {
      throw Error(ErrorCode::AbsorptiveMediumUnsupported,
                  "this approximation needs a lossless THz index (Im n = " + std::to_string(n.imag()) + ")");
    }
    return n.real();
  }

  complex chi2(double Omega) const { return materials::chi2_disp(cfg_.chi2, Omega); }
  double thermal_weight(double Omega) const {
    return 2.0 * materials::thermal_occupation(Omega, cfg_.temperature) + 1.0;
  }

  /// n_g Omega / c.
  double envelope_wavenumber(double Omega) const { return n_g_ * Omega / constants::c; }

  /// (N L omega_p)^2 hbar |chi|^2 Omega^2 / (4 pi^3 c^4 eps0^3 n_c^2), the
  /// prefactor shared by the full and laser-paraxial results (without f^2).
  double vacuum_prefactor(double Omega) const {
    const double NLw = cfg_.pulse.photon_number * cfg_.crystal_length * omega_p_;
    const double chi = std::abs(chi2(Omega));
    const double c = constants::c;
    const double e0 = constants::epsilon0;
    return NLw * NLw * constants::hbar * chi * chi * Omega * Omega /
           (4.0 * constants::pi * constants::pi * constants::pi * c * c * c * c * e0 * e0 * e0 * n_c_ * n_c_);
  }

  /// sqrt(C) = 2 chi L omega_p N / (n eps0 c), the Fig. normalisation.
  double sqrt_c_normalisation(double Omega) const {
    return 2.0 * std::abs(chi2(Omega)) * cfg_.crystal_length * omega_p_ * cfg_.pulse.photon_number /
           (n_c_ * constants::epsilon0 * constants::c);
  }

 private:
  ExperimentConfig cfg_;
  double omega_c_ = 0.0;
  double n_c_ = 0.0;
  double n_g_ = 0.0;
  double omega_p_ = 0.0;
  RayleighCheck rayleigh_{};
  std::vector<std::string> warnings_;
};

namespace detail {

inline void require_positive(double Omega) {
  if (!(Omega > 0.0)) throw Error(ErrorCode::NonpositiveFrequency, "s^2(Omega) needs Omega > 0");
}

inline double sinc2(double x) {
  const double s = numerics::sinc(x);
  return s * s;
}

// (sinc(L d) - sinc^2(L d / 2)) / d, with its odd series near d = 0.
inline double phase_derivative(double L, double d) {
  const double a = 0.5 * L * d;
  if (std::abs(a) < 1e-3) {
    const double a2 = a * a;
    return 0.5 * L * (-a / 3.0 + 4.0 * a * a2 / 45.0);
  }
  return (numerics::sinc(L * d) - sinc2(a)) / d;
}

}  // namespace detail

/// Paraxial prefactor (N L omega_p)^2 hbar / (pi^2 eps0^3 c^3 n_c^3 w^2)
/// (n_c / n(Omega)) |chi|^2 Omega f^2.
inline double paraxial_prefactor(const SignalModel& m, double Omega, double n_omega) {
  const double NLw = m.photon_number() * m.length() * m.omega_p();
  const double chi = std::abs(m.chi2(Omega));
  const double fv = m.f(Omega);
  const double e0 = constants::epsilon0;
  const double c = constants::c;
  const double nc = m.n_center();
  return NLw * NLw * constants::hbar / (constants::pi * constants::pi * e0 * e0 * e0 * c * c * c * nc * nc * nc *
                                        m.waist() * m.waist()) *
         (nc / n_omega) * chi * chi * Omega * fv * fv;
}

/// Paraxial approximation for both laser and vacuum fields.
inline double s2_paraxial(const SignalModel& m, double Omega) {
  detail::require_positive(Omega);
  if (m.f(Omega) == 0.0) return 0.0;
  const double n = m.n_thz_real(Omega);
  const double q = n * Omega / constants::c;
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  return paraxial_prefactor(m, Omega, n) * (detail::sinc2(0.5 * L * (a - q)) + detail::sinc2(0.5 * L * (a + q)));
}

/// Paraxial result restricted to n(Omega) Omega < c pi / w.
inline double s2_paraxial_cutoff(const SignalModel& m, double Omega) {
  detail::require_positive(Omega);
  const double n = m.n_thz_real(Omega);
  if (!(n * Omega < constants::c * constants::pi / m.waist())) return 0.0;
  return s2_paraxial(m, Omega);
}

/// Next-to-leading order in q_par / q. `leading` is the paraxial result,
/// `disc` the finite-disc correction -e^{-q^2 w^2 / 4} (sinc^2 pair) and
/// `curvature` the q_z curvature term.
struct TaylorTerms {
  double leading = 0.0;
  double disc = 0.0;
  double curvature = 0.0;
  double total() const { return leading + disc + curvature; }
};

inline TaylorTerms s2_taylor_terms(const SignalModel& m, double Omega) {
  detail::require_positive(Omega);
  TaylorTerms t;
  if (m.f(Omega) == 0.0) return t;
  const double n = m.n_thz_real(Omega);
  const double q = n * Omega / constants::c;
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  const double w = m.waist();
  const double pref = paraxial_prefactor(m, Omega, n);
  const double dkm = a - q;
  const double dkp = a + q;
  const double pair = detail::sinc2(0.5 * L * dkm) + detail::sinc2(0.5 * L * dkp);
  const double Tq = 0.25 * q * q * w * w;
  const double coef = (4.0 - std::exp(-Tq) * (4.0 + q * q * w * w)) / (q * w * w);
  t.leading = pref * pair;
  t.disc = -pref * std::exp(-Tq) * pair;
  t.curvature = pref * coef * (detail::phase_derivative(L, dkm) - detail::phase_derivative(L, dkp));
  return t;
}

inline double s2_taylor(const SignalModel& m, double Omega) { return s2_taylor_terms(m, Omega).total(); }

namespace detail {

// Breakpoints for theta in [0, pi/2] with q_par = q sin(theta): the
// phase-matching angle and the Gaussian e-folding scales.
inline std::vector<double> theta_breakpoints(double q, double a, double w, double theta_max) {
  std::vector<double> pts{0.0, theta_max};
  auto add = [&](double th) {
    if (th > 0.0 && th < theta_max) pts.push_back(th);
  };
  if (a < q) add(std::acos(a / q));
  for (double s : {1.0, 3.0, 6.0}) {
    const double x = 2.0 * s / (q * w);
    if (x < 1.0) add(std::asin(x));
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace detail

/// Laser-paraxial result: the azimuthally reduced disc integral
///   P f^2 2 pi q \int_0^{pi/2} d theta sin(theta) (1 - sin^2(theta) / 2)
///   e^{-q_par^2 w^2 / 4} (sinc^2[L/2 dk_-] + sinc^2[L/2 dk_+]).
inline PointValue s2_laser_paraxial(const SignalModel& m, double Omega, const numerics::QuadratureSpec& spec = {}) {
  detail::require_positive(Omega);
  const double fv = m.f(Omega);
  if (fv == 0.0) return {};
  const double n = m.n_thz_real(Omega);
  const double q = n * Omega / constants::c;
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  const double w = m.waist();
  const auto pts = detail::theta_breakpoints(q, a, w, constants::pi / 2.0);
  numerics::QuadratureSpec s = spec;
  s.oscillatory_hint = 2.0 * constants::pi / (0.5 * L * q + 1e-300);
  auto r = numerics::integrate_1d(
      [&](double th) {
        const double st = std::sin(th);
        const double qz = q * std::cos(th);
        return st * (1.0 - 0.5 * st * st) * std::exp(-0.25 * q * q * st * st * w * w) *
               (detail::sinc2(0.5 * L * (a - qz)) + detail::sinc2(0.5 * L * (a + qz)));
      },
      std::span<const double>(pts), s);
  const double pref = m.vacuum_prefactor(Omega) * fv * fv * 2.0 * constants::pi * q;
  return {pref * r.value, pref * r.error};
}

enum class AbsorptiveTerm { total, first, second };

namespace detail {

// (1 + i L D - e^{i L D}) / (q_z D^2) with D = q_z - a, by its series when
// |L D| is small.
inline complex phase_bracket(complex qz, complex D, double L) {
  const complex x = L * D;
  if (std::abs(x) < 0.5) {
    const complex iL(0.0, L);
    complex term = iL * iL / 2.0;  // (iL)^m D^{m-2} / m!, m = 2
    complex sum = term;
    for (int mm = 3; mm < 40; ++mm) {
      term *= iL * D / static_cast<double>(mm);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return -sum / qz;
  }
  const complex i(0.0, 1.0);
  return (1.0 + i * x - std::exp(i * x)) / (qz * D * D);
}

inline complex absorptive_bracket(AbsorptiveTerm term, complex qz, double a, double L) {
  const complex D = qz - a;
  const complex first = complex(0.0, L) / (qz * D);  // -i L / (q_z (a - q_z))
  switch (term) {
    case AbsorptiveTerm::first:
      return first;
    case AbsorptiveTerm::second:
      return phase_bracket(qz, D, L) - first;
    case AbsorptiveTerm::total:
      return phase_bracket(qz, D, L) + phase_bracket(qz, qz + a, L);
  }
  return {};
}

}  // namespace detail

/// Laser-paraxial result for a complex THz index, including the thermal
/// weight [2 n_T + 1]. The first/second split omits the n_g -> -n_g partner
/// that the total carries.
inline PointValue s2_absorptive(const SignalModel& m, double Omega, AbsorptiveTerm term = AbsorptiveTerm::total,
                                const numerics::QuadratureSpec& spec = {}) {
  detail::require_positive(Omega);
  const double fv = m.f(Omega);
  if (fv == 0.0) return {};
  const complex n = m.n_thz(Omega);
  const complex q = n * Omega / constants::c;
  const complex q2 = q * q;
  const double qr = q.real();
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  const double w = m.waist();
  const double qmax = gaussian_cutoff / w;

  auto integrand = [&](double qp) {
    const complex qz = greens::axial_wavenumber(q, qp);
    if (qz.imag() < 0.0) throw Error(ErrorCode::BranchViolation, "Im q_z < 0 in absorptive integrand");
    const complex v = (2.0 - qp * qp / q2) * detail::absorptive_bracket(term, qz, a, L);
    return qp * std::exp(-0.25 * qp * qp * w * w) * v.real();
  };

  numerics::QuadratureSpec s = spec;
  s.abs_tol = 0.0;
  double value = 0.0, error = 0.0;

  // q_par = qr sin(theta) up to min(qr, qmax)
  const double theta_max = std::asin(std::min(1.0, qmax / qr));
  auto pts = detail::theta_breakpoints(qr, a, w, theta_max);
  s.oscillatory_hint = 2.0 * constants::pi / (L * qr);
  auto inner = numerics::integrate_1d([&](double th) { return integrand(qr * std::sin(th)) * qr * std::cos(th); },
                                      std::span<const double>(pts), s);
  value += inner.value;
  error += inner.error;

  // q_par = qr + s^2 beyond, where q_z turns evanescent
  if (qmax > qr) {
    // The evanescent band can cancel to zero (it does for the lossless total),
    // so its accuracy is measured against the propagating band.
    s.oscillatory_hint.reset();
    s.abs_tol = std::max(spec.abs_tol, 0.1 * spec.rel_tol * std::abs(inner.value));
    auto outer = numerics::integrate_1d([&](double u) { return integrand(qr + u * u) * 2.0 * u; }, 0.0,
                                        std::sqrt(qmax - qr), s);
    value += outer.value;
    error += outer.error;
  }

  const double Nw = m.photon_number() * m.omega_p() * Omega * fv * std::abs(m.chi2(Omega));
  const double c = constants::c;
  const double e0 = constants::epsilon0;
  const double nc = m.n_center();
  const double pref = constants::hbar * Nw * Nw * m.thermal_weight(Omega) /
                      (2.0 * constants::pi * constants::pi * c * c * c * c * e0 * e0 * e0 * nc * nc);
  return {pref * value, pref * error};
}

/// Signal from longitudinal (matter) fluctuations, weighted by [2 n_T + 1]
/// like the absorptive total it is subtracted from.
inline PointValue s2_longitudinal(const SignalModel& m, double Omega, const numerics::QuadratureSpec& spec = {}) {
  detail::require_positive(Omega);
  const double fv = m.f(Omega);
  if (fv == 0.0) return {};
  const complex n = m.n_thz(Omega);
  const double im_eps = (n * n).imag();
  if (im_eps == 0.0) return {};
  const double a = m.envelope_wavenumber(Omega);
  const double L = m.length();
  const double w = m.waist();
  const double z = 0.25 * a * a * w * w;

  auto r = numerics::integrate_1d(
      [&](double k) {
        const complex s(k, a);
        return k * k * std::exp(-0.25 * k * k * w * w) * ((std::exp(-s * L) - 1.0) / (s * s)).real();
      },
      0.0, gaussian_cutoff / w, spec);
  const double brace = 2.0 * L / (w * w) - 0.5 * L * a * a * numerics::scaled_upper_incomplete_gamma0(z) + r.value;

  const double Nw = m.photon_number() * m.omega_p() / (m.n_center() * constants::c);
  const double chi = std::abs(m.chi2(Omega));
  const double e0 = constants::epsilon0;
  const double n2 = std::norm(n);
  const double pref = Nw * Nw * constants::hbar * chi * chi * fv * fv * im_eps * m.thermal_weight(Omega) /
                      (e0 * e0 * e0 * constants::pi * constants::pi * constants::pi * n2 * n2);
  return {pref * brace, std::abs(pref) * r.error};
}

/// Absorptive total minus its longitudinal part.
inline PointValue s2_transverse(const SignalModel& m, double Omega, const numerics::QuadratureSpec& spec = {}) {
  const auto total = s2_absorptive(m, Omega, AbsorptiveTerm::total, spec);
  const auto lon = s2_longitudinal(m, Omega, spec);
  return {total.value - lon.value, total.error + lon.error};
}

}  // namespace eosvac::signal
