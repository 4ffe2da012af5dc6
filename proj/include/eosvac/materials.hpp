#pragma once

// Linear and nonlinear optical response of the electro-optic crystal.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/io/csv.hpp"

namespace eosvac::materials {

using complex = std::complex<double>;

/// n^2 = A + B lambda^2 / (lambda^2 - C), lambda in micrometres.
struct SellmeierModel {
  double A = 4.27;
  double B = 3.01;
  double C_um2 = 0.142;
};

namespace detail {
inline double wavelength_um(double omega) {
  if (!(omega > 0.0)) throw Error(ErrorCode::NonpositiveFrequency, "angular frequency must be positive");
  return 2.0 * constants::pi * constants::c / omega / um;
}
inline double sellmeier_lambda2(const SellmeierModel& m, double omega) {
  const double lam = wavelength_um(omega);
  const double lam2 = lam * lam;
  if (!(lam2 > m.C_um2)) {
    throw Error(ErrorCode::PoleCrossing, "lambda^2 = " + std::to_string(lam2) + " um^2 is not above the Sellmeier pole C");
  }
  return lam2;
}
}  // namespace detail

inline double sellmeier_index(const SellmeierModel& m, double omega) {
  const double lam2 = detail::sellmeier_lambda2(m, omega);
  return std::sqrt(m.A + m.B * lam2 / (lam2 - m.C_um2));
}

/// c dk/domega = n + omega dn/domega = n - lambda dn/dlambda, evaluated in
/// closed form: n_g = n + B C lambda^2 / (n (lambda^2 - C)^2).
inline double group_index(const SellmeierModel& m, double omega) {
  const double lam2 = detail::sellmeier_lambda2(m, omega);
  const double n = std::sqrt(m.A + m.B * lam2 / (lam2 - m.C_um2));
  const double d = lam2 - m.C_um2;
  return n + m.B * m.C_um2 * lam2 / (n * d * d);
}

/// Laser-band wavenumber k = n(omega) omega / c.
inline double laser_wavenumber(const SellmeierModel& m, double omega) {
  return sellmeier_index(m, omega) * omega / constants::c;
}

/// Single polar-phonon resonance:
/// eps = eps_inf (1 + (w_LO^2 - w_TO^2) / (w_TO^2 - W^2 - i gamma W)).
struct PhononResonanceModel {
  double eps_inf = 6.7;
  double omega_TO = thz_to_rad(5.31);
  double omega_LO = thz_to_rad(6.18);
  double gamma = thz_to_rad(0.09);
  bool absorption_enabled = false;

  void validate() const {
    if (!(omega_LO > omega_TO && omega_TO > 0.0 && gamma >= 0.0 && eps_inf > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "phonon model needs omega_LO > omega_TO > 0, gamma >= 0, eps_inf > 0");
    }
  }
};

inline complex phonon_permittivity(const PhononResonanceModel& m, double Omega) {
  if (Omega < 0.0) throw Error(ErrorCode::NonpositiveFrequency, "THz frequency must be >= 0");
  const double wt2 = m.omega_TO * m.omega_TO;
  const double wl2 = m.omega_LO * m.omega_LO;
  const complex denom(wt2 - Omega * Omega, -m.gamma * Omega);
  if (denom == complex(0.0, 0.0)) {
    throw Error(ErrorCode::DegenerateResonance, "lossless phonon model evaluated exactly at omega_TO");
  }
  return m.eps_inf * (1.0 + (wl2 - wt2) / denom);
}

/// Principal square root of the permittivity with Im n >= 0. With absorption
/// disabled only the real part is kept.
inline complex phonon_index(const PhononResonanceModel& m, double Omega) {
  complex n = std::sqrt(phonon_permittivity(m, Omega));
  if (n.imag() < 0.0) n = -n;
  // sqrt of a negative real with a -0 imaginary part lands on the lower branch
  if (n.real() < 0.0) n = complex(-n.real(), n.imag());
  if (!m.absorption_enabled) return {n.real(), 0.0};
  return n;
}

enum class Chi2Denominator { resonant, as_printed };

/// Second-order susceptibility. In constant mode `constant_value` is
/// returned for every frequency. In dispersive mode
///   chi2 = n_ref^4 eps0 r41 / 2 * [1 + C0 D(Omega)]
/// with D = w_TO^2 / (w_TO^2 - W^2 - i gamma W) (resonant, -> 1 as W -> 0) or
/// D = w_TO^2 / (W - i W gamma) with frequencies in rad/ps (as_printed).
struct Chi2Model {
  bool dispersive = false;
  double constant_value = 1.17e-21;  // C / V^2
  double r41 = 4.0e-12;              // m / V
  double C0 = -0.07;
  double omega_TO = thz_to_rad(5.31);
  double gamma = thz_to_rad(0.09);
  double n_ref = 1.0;
  Chi2Denominator denominator = Chi2Denominator::resonant;

  double plateau() const {
    const double n2 = n_ref * n_ref;
    return n2 * n2 * constants::epsilon0 * r41 / 2.0;
  }
};

inline complex chi2_disp(const Chi2Model& m, double Omega) {
  if (!m.dispersive) return {m.constant_value, 0.0};
  if (!(Omega > 0.0)) throw Error(ErrorCode::NonpositiveFrequency, "dispersive chi2 needs Omega > 0");
  complex factor;
  if (m.denominator == Chi2Denominator::resonant) {
    const double wt2 = m.omega_TO * m.omega_TO;
    factor = wt2 / complex(wt2 - Omega * Omega, -m.gamma * Omega);
  } else {
    constexpr double per_ps = 1e12;
    const double wt = m.omega_TO / per_ps;
    const double W = Omega / per_ps;
    const double g = m.gamma / per_ps;
    factor = wt * wt / complex(W, -W * g);
  }
  return m.plateau() * (1.0 + m.C0 * factor);
}

/// Measured THz index, linearly interpolated in frequency.
class TabulatedIndex {
 public:
  struct Sample {
    double omega;
    double n_re;
    double alpha;  // 1/m
  };

  TabulatedIndex() = default;
  explicit TabulatedIndex(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw Error(ErrorCode::FormatError, "tabulated index needs at least two rows");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!(s.omega > 0.0)) throw Error(ErrorCode::FormatError, "tabulated index frequencies must be positive");
      if (!(s.n_re > 0.0) || s.alpha < 0.0) throw Error(ErrorCode::FormatError, "tabulated index needs n_re > 0, alpha >= 0");
      if (i > 0 && !(s.omega > samples_[i - 1].omega)) {
        throw Error(ErrorCode::FormatError, "tabulated index frequencies must be strictly increasing");
      }
    }
  }

  /// Header `freq_thz,n_re,alpha_per_m`.
  static TabulatedIndex from_csv(std::istream& in) {
    auto rows = io::read_numeric_csv(in, {"freq_thz", "n_re", "alpha_per_m"});
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    for (const auto& r : rows) samples.push_back({thz_to_rad(r[0]), r[1], r[2]});
    return TabulatedIndex(std::move(samples));
  }
  static TabulatedIndex from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    return from_csv(in);
  }

  const std::vector<Sample>& samples() const { return samples_; }
  double omega_min() const { return samples_.front().omega; }
  double omega_max() const { return samples_.back().omega; }

  complex operator()(double Omega) const {
    if (samples_.empty() || Omega < omega_min() || Omega > omega_max()) {
      throw Error(ErrorCode::OutOfTableRange,
                  "Omega = " + std::to_string(rad_to_thz(Omega)) + " THz is outside the tabulated index range");
    }
    auto it = std::lower_bound(samples_.begin(), samples_.end(), Omega,
                               [](const Sample& s, double w) { return s.omega < w; });
    if (it->omega == Omega) return {it->n_re, it->alpha * constants::c / Omega};
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (Omega - lo.omega) / (hi.omega - lo.omega);
    const double n_re = lo.n_re + t * (hi.n_re - lo.n_re);
    const double alpha = lo.alpha + t * (hi.alpha - lo.alpha);
    return {n_re, alpha * constants::c / Omega};
  }

 private:
  std::vector<Sample> samples_;
};

inline complex tabulated_index(const TabulatedIndex& tab, double Omega) { return tab(Omega); }

using ThzIndex = std::variant<PhononResonanceModel, TabulatedIndex>;

inline complex thz_index(const ThzIndex& model, double Omega) {
  return std::visit(
      [&](const auto& m) -> complex {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, PhononResonanceModel>) {
          return phonon_index(m, Omega);
        } else {
          return tabulated_index(m, Omega);
        }
      },
      model);
}

/// Bose-Einstein occupation 1 / (exp(hbar W / k_B T) - 1); zero at T = 0.
inline double thermal_occupation(double Omega, double T) {
  if (!(Omega > 0.0)) throw Error(ErrorCode::NonpositiveFrequency, "thermal occupation needs Omega > 0");
  if (T < 0.0) throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * Omega / (constants::k_B * T));
}

}  // namespace eosvac::materials
