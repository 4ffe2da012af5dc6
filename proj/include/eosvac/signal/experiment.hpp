#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "eosvac/constants.hpp"
#include "eosvac/error.hpp"
#include "eosvac/materials.hpp"
#include "eosvac/pulse.hpp"

namespace eosvac::signal {

using complex = std::complex<double>;

/// One run's full physical parameterisation.
struct ExperimentConfig {
  double crystal_length = 7.0 * um;
  double beam_waist = 3.0 * um;
  double temperature = 0.0;
  materials::SellmeierModel laser_index;
  materials::ThzIndex thz_index = materials::PhononResonanceModel{};
  materials::Chi2Model chi2;
  pulse::PulseSpectrum pulse;
  /// Replaces the Sellmeier group index at omega_c when set.
  std::optional<double> group_index_override;
  /// Multiplies Im n(Omega) of the THz index; 1 leaves the model untouched.
  double thz_absorption_scale = 1.0;

  void validate() const {
    if (!(crystal_length > 0.0)) throw Error(ErrorCode::ConfigError, "crystal length must be positive");
    if (!(beam_waist > 0.0)) throw Error(ErrorCode::ConfigError, "beam waist must be positive");
    if (temperature < 0.0) throw Error(ErrorCode::ConfigError, "temperature must be >= 0");
    if (thz_absorption_scale < 0.0) throw Error(ErrorCode::ConfigError, "absorption scale must be >= 0");
    if (group_index_override && !(*group_index_override > 0.0)) {
      throw Error(ErrorCode::ConfigError, "group index override must be positive");
    }
    if (const auto* ph = std::get_if<materials::PhononResonanceModel>(&thz_index)) ph->validate();
    pulse.validate();
  }
};

/// Rayleigh length w^2 k / 2 at the pulse centre against the crystal length.
struct RayleighCheck {
  double rayleigh_length;
  double crystal_length;
  bool satisfied() const { return crystal_length < rayleigh_length; }
};

}  // namespace eosvac::signal
