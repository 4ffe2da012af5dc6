#pragma once

#include <numbers>

namespace eosvac {

// CODATA 2018, SI.
namespace constants {
inline constexpr double c = 299792458.0;          // m/s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double mu0 = 1.25663706212e-6;   // N/A^2
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_B = 1.380649e-23;       // J/K
inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
}  // namespace constants

// Files and the CLI speak ordinary frequency in THz, everything else is rad/s.
inline constexpr double thz_to_rad(double f_thz) { return 2.0 * constants::pi * 1e12 * f_thz; }
inline constexpr double rad_to_thz(double omega) { return omega / (2.0 * constants::pi * 1e12); }

inline constexpr double um = 1e-6;
inline constexpr double fs = 1e-15;

}  // namespace eosvac
