#pragma once

#include <numbers>

namespace rpnv {

// CODATA values, SI units.
namespace constants {
inline constexpr double kMu0 = 1.25663706212e-6;      // T·m/A
inline constexpr double kHbar = 1.054571817e-34;      // J·s
inline constexpr double kGammaE = 1.760859630e11;     // rad·s⁻¹·T⁻¹
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Tensor and field inputs are in millitesla; Hamiltonians are in rad/s.
/// This is the only place where that conversion happens.
constexpr double millitesla_to_angular(double mT, double gamma_e = constants::kGammaE) {
  return gamma_e * mT * 1e-3;
}

constexpr double angular_to_millitesla(double omega, double gamma_e = constants::kGammaE) {
  return omega / gamma_e * 1e3;
}

constexpr double nm_to_m(double nm) { return nm * 1e-9; }

// Number density nm⁻³ -> m⁻³.
constexpr double per_nm3_to_per_m3(double xi) { return xi * 1e27; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace rpnv
