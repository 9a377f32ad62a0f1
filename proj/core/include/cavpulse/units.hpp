#pragma once

#include <numbers>

namespace cavpulse {

/// Physical constants (CODATA 2018, exact SI values) and the unit convention.
///
/// Internal arithmetic is done with hbar = c = 1. Energies are reported in
/// units of hbar*Omega and energy densities in units of hbar*Omega^2; SI only
/// appears at the command-line boundary.
struct Units {
  static constexpr double hbar = 1.054571817e-34;  // J s
  static constexpr double kB = 1.380649e-23;       // J / K
  static constexpr bool natural = true;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// theta = 2 pi kB T / hbar, in rad/s. Throws InvalidParameter for T < 0.
[[nodiscard]] double temperature_to_theta(double kelvin);

/// Inverse of temperature_to_theta.
[[nodiscard]] double theta_to_temperature(double theta_rad_per_s);

/// Omega-normalized representation of an SI (Omega, T) pair: time is measured
/// in units of 1/Omega so the mechanical frequency becomes 1 and theta becomes
/// the ratio theta/Omega.
struct NaturalScale {
  double omega_si = 1.0;  // rad/s

  [[nodiscard]] double theta_ratio(double kelvin) const;
  [[nodiscard]] double kelvin(double theta_ratio) const;
  [[nodiscard]] double energy_joule(double energy_in_hbar_omega) const {
    return energy_in_hbar_omega * Units::hbar * omega_si;
  }
};

}  // namespace cavpulse
