#pragma once

#include "cavpulse/config.hpp"

namespace cavpulse {

/// How the factor written (1 + theta^2) in the period-integrated energies is
/// read. Ratio evaluates 1 + (theta/Omega)^2; Literal evaluates 1 + theta^2
/// with theta in the config's own units (identical when Omega = 1).
enum class ThetaConvention { Ratio, Literal };

[[nodiscard]] const char* to_string(ThetaConvention c) noexcept;

/// Period-integrated energies, all in units of hbar*Omega.
struct EnergyBudget {
  double E_total = 0.0;
  double E_background = 0.0;
  double E_motion = 0.0;
  double E_intracavity = 0.0;
  double E_intracavity_background = 0.0;
  double E_intracavity_motion = 0.0;
  double F_value = 0.0;
  double photons_emitted = 0.0;
  double photons_intracavity = 0.0;
  bool at_threshold = false;
  ThetaConvention convention = ThetaConvention::Ratio;
};

/// Below this theta/Omega the lattice sum in F is replaced by its resummed
/// small-temperature form.
inline constexpr double kSmallThetaSwitch = 1e-3;

/// F(theta) = 1 + (theta/Omega)^2 (1 - 24 sum_l 1/sinh^2(2 pi K l theta/Omega)).
///
/// For theta/Omega < kSmallThetaSwitch the sum is replaced by
///   sum_l csch^2(l x) = pi^2/(6 x^2) - 1/x + 1/6 + O(exp(-2 pi^2 / x)),
/// giving F = 1 - 1/K^2 + 12 tau/(pi K) - 3 tau^2 with tau = theta/Omega.
[[nodiscard]] double F_factor(double theta, int K, double omega, double tol = 1e-16);

/// Direct lattice sum, no small-theta branch; exposed for the seam checks.
[[nodiscard]] double F_factor_series(double theta, int K, double omega, double tol = 1e-16);

/// Resummed small-theta form only.
[[nodiscard]] double F_factor_small(double theta, int K, double omega) noexcept;

/// The closed forms below need only these; they are not restricted to
/// validated configs so the pole at alpha = rho stays reachable.
struct BudgetInputs {
  int K = 1;
  double rho = 0.0;
  double alpha = 0.0;
  double theta_ratio = 0.0;
  /// Value of theta used by ThetaConvention::Literal.
  double theta_literal = 0.0;
  ThetaConvention convention = ThetaConvention::Ratio;
};

/// Throws PoleProximity if |rho - alpha| / rho < kPoleTolerance.
inline constexpr double kPoleTolerance = 1e-6;

[[nodiscard]] EnergyBudget evaluate_budget(const BudgetInputs& in, double tol = 1e-16);

/// Emitted energy E and intracavity energy over one mechanical period.
///
/// Accepts configs up to and including the threshold alpha_eff = 1, where
/// the closed form is finite. Photon counts are 2 E / (hbar Omega) for the
/// motion-induced parts.
[[nodiscard]] EnergyBudget energy_budget(const CavityConfig& cfg, double tol = 1e-16,
                                         ThetaConvention convention = ThetaConvention::Ratio);

/// Threshold energies, written directly in their alpha = rho/2 form.
[[nodiscard]] EnergyBudget threshold_budget(const CavityConfig& cfg, double tol = 1e-16,
                                            ThetaConvention convention = ThetaConvention::Ratio);

struct PhotonEstimate {
  double count = 0.0;
  /// theta/Omega <= 10: outside the high-temperature estimate.
  bool regime_warning = false;
};

/// Photons per pulse. For theta/Omega > 10 this is (rho/9)(theta/Omega)^2;
/// otherwise the threshold emission per period divided by pulses_per_period.
[[nodiscard]] PhotonEstimate photons_per_pulse(const CavityConfig& cfg, int pulses_per_period = 1);

}  // namespace cavpulse
