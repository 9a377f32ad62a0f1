#include "cavpulse/energetics.hpp"

#include <cmath>

#include "cavpulse/error.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse {

namespace {

void check_theta(double theta, int K, double omega) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'theta': must be non-negative");
  }
  if (K < 1) throw Error(ErrorCode::InvalidParameter, "invalid parameter 'K': must be >= 1");
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'omega': must be positive");
  }
}

// 1/sinh^2(y) for y > 0 without overflow.
double csch2(double y) {
  const double e = std::exp(-2.0 * y);
  const double d = -std::expm1(-2.0 * y);
  return 4.0 * e / (d * d);
}

BudgetInputs inputs_from(const CavityConfig& cfg, ThetaConvention convention) {
  BudgetInputs in;
  in.K = cfg.K();
  in.rho = cfg.rho();
  in.alpha = cfg.alpha();
  in.theta_ratio = cfg.theta_ratio();
  in.theta_literal = cfg.theta();
  in.convention = convention;
  return in;
}

double one_plus_theta2(const BudgetInputs& in) {
  const double th = in.convention == ThetaConvention::Ratio ? in.theta_ratio : in.theta_literal;
  return 1.0 + th * th;
}

}  // namespace

const char* to_string(ThetaConvention c) noexcept {
  return c == ThetaConvention::Ratio ? "1+theta^2/Omega^2" : "1+theta^2";
}

double F_factor_small(double theta, int K, double omega) noexcept {
  const double tau = theta / omega;
  const double k = static_cast<double>(K);
  return 1.0 - 1.0 / (k * k) + 12.0 * tau / (kPi * k) - 3.0 * tau * tau;
}

double F_factor_series(double theta, int K, double omega, double tol) {
  check_theta(theta, K, omega);
  const double tau = theta / omega;
  if (tau == 0.0) return F_factor_small(theta, K, omega);
  const double x = kTwoPi * K * tau;
  const double weight = 24.0 * tau * tau;
  double sum = 0.0;
  for (long l = 1;; ++l) {
    const double term = csch2(x * static_cast<double>(l));
    sum += term;
    if (weight * term < tol || term == 0.0) break;
  }
  return 1.0 + tau * tau * (1.0 - 24.0 * sum);
}

double F_factor(double theta, int K, double omega, double tol) {
  check_theta(theta, K, omega);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "invalid parameter 'tol': must be positive");
  if (theta / omega < kSmallThetaSwitch) return F_factor_small(theta, K, omega);
  return F_factor_series(theta, K, omega, tol);
}

EnergyBudget evaluate_budget(const BudgetInputs& in, double tol) {
  if (!(in.rho > 0.0)) throw Error(ErrorCode::InvalidParameter, "invalid parameter 'rho': must be positive");
  if (!(in.alpha >= 0.0)) throw Error(ErrorCode::InvalidParameter, "invalid parameter 'alpha': must be non-negative");
  if (std::abs(in.rho - in.alpha) / in.rho < kPoleTolerance) {
    throw Error(ErrorCode::PoleProximity, "alpha is within the pole tolerance of rho");
  }

  const double tau2 = in.theta_ratio * in.theta_ratio;
  const double a2 = in.alpha * in.alpha;
  const double denom = in.rho * in.rho - a2;
  const double k = static_cast<double>(in.K);

  EnergyBudget b;
  b.convention = in.convention;
  b.F_value = F_factor(in.theta_ratio, in.K, 1.0, tol);
  b.E_background = tau2 / 12.0;
  b.E_motion = in.rho * a2 / denom * b.F_value / 6.0 + a2 * one_plus_theta2(in) / 6.0;
  b.E_total = b.E_background + b.E_motion;
  b.E_intracavity_background = k * tau2 / 24.0;
  b.E_intracavity_motion = k / 24.0 * a2 / denom * b.F_value;
  b.E_intracavity = b.E_intracavity_background + b.E_intracavity_motion;
  b.photons_emitted = 2.0 * b.E_motion;
  b.photons_intracavity = 2.0 * b.E_intracavity_motion;
  b.at_threshold = std::abs(2.0 * in.alpha / in.rho - 1.0) <= 1e-12;
  return b;
}

EnergyBudget energy_budget(const CavityConfig& cfg, double tol, ThetaConvention convention) {
  if (cfg.alpha_eff() > 1.0 + 1e-12) require_below_threshold(cfg);
  return evaluate_budget(inputs_from(cfg, convention), tol);
}

EnergyBudget threshold_budget(const CavityConfig& cfg, double tol, ThetaConvention convention) {
  const BudgetInputs in = inputs_from(cfg, convention);
  const double tau2 = in.theta_ratio * in.theta_ratio;
  const double k = static_cast<double>(in.K);

  EnergyBudget b;
  b.convention = convention;
  b.at_threshold = true;
  b.F_value = F_factor(in.theta_ratio, in.K, 1.0, tol);
  b.E_background = tau2 / 12.0;
  b.E_motion = in.rho * b.F_value / 18.0 + in.rho * in.rho * one_plus_theta2(in) / 24.0;
  b.E_total = b.E_background + b.E_motion;
  b.E_intracavity_background = k * tau2 / 24.0;
  b.E_intracavity_motion = k * b.F_value / 72.0;
  b.E_intracavity = b.E_intracavity_background + b.E_intracavity_motion;
  b.photons_emitted = 2.0 * b.E_motion;
  b.photons_intracavity = 2.0 * b.E_intracavity_motion;
  return b;
}

PhotonEstimate photons_per_pulse(const CavityConfig& cfg, int pulses_per_period) {
  if (pulses_per_period < 1) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'pulses_per_period': must be >= 1");
  }
  const double tau = cfg.theta_ratio();
  if (tau > 10.0) return {cfg.rho() / 9.0 * tau * tau, false};
  return {threshold_budget(cfg).photons_emitted / pulses_per_period, true};
}

}  // namespace cavpulse
