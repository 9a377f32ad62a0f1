#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cavpulse {

/// Unvalidated parameter set, as read from a config file, a preset or flags.
/// Any field may be absent; validate_config fills in what can be derived.
struct RawParameters {
  std::optional<int> K;
  std::optional<double> omega;
  std::optional<double> length;
  std::optional<double> alpha;
  std::optional<double> alpha_eff;
  std::optional<double> rho;
  std::optional<double> r;
  std::optional<double> R1, T1, R2, T2;
  std::optional<double> theta;
};

/// How far towards the parametric threshold a config may go.
///
/// Time-domain quantities diverge at alpha_eff = 1, so they need
/// BelowThreshold. The period-integrated closed forms stay finite there and
/// accept UpToThreshold, which admits alpha_eff = 1 as the threshold limit.
enum class ThresholdGate { BelowThreshold, UpToThreshold };

/// A validated, immutable cavity description. Only validate_config builds one.
class CavityConfig {
 public:
  [[nodiscard]] int K() const noexcept { return K_; }
  [[nodiscard]] double omega() const noexcept { return omega_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] double period() const noexcept;
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }
  [[nodiscard]] double r() const noexcept { return r_; }
  [[nodiscard]] double R1() const noexcept { return R1_; }
  [[nodiscard]] double T1() const noexcept { return T1_; }
  [[nodiscard]] double R2() const noexcept { return R2_; }
  [[nodiscard]] double T2() const noexcept { return T2_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double alpha_eff() const noexcept { return alpha_eff_; }
  [[nodiscard]] double theta_ratio() const noexcept { return theta_ / omega_; }
  [[nodiscard]] bool below_threshold() const noexcept { return alpha_eff_ < 1.0; }

  /// Round-trips back into raw form; validate_config(c.raw()) == c.
  [[nodiscard]] RawParameters raw() const;

  /// 64-bit FNV-1a over the bit patterns of every field.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const CavityConfig&, const CavityConfig&) = default;

 private:
  friend CavityConfig validate_config(const RawParameters&, ThresholdGate);
  CavityConfig() = default;

  int K_ = 1;
  double omega_ = 1.0;
  double length_ = 0.0;
  double alpha_ = 0.0;
  double rho_ = 0.0;
  double r_ = 1.0;
  double R1_ = 1.0, T1_ = 0.0, R2_ = 1.0, T2_ = 0.0;
  double theta_ = 0.0;
  double alpha_eff_ = 0.0;
};

/// Relative tolerance for r = exp(-2 rho) = sqrt(R1 R2), Omega = K pi / L and
/// the other redundant pairs.
inline constexpr double kConsistencyTolerance = 1e-9;

/// Builds a CavityConfig from a raw parameter set.
///
/// Required: K, one of {omega, length}, one of {alpha, alpha_eff} and enough
/// of {rho, r, R1/T1, R2/T2} to fix the roundtrip attenuation. Mirror 1
/// defaults to perfectly reflecting (T1 = 0). When rho and r are both given r
/// wins and rho must agree with -ln(r)/2.
///
/// Throws Error with InvalidParameter, InconsistentMirrors or
/// ThresholdExceeded.
[[nodiscard]] CavityConfig validate_config(
    const RawParameters& raw, ThresholdGate gate = ThresholdGate::BelowThreshold);

/// Throws ThresholdExceeded unless cfg.alpha_eff() < 1.
void require_below_threshold(const CavityConfig& cfg);

/// Returns a copy of cfg with a new rapidity, revalidated under `gate`.
[[nodiscard]] CavityConfig with_alpha(const CavityConfig& cfg, double alpha,
                                      ThresholdGate gate = ThresholdGate::BelowThreshold);

[[nodiscard]] std::string describe(const CavityConfig& cfg);

}  // namespace cavpulse
