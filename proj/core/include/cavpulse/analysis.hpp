#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cavpulse/config.hpp"
#include "cavpulse/radiation.hpp"

namespace cavpulse {

/// Energy density sampled on a uniform grid over [0, 2 pi / Omega).
struct DensitySeries {
  std::vector<double> times;
  std::vector<double> values;
  double background = 0.0;
  double omega = 1.0;
  double period = 0.0;
  TruncationPolicy truncation;
  std::uint64_t cfg_fingerprint = 0;
};

inline constexpr int kMinSamples = 64;
inline constexpr int kDefaultSamples = 2048;

/// Deterministic for fixed inputs regardless of `workers`.
[[nodiscard]] DensitySeries sample_period(const CavityConfig& cfg, int n_samples = kDefaultSamples,
                                          const TruncationPolicy& trunc = {}, unsigned workers = 1);

/// Instant within [0, period) at which every f'_p, p > 0, peaks:
/// sin(Omega t) = -(-1)^K.
[[nodiscard]] double pulse_center(const CavityConfig& cfg) noexcept;

struct Pulse {
  double time = 0.0;    // sub-grid peak position
  double height = 0.0;  // interpolated e_u at the peak
  double width = 0.0;   // full width at half prominence
  double energy = 0.0;  // integral of e_u - background over the width, hbar*Omega
  double photons = 0.0; // 2 energy
};

struct PulseTrain {
  std::vector<Pulse> peaks;
  double spacing_mean = 0.0;
  double spacing_stddev = 0.0;
  int pulses_per_period = 0;
};

/// Finds pulses rising above the background by at least
/// prominence_factor * (largest excess). Spacings wrap around the period.
/// Throws NoPulses when nothing rises above the numerical noise floor.
[[nodiscard]] PulseTrain detect_pulses(const DensitySeries& series, double prominence_factor = 0.5);

struct QuadratureOptions {
  /// Integration window start; NaN places it on pulse_center(cfg).
  double window_start = std::numeric_limits<double>::quiet_NaN();
  int max_panels = 4000;
};

/// Energy emitted over one period, in units of hbar*Omega.
struct QuadratureResult {
  double energy = 0.0;
  double background_energy = 0.0;  // background_density * period / Omega
  double excess_energy = 0.0;      // integral of (e_u - background)
  double error_estimate = 0.0;
  int evaluations = 0;
  int panels = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of the emitted energy
/// density over one period. Only the radiation module is used, so the result
/// is independent of the period-integrated closed forms.
///
/// Converged when the summed error estimate is below
/// quad_tol * max(|excess|, background_energy, 1e-12).
[[nodiscard]] QuadratureResult quadrature_energy(const CavityConfig& cfg,
                                                 const TruncationPolicy& trunc, double quad_tol,
                                                 const QuadratureOptions& options = {});

/// Periodic trapezoid rule with n equispaced nodes, for cross-checking.
[[nodiscard]] QuadratureResult uniform_period_energy(const CavityConfig& cfg,
                                                     const TruncationPolicy& trunc, int n,
                                                     unsigned workers = 1);

}  // namespace cavpulse
