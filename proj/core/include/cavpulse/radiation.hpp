#pragma once

#include <array>

#include "cavpulse/config.hpp"

namespace cavpulse {

/// Truncation of the infinite ray sums in the emitted energy density.
///
/// A single sum stops at the first index n whose rigorous tail bound
/// r^{2n} (Omega^2 max(f'^2, 1) + theta^2 f'^2) / (1 - q) falls below
/// `tail_tolerance` (Omega^2 + theta^2), where q bounds the term-to-term
/// growth. Double sums use the analogous bound on r^n f'. `pair_cap` limits |n - m| in the double sums; 0 derives it from
/// the decay of the thermal kernel.
struct TruncationPolicy {
  double tail_tolerance = 1e-12;
  int max_index = 10000;
  int pair_cap = 0;

  void validate() const;
};

/// Emitted energy density at one instant. Values are raw internal units
/// (hbar = c = 1, time in the units of the config); divide by Omega^2 for
/// hbar*Omega^2 units.
struct DensityPoint {
  double t = 0.0;
  double e_u = 0.0;
  double background = 0.0;
  /// (e_u - background) / background, or e_u / (Omega^2 / 48 pi) in vacuum.
  double contrast = 0.0;
  /// Contributions of the direct-reflection, even-ray, odd-ray, cross,
  /// even-even and odd-odd pieces, in that order.
  std::array<double, 6> terms{};
  int single_terms = 0;
  int pair_terms = 0;
  int pair_cap = 0;
  /// True when max_index stopped a sum before its tail bound was met.
  bool index_capped = false;
};

/// Switch between the closed form and the Laurent series of theta^2/sinh^2.
inline constexpr double kKernelSeriesSwitch = 1e-4;

/// theta^2 / sinh^2(theta delta / 2), the thermal correlation kernel, with
/// its vacuum limit 4 / delta^2 at theta = 0. Throws SingularKernel for
/// delta = 0.
[[nodiscard]] double thermal_kernel(double delta, double theta);

/// hbar theta^2 / 48 pi.
[[nodiscard]] double background_density(const CavityConfig& cfg) noexcept;

/// Energy density emitted through mirror 2 at time t.
[[nodiscard]] DensityPoint energy_density(double t, const CavityConfig& cfg,
                                          const TruncationPolicy& trunc = {});

}  // namespace cavpulse
