#pragma once

#include <complex>

#include "cavpulse/config.hpp"

namespace cavpulse {

/// Coefficients of the homographic map that sends e^{i Omega u} to
/// e^{i Omega f_p(u)}:
///
///   a_p = (-i)^{Kp} cosh(p alpha),  b_p = i^{2K+1} (-i)^{Kp} sinh(p alpha).
///
/// cosh/sinh overflow for |p alpha| > ~710; `rapidity` keeps p*alpha so the
/// scale-free evaluation in RayEvaluator never needs the raw coefficients.
struct MobiusCoefficients {
  int p = 0;
  double rapidity = 0.0;
  std::complex<double> a{1.0, 0.0};
  std::complex<double> b{0.0, 0.0};

  /// Image of z under the map, (a z + b) / (b* z + a*).
  [[nodiscard]] std::complex<double> apply(std::complex<double> z) const;
};

/// (-i)^n reduced modulo 4 in integer arithmetic.
[[nodiscard]] std::complex<double> minus_i_power(long long n) noexcept;

[[nodiscard]] MobiusCoefficients mobius_coefficients(int p, const CavityConfig& cfg);

struct DephasingEvaluation {
  double u = 0.0;
  int p = 0;
  double value = 0.0;       // f_p(u)
  double derivative = 1.0;  // f'_p(u) > 0
  /// k such that Omega f_p(u) = Arg(rhs) + 2 pi k, Arg the principal value.
  long long branch_index = 0;
};

/// f_p(u) on the continuous, increasing branch that reduces to u - pL for a
/// static cavity.
///
/// Dividing the image by the static phase (-1)^{Kp} e^{i Omega u} leaves
/// w / conj(w) with w = 1 + i sigma tanh(p alpha) e^{-i Omega u} and
/// sigma = (-1)^K. Re w > 0 for every u, so the principal argument of w never
/// wraps and f_p(u) = u - pL + (2 / Omega) arg w is continuous without any
/// explicit unwrapping.
[[nodiscard]] DephasingEvaluation dephasing(double u, int p, const CavityConfig& cfg);

/// f'_p(u) = 1 / |b_p* e^{i Omega u} + a_p*|^2, evaluated in overflow-free form.
[[nodiscard]] double dephasing_derivative(double u, int p, const CavityConfig& cfg);

/// f_p(u) - u and f'_p(u) for one ray.
struct RayState {
  double offset = 0.0;
  double slope = 1.0;
};

/// Evaluates many rays at one instant u, sharing the trigonometry.
///
/// `offset` is returned relative to u so that differences f_p - f_q are
/// formed without cancelling the common u.
class RayEvaluator {
 public:
  RayEvaluator(const CavityConfig& cfg, double u);

  [[nodiscard]] RayState operator()(int p) const noexcept;

  /// min(e^{2|p alpha|}, 2 e^{-2|p alpha|} / (1 + sigma sgn(p) sin(Omega u))),
  /// an upper bound on f'_p(u). Growing |p| by one multiplies it by at most
  /// e^{2 alpha}, which is what the series tail bounds rely on.
  [[nodiscard]] double slope_bound(int p) const noexcept;

 private:
  double alpha_;
  double length_;
  double omega_;
  int sigma_;
  double sin_;
  double cos_;
  // 1 + sin(phase) and 1 - sin(phase), each formed without cancellation.
  double one_plus_sin_;
  double one_minus_sin_;
};

}  // namespace cavpulse
