#include "cavpulse/dephasing.hpp"

#include <cmath>
#include <limits>

#include "cavpulse/units.hpp"

namespace cavpulse {

namespace {

int parity_sign(int K) { return (K % 2 == 0) ? 1 : -1; }

}  // namespace

std::complex<double> minus_i_power(long long n) noexcept {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

std::complex<double> MobiusCoefficients::apply(std::complex<double> z) const {
  return (a * z + b) / (std::conj(b) * z + std::conj(a));
}

MobiusCoefficients mobius_coefficients(int p, const CavityConfig& cfg) {
  MobiusCoefficients m;
  m.p = p;
  m.rapidity = p * cfg.alpha();
  const auto phase = minus_i_power(static_cast<long long>(cfg.K()) * p);
  // i^{2K+1} = i (-1)^K
  const std::complex<double> lead{0.0, static_cast<double>(parity_sign(cfg.K()))};
  m.a = phase * std::cosh(m.rapidity);
  m.b = lead * phase * std::sinh(m.rapidity);
  return m;
}

RayEvaluator::RayEvaluator(const CavityConfig& cfg, double u)
    : alpha_(cfg.alpha()),
      length_(cfg.length()),
      omega_(cfg.omega()),
      sigma_(parity_sign(cfg.K())) {
  const double phase = std::remainder(omega_ * u, kTwoPi);
  sin_ = std::sin(phase);
  cos_ = std::cos(phase);
  const double up = std::sin(0.25 * kPi + 0.5 * phase);
  const double down = std::sin(0.25 * kPi - 0.5 * phase);
  one_plus_sin_ = 2.0 * up * up;
  one_minus_sin_ = 2.0 * down * down;
}

RayState RayEvaluator::operator()(int p) const noexcept {
  const double x = p * alpha_;
  if (x == 0.0) return {-p * length_, 1.0};

  const double ax = std::abs(x);
  const double e = std::exp(-2.0 * ax);
  const double tanh_abs = -std::expm1(-2.0 * ax) / (1.0 + e);
  const double one_minus_tanh = 2.0 * e / (1.0 + e);
  const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));

  // w / cosh(x) = 1 + s' tanh|x| sin + i s' tanh|x| cos with s' = sigma sgn(p);
  // the real part is rewritten as a sum of non-negative pieces.
  const int s = (p > 0) ? sigma_ : -sigma_;
  const double lift = (s > 0) ? one_plus_sin_ : one_minus_sin_;
  const double re = one_minus_tanh + tanh_abs * lift;
  const double im = s * tanh_abs * cos_;

  const double modulus2 = re * re + im * im;
  RayState out;
  out.offset = -p * length_ + 2.0 * std::atan2(im, re) / omega_;
  out.slope = modulus2 > 0.0 ? sech2 / modulus2 : std::numeric_limits<double>::infinity();
  return out;
}

double RayEvaluator::slope_bound(int p) const noexcept {
  const double ax = std::abs(p * alpha_);
  if (ax == 0.0) return 1.0;
  const int s = (p > 0) ? sigma_ : -sigma_;
  const double lift = (s > 0) ? one_plus_sin_ : one_minus_sin_;
  const double grow = std::exp(2.0 * ax);
  if (lift <= 0.0) return grow;
  return std::min(grow, 2.0 / (lift * grow));
}

DephasingEvaluation dephasing(double u, int p, const CavityConfig& cfg) {
  require_below_threshold(cfg);
  const RayState ray = RayEvaluator(cfg, u)(p);

  DephasingEvaluation out;
  out.u = u;
  out.p = p;
  out.value = u + ray.offset;
  out.derivative = ray.slope;

  const double omega = cfg.omega();
  const auto m = mobius_coefficients(p, cfg);
  std::complex<double> image = m.apply(std::polar(1.0, omega * u));
  if (!std::isfinite(image.real()) || !std::isfinite(image.imag())) {
    image = std::polar(1.0, omega * out.value);
  }
  out.branch_index = std::llround((omega * out.value - std::arg(image)) / kTwoPi);
  return out;
}

double dephasing_derivative(double u, int p, const CavityConfig& cfg) {
  return RayEvaluator(cfg, u)(p).slope;
}

}  // namespace cavpulse
