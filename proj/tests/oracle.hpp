#pragma once

// Slow, direct reference implementations used only by the tests. They share no
// code with the library beyond CavityConfig accessors.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cavpulse/config.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline cplx i_pow(int n) { return std::pow(cplx(0.0, 1.0), n); }

// a_p, b_p straight from the powers of i.
inline void coefficients(int p, const cavpulse::CavityConfig& cfg, cplx& a, cplx& b) {
  const cplx phase = std::pow(cplx(0.0, -1.0), cfg.K() * p);
  a = phase * std::cosh(p * cfg.alpha());
  b = i_pow(2 * cfg.K() + 1) * phase * std::sinh(p * cfg.alpha());
}

inline cplx image(double u, int p, const cavpulse::CavityConfig& cfg) {
  cplx a, b;
  coefficients(p, cfg, a, b);
  const cplx z = std::polar(1.0, cfg.omega() * u);
  return (a * z + b) / (std::conj(b) * z + std::conj(a));
}

// f_p(u) by tracking the phase of image / static phase from u = 0 in small steps.
inline double dephasing(double u, int p, const cavpulse::CavityConfig& cfg, int steps = 4000) {
  const double omega = cfg.omega();
  const double L = cfg.length();
  const double static_sign = (cfg.K() * p) % 2 == 0 ? 1.0 : -1.0;
  const auto reduced = [&](double x) {
    return std::arg(image(x, p, cfg) * static_sign * std::polar(1.0, -omega * x));
  };
  double phase = reduced(0.0);
  double prev = phase;
  for (int s = 1; s <= steps; ++s) {
    const double x = u * s / steps;
    const double cur = reduced(x);
    double d = cur - prev;
    while (d > pi) d -= 2 * pi;
    while (d < -pi) d += 2 * pi;
    phase += d;
    prev = cur;
  }
  return u - p * L + phase / omega;
}

inline double derivative(double u, int p, const cavpulse::CavityConfig& cfg) {
  cplx a, b;
  coefficients(p, cfg, a, b);
  return 1.0 / std::norm(std::conj(b) * std::polar(1.0, cfg.omega() * u) + std::conj(a));
}

inline double kernel(double delta, double theta) {
  if (theta == 0.0) return 4.0 / (delta * delta);
  const double s = std::sinh(0.5 * theta * delta);
  return theta * theta / (s * s);
}

// Energy density summed term by term to a fixed ray count, hbar = 1.
inline double energy_density(double t, const cavpulse::CavityConfig& cfg, int rays) {
  const double om2 = cfg.omega() * cfg.omega();
  const double th2 = cfg.theta() * cfg.theta();
  const double r = cfg.r();
  const auto local = [&](double d) { return om2 * (d * d - 1.0) + th2 * d * d; };

  std::vector<double> fe(rays), de(rays), fo(rays), dd(rays);
  for (int n = 0; n < rays; ++n) {
    fe[n] = dephasing(t, 2 * n, cfg, 400);
    de[n] = derivative(t, 2 * n, cfg);
    fo[n] = dephasing(t, 2 * n + 1, cfg, 400);
    dd[n] = derivative(t, 2 * n + 1, cfg);
  }
  const double fm = dephasing(t, -1, cfg, 400);
  const double dm = derivative(t, -1, cfg);

  double e = cfg.R2() / (48 * pi) * local(dm);
  double even = 0, odd = 0, cross = 0, ee = 0, oo = 0;
  for (int n = 0; n < rays; ++n) {
    const double w = std::pow(r, 2 * n);
    even += w * local(de[n]);
    odd += w * local(dd[n]);
    cross += std::pow(r, n + 1) * dm * dd[n] * kernel(fm - fo[n], cfg.theta());
    for (int m = 0; m < rays; ++m) {
      if (m == n) continue;
      const double wp = std::pow(r, n + m);
      ee += wp * de[n] * de[m] * kernel(fe[n] - fe[m], cfg.theta());
      oo += wp * dd[n] * dd[m] * kernel(fo[n] - fo[m], cfg.theta());
    }
  }
  // kernel() already carries theta^2 (or 4/delta^2 in vacuum).
  e += cfg.T1() * cfg.T2() / (48 * pi) * even;
  e += cfg.T2() * cfg.T2() * cfg.R1() / (48 * pi) * odd;
  e += cfg.T2() / (8 * pi) * cross;
  e -= cfg.T1() * cfg.T2() / (16 * pi) * ee;
  e -= cfg.T2() * cfg.T2() * cfg.R1() / (16 * pi) * oo;
  return e;
}

// F(theta) by the defining lattice sum in long double.
inline double F_factor(double theta, int K, double omega) {
  const long double x = theta / omega;
  long double s = 0;
  for (int l = 1; l < 100000; ++l) {
    const long double sh = std::sinh(2 * std::numbers::pi_v<long double> * K * l * x);
    const long double term = 1 / (sh * sh);
    s += term;
    if (term < 1e-30L * (s + 1)) break;
  }
  return static_cast<double>(1 + x * x * (1 - 24 * s));
}

}  // namespace oracle
