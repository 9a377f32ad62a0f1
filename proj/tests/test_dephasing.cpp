#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cavpulse/dephasing.hpp"
#include "oracle.hpp"

using namespace cavpulse;

namespace {

CavityConfig make(int K, double rho, double alpha, double theta = 0.0) {
  RawParameters p;
  p.K = K;
  p.omega = 1.0;
  p.rho = rho;
  p.alpha = alpha;
  p.theta = theta;
  return validate_config(p);
}

}  // namespace

TEST_CASE("Mobius coefficients") {
  SUBCASE("identity at p = 0") {
    for (int K : {1, 2, 3, 4}) {
      const auto m = mobius_coefficients(0, make(K, 0.05, 0.02));
      CHECK(m.a == std::complex<double>(1.0, 0.0));
      CHECK(m.b == std::complex<double>(0.0, 0.0));
    }
  }
  SUBCASE("hand evaluation for p = 1, K = 2") {
    const auto m = mobius_coefficients(1, make(2, 0.5, 0.1));
    CHECK(m.a.real() == doctest::Approx(-std::cosh(0.1)).epsilon(1e-15));
    CHECK(std::abs(m.a.imag()) < 1e-15);
    CHECK(std::abs(m.b.real()) < 1e-15);
    CHECK(m.b.imag() == doctest::Approx(-0.10016675001984403).epsilon(1e-14));
  }
  SUBCASE("unit determinant") {
    for (int p : {-1, 1, 7, 40}) {
      const auto m = mobius_coefficients(p, make(3, 0.2, 0.05));
      CHECK(std::abs(std::norm(m.a) - std::norm(m.b) - 1.0) < 1e-12 * std::norm(m.a));
    }
  }
  SUBCASE("phases reduce exactly mod 4") {
    CHECK(minus_i_power(0) == std::complex<double>(1, 0));
    CHECK(minus_i_power(1) == std::complex<double>(0, -1));
    CHECK(minus_i_power(-1) == std::complex<double>(0, 1));
    CHECK(minus_i_power(4000000002LL) == std::complex<double>(-1, 0));
  }
  SUBCASE("agree with the direct power formula") {
    const CavityConfig cfg = make(3, 0.1, 0.03);
    for (int p = -3; p <= 9; ++p) {
      oracle::cplx a, b;
      oracle::coefficients(p, cfg, a, b);
      const auto m = mobius_coefficients(p, cfg);
      CHECK(std::abs(m.a - a) < 1e-13 * std::abs(a));
      CHECK(std::abs(m.b - b) < 1e-13 * std::abs(a));
    }
  }
}

TEST_CASE("static cavity maps u to u - pL") {
  const CavityConfig cfg = make(2, 0.05, 0.0);
  for (int p : {-1, 0, 1, 5, 30}) {
    for (double u : {-3.0, 0.0, 0.4, 2.9, 17.0}) {
      const auto d = dephasing(u, p, cfg);
      CHECK(d.value == doctest::Approx(u - p * cfg.length()).epsilon(1e-14));
      CHECK(d.derivative == 1.0);
      CHECK(dephasing_derivative(u, p, cfg) == 1.0);
    }
  }
}

TEST_CASE("p = 0 is the identity") {
  const CavityConfig cfg = make(3, 0.05, 0.02);
  for (double u : {-1.0, 0.3, 5.5}) {
    CHECK(dephasing(u, 0, cfg).value == doctest::Approx(u));
    CHECK(dephasing(u, 0, cfg).derivative == doctest::Approx(1.0));
  }
}

TEST_CASE("agrees with the phase-tracking oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int K = 1 + static_cast<int>(U(rng) * 4);
    const double rho = 0.01 + 0.2 * U(rng);
    const double alpha = 0.95 * U(rng) * rho / 2;
    const CavityConfig cfg = make(K, rho, alpha);
    const int p = -1 + static_cast<int>(U(rng) * 60);
    const double u = (U(rng) * 3 - 1) * cfg.period();
    const double ref = oracle::dephasing(u, p, cfg);
    CHECK(dephasing(u, p, cfg).value == doctest::Approx(ref).epsilon(1e-10).scale(cfg.period()));
    CHECK(dephasing(u, p, cfg).derivative ==
          doctest::Approx(oracle::derivative(u, p, cfg)).epsilon(1e-11));
  }
}

TEST_CASE("small rapidity limit") {
  const CavityConfig cfg = make(2, 0.05, 1e-6);
  const double u = 0.3 * cfg.period();
  CHECK(std::abs(dephasing(u, 4, cfg).value - (u - 4 * cfg.length())) < 1e-4);

  // sup_u |f_p - (u - pL)| shrinks linearly with alpha
  double prev = 0.0;
  for (double alpha : {1e-3, 1e-4, 1e-5}) {
    const CavityConfig c = make(2, 0.05, alpha);
    double sup = 0.0;
    for (int j = 0; j < 64; ++j) {
      const double x = j * c.period() / 64;
      sup = std::max(sup, std::abs(dephasing(x, 6, c).value - (x - 6 * c.length())));
    }
    if (prev > 0.0) {
      const double ratio = prev / sup;
      CHECK(ratio > 5.0);
      CHECK(ratio < 20.0);
    }
    prev = sup;
  }
}

TEST_CASE("derivative against finite differences") {
  const CavityConfig cfg = make(2, 0.05, 0.02);
  const double h = 1e-5;
  for (double u : {0.0, 0.7, 2.1, 4.4}) {
    for (int p : {-1, 1, 10, 25}) {
      const double fd = (dephasing(u + h, p, cfg).value - dephasing(u - h, p, cfg).value) / (2 * h);
      CHECK(std::abs(fd / dephasing_derivative(u, p, cfg) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("monotone and quasi-periodic") {
  const CavityConfig cfg = make(3, 0.05, 0.024);
  const double P = cfg.period();
  for (int p : {-1, 1, 2, 15, 60}) {
    double mean = 0.0;
    const int n = 512;
    for (int j = 0; j < n; ++j) {
      const double u = j * P / n;
      const auto d = dephasing(u, p, cfg);
      CHECK(d.derivative > 0.0);
      CHECK(std::abs(dephasing(u + P, p, cfg).value - d.value - P) < 1e-10 * P);
      mean += d.derivative / n;
    }
    // periodic trapezoid rule is spectrally accurate here
    CHECK(mean == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("exp(i Omega f) reproduces the Mobius image") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double rho = 0.005 + 0.3 * U(rng);
    const CavityConfig cfg = make(1 + trial % 5, rho, 0.999 * U(rng) * rho / 2);
    const int p = -1 + static_cast<int>(U(rng) * 200);
    const double u = (U(rng) - 0.5) * 40.0;
    const auto d = dephasing(u, p, cfg);
    const auto lhs = std::polar(1.0, cfg.omega() * d.value);
    CHECK(std::abs(lhs - oracle::image(u, p, cfg)) < 1e-10);
  }
}

TEST_CASE("ray evaluator matches the public functions") {
  const CavityConfig cfg = make(3, 0.05, 0.02);
  for (double u : {0.1, 1.9, 5.0}) {
    const RayEvaluator ev(cfg, u);
    for (int p : {-1, 0, 3, 50}) {
      const auto d = dephasing(u, p, cfg);
      CHECK(ev(p).offset == doctest::Approx(d.value - u).scale(1.0));
      CHECK(ev(p).slope == doctest::Approx(d.derivative));
      CHECK(ev.slope_bound(p) >= ev(p).slope * (1 - 1e-12));
    }
  }
}

TEST_CASE("very large ray index stays finite") {
  const CavityConfig cfg = make(2, 0.05, 0.024);
  for (int p : {500, 5000}) {
    for (double frac : {0.25, 0.75}) {
      const auto d = dephasing(frac * cfg.period(), p, cfg);
      CHECK(std::isfinite(d.value));
      CHECK(std::isfinite(d.derivative));
      CHECK(d.derivative > 0.0);
    }
  }
  // 2 p alpha = 960: the trough value e^{-960} underflows, the peak saturates
  const auto trough = dephasing(0.25 * cfg.period(), 20000, cfg);
  CHECK(std::isfinite(trough.value));
  CHECK(trough.derivative >= 0.0);
}
