#include "cavpulse/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "cavpulse/dephasing.hpp"
#include "cavpulse/error.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse {

namespace {

// theta^2 / sinh^2(theta |delta| / 2) for delta != 0 and theta > 0.
inline double kernel_unchecked(double delta, double theta) {
  if (theta == 0.0) return 4.0 / (delta * delta);
  const double y = 0.5 * theta * std::abs(delta);
  if (y < kKernelSeriesSwitch) {
    const double t2 = theta * theta;
    return 4.0 / (delta * delta) - t2 / 3.0 + t2 * t2 * delta * delta / 60.0;
  }
  // 4 theta^2 e^{-2y} / (1 - e^{-2y})^2 stays finite for any y.
  const double e = std::exp(-2.0 * y);
  const double d = -std::expm1(-2.0 * y);
  return 4.0 * theta * theta * e / (d * d);
}

[[noreturn]] void singular(int n, int m, double t, const char* family) {
  std::ostringstream os;
  os.precision(17);
  os << "coincident " << family << " rays n=" << n << " m=" << m << " at t=" << t
     << " (dephasing branch inconsistency)";
  throw Error(ErrorCode::SingularKernel, os.str());
}

// Rays of one family (p = 2n or p = 2n + 1) evaluated at a fixed instant.
struct Family {
  std::vector<double> offset;
  std::vector<double> slope;
  std::vector<double> bound;
};

void extend(Family& f, const RayEvaluator& ev, int parity, int count) {
  for (int n = static_cast<int>(f.offset.size()); n < count; ++n) {
    const int p = 2 * n + parity;
    const RayState s = ev(p);
    f.offset.push_back(s.offset);
    f.slope.push_back(s.slope);
    f.bound.push_back(ev.slope_bound(p));
  }
}

// Sum over n < m < count with m - n <= cap of w_n w_m K(f_n - f_m), doubled.
double pair_sum(const Family& f, const std::vector<double>& weight, int count, int cap,
                double theta, double t, const char* name) {
  double total = 0.0;
  for (int n = 0; n < count; ++n) {
    const int stop = std::min(count, n + cap + 1);
    const double fn = f.offset[n];
    double acc = 0.0;
    if (theta == 0.0) {
      for (int m = n + 1; m < stop; ++m) {
        const double d = fn - f.offset[m];
        acc += weight[m] / (d * d);
      }
      acc *= 4.0;
    } else {
      for (int m = n + 1; m < stop; ++m) {
        const double d = fn - f.offset[m];
        if (d == 0.0) singular(n, m, t, name);
        acc += weight[m] * kernel_unchecked(d, theta);
      }
    }
    total += weight[n] * acc;
  }
  if (theta == 0.0 && !std::isfinite(total)) {
    for (int n = 0; n < count; ++n) {
      for (int m = n + 1; m < std::min(count, n + cap + 1); ++m) {
        if (f.offset[n] == f.offset[m]) singular(n, m, t, name);
      }
    }
  }
  return 2.0 * total;
}

// Smallest |n - m| beyond which the kernel bound times (sum of weights)^2 is
// below tol relative to (Omega^2 + theta^2). Rays p, q satisfy
// |f_p - f_q| > |p - q| L - 2 pi / Omega.
int derive_pair_cap(const CavityConfig& cfg, double weight_sum, double tol, int count) {
  const double scale = cfg.omega() * cfg.omega() + cfg.theta() * cfg.theta();
  const double slack = kTwoPi / cfg.omega();
  for (int d = 1; d < count; ++d) {
    const double gap = 2.0 * (d + 1) * cfg.length() - slack;
    if (gap <= 0.0) continue;
    const double bound = kernel_unchecked(gap, cfg.theta());
    if (bound * weight_sum * weight_sum < tol * scale) return d;
  }
  return std::max(count - 1, 1);
}

}  // namespace

void TruncationPolicy::validate() const {
  if (!(tail_tolerance > 0.0) || !std::isfinite(tail_tolerance)) {
    throw Error(ErrorCode::InvalidParameter,
                "invalid parameter 'tail_tolerance': must be positive");
  }
  if (max_index < 1) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'max_index': must be >= 1");
  }
  if (pair_cap < 0) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'pair_cap': must be >= 0");
  }
}

double thermal_kernel(double delta, double theta) {
  if (delta == 0.0) {
    throw Error(ErrorCode::SingularKernel, "thermal kernel evaluated at coincident rays");
  }
  return kernel_unchecked(delta, theta);
}

double background_density(const CavityConfig& cfg) noexcept {
  return cfg.theta() * cfg.theta() / (48.0 * kPi);
}

DensityPoint energy_density(double t, const CavityConfig& cfg, const TruncationPolicy& trunc) {
  require_below_threshold(cfg);
  trunc.validate();

  const double om2 = cfg.omega() * cfg.omega();
  const double th2 = cfg.theta() * cfg.theta();
  const double theta = cfg.theta();
  const double rho = cfg.rho();
  const double alpha = cfg.alpha();
  const double tol = trunc.tail_tolerance;

  const double w_direct = cfg.R2() / (48.0 * kPi);
  const double w_even = cfg.T1() * cfg.T2() / (48.0 * kPi);
  const double w_odd = cfg.T2() * cfg.T2() * cfg.R1() / (48.0 * kPi);
  const double w_cross = cfg.T2() / (8.0 * kPi);
  const double w_even_pairs = -cfg.T1() * cfg.T2() / (16.0 * kPi);
  const double w_odd_pairs = -cfg.T2() * cfg.T2() * cfg.R1() / (16.0 * kPi);

  const RayEvaluator ev(cfg, t);
  const RayState direct = ev(-1);

  DensityPoint out;
  out.t = t;
  out.background = background_density(cfg);

  const auto local = [&](double slope) { return om2 * (slope * slope - 1.0) + th2 * slope * slope; };
  out.terms[0] = w_direct * local(direct.slope);

  Family even;
  Family odd;

  // Single sums: |local| <= Omega^2 max(f'^2, 1) + theta^2 f'^2, and
  // r^{2n} max(f'^2, 1) grows by at most q1 per step.
  if (w_even != 0.0 || w_odd != 0.0) {
    const double log_q1 = -4.0 * rho + 8.0 * alpha;
    const double inv_tail = 1.0 / -std::expm1(log_q1);
    const double scale = om2 + th2;
    double sum_even = 0.0;
    double sum_odd = 0.0;
    int n = 0;
    for (; n < trunc.max_index; ++n) {
      extend(even, ev, 0, n + 1);
      extend(odd, ev, 1, n + 1);
      const double r2n = std::exp(-4.0 * rho * n);
      const double b2 = std::pow(std::max(even.bound[n], odd.bound[n]), 2);
      if (r2n * (om2 * std::max(b2, 1.0) + th2 * b2) * inv_tail < tol * scale) break;
      sum_even += r2n * local(even.slope[n]);
      sum_odd += r2n * local(odd.slope[n]);
    }
    out.index_capped = out.index_capped || n == trunc.max_index;
    out.single_terms = n;
    out.terms[1] = w_even * sum_even;
    out.terms[2] = w_odd * sum_odd;
  }

  if (w_cross != 0.0) {
    // Double sums: r^n f' grows by at most q2 per step.
    const double log_q2 = -2.0 * rho + 4.0 * alpha;
    const double inv_tail = 1.0 / -std::expm1(log_q2);
    std::vector<double> wt_even;
    std::vector<double> wt_odd;
    double running = 0.0;
    int count = 0;
    for (; count < trunc.max_index; ++count) {
      extend(even, ev, 0, count + 1);
      extend(odd, ev, 1, count + 1);
      const double rn = std::exp(-2.0 * rho * count);
      const double b = std::max(even.bound[count], odd.bound[count]);
      const double tail = rn * b * inv_tail;
      if (tail * std::max(1.0, running + tail) < tol) break;
      wt_even.push_back(rn * even.slope[count]);
      wt_odd.push_back(rn * odd.slope[count]);
      running += std::max(wt_even.back(), wt_odd.back());
    }
    out.index_capped = out.index_capped || count == trunc.max_index;
    out.pair_terms = count;

    double cross = 0.0;
    for (int n = 0; n < count; ++n) {
      const double d = direct.offset - odd.offset[n];
      if (d == 0.0) singular(-1, 2 * n + 1, t, "direct/odd");
      cross += wt_odd[n] * kernel_unchecked(d, theta);
    }
    out.terms[3] = w_cross * cfg.r() * direct.slope * cross;

    const int cap = trunc.pair_cap > 0 ? trunc.pair_cap
                                       : derive_pair_cap(cfg, running, tol, std::max(count, 2));
    out.pair_cap = cap;
    if (w_even_pairs != 0.0) {
      out.terms[4] = w_even_pairs * pair_sum(even, wt_even, count, cap, theta, t, "even");
    }
    if (w_odd_pairs != 0.0) {
      out.terms[5] = w_odd_pairs * pair_sum(odd, wt_odd, count, cap, theta, t, "odd");
    }
  }
  for (double v : out.terms) out.e_u += v;

  out.contrast = out.background > 0.0 ? (out.e_u - out.background) / out.background
                                      : out.e_u / (om2 / (48.0 * kPi));
  return out;
}

}  // namespace cavpulse
