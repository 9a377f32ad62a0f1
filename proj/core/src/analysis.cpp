#include "cavpulse/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "cavpulse/error.hpp"
#include "cavpulse/parallel.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse {

namespace {

// Gauss-Kronrod 7/15 abscissae on [-1, 1], positive half, node 7 at 0.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  friend bool operator<(const Panel& x, const Panel& y) { return x.error < y.error; }
};

template <class F>
Panel gauss_kronrod(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

double wrap(double t, double period) {
  double x = std::fmod(t, period);
  return x < 0.0 ? x + period : x;
}

}  // namespace

DensitySeries sample_period(const CavityConfig& cfg, int n_samples, const TruncationPolicy& trunc,
                            unsigned workers) {
  if (n_samples < kMinSamples) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'samples': must be >= 64");
  }
  require_below_threshold(cfg);
  trunc.validate();

  DensitySeries s;
  s.omega = cfg.omega();
  s.period = cfg.period();
  s.background = background_density(cfg);
  s.truncation = trunc;
  s.cfg_fingerprint = cfg.fingerprint();
  s.times.resize(static_cast<std::size_t>(n_samples));
  s.values.resize(static_cast<std::size_t>(n_samples));
  const double step = s.period / n_samples;
  for (int i = 0; i < n_samples; ++i) s.times[static_cast<std::size_t>(i)] = i * step;
  parallel_for(s.times.size(), workers,
               [&](std::size_t i) { s.values[i] = energy_density(s.times[i], cfg, trunc).e_u; });
  return s;
}

double pulse_center(const CavityConfig& cfg) noexcept {
  // K even: sin = -1 at 3/4 of the period; K odd: sin = +1 at 1/4.
  return (cfg.K() % 2 == 0 ? 0.75 : 0.25) * cfg.period();
}

PulseTrain detect_pulses(const DensitySeries& series, double prominence_factor) {
  if (!(prominence_factor > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'prominence_factor': must be positive");
  }
  const auto n = static_cast<long>(series.values.size());
  if (n < 3 || series.times.size() != series.values.size()) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'series': needs >= 3 samples");
  }
  const auto& v = series.values;
  const double bg = series.background;
  const double step = series.period / static_cast<double>(n);
  const auto at = [&](long i) { return v[static_cast<std::size_t>(((i % n) + n) % n)]; };

  double max_excess = 0.0;
  for (double x : v) max_excess = std::max(max_excess, x - bg);
  const double noise = 1e-9 * (bg + series.omega * series.omega / (48.0 * kPi));
  if (max_excess <= noise) {
    throw Error(ErrorCode::NoPulses, "no sample rises above the background");
  }
  const double level = bg + prominence_factor * max_excess;

  // Walk regions above `level`, starting just after a sample below it, and
  // keep the highest sample of each region.
  long start = -1;
  for (long i = 0; i < n; ++i) {
    if (v[static_cast<std::size_t>(i)] <= level) {
      start = i;
      break;
    }
  }
  std::vector<long> peak_index;
  if (start < 0) {
    peak_index.push_back(static_cast<long>(std::max_element(v.begin(), v.end()) - v.begin()));
  } else {
    long best = -1;
    for (long k = 1; k <= n; ++k) {
      const long i = start + k;
      if (at(i) > level) {
        if (best < 0 || at(i) > at(best)) best = i;
      } else if (best >= 0) {
        peak_index.push_back(best % n);
        best = -1;
      }
    }
  }
  if (peak_index.empty()) throw Error(ErrorCode::NoPulses, "no pulse above the prominence level");

  PulseTrain train;
  for (long i : peak_index) {
    Pulse p;
    const double ym = at(i - 1);
    const double y0 = at(i);
    const double yp = at(i + 1);
    const double curv = ym - 2.0 * y0 + yp;
    double shift = 0.0;
    if (curv < 0.0) shift = std::clamp(0.5 * (ym - yp) / curv, -0.5, 0.5);
    p.time = wrap((static_cast<double>(i) + shift) * step, series.period);
    p.height = y0 - 0.25 * (ym - yp) * shift;

    const double half = bg + 0.5 * (p.height - bg);
    long left = i;
    while (left > i - n && at(left - 1) >= half) --left;
    long right = i;
    while (right < i + n && at(right + 1) >= half) ++right;

    if (right - left + 1 >= n) {
      p.width = series.period;
      double e = 0.0;
      for (double x : v) e += (x - bg) * step;
      p.energy = e / series.omega;
    } else {
      // Linear crossings between (left-1, left) and (right, right+1).
      const double yl0 = at(left - 1);
      const double yl1 = at(left);
      const double yr0 = at(right);
      const double yr1 = at(right + 1);
      const double fl = (yl1 - half) / (yl1 - yl0);
      const double fr = (yr0 - half) / (yr0 - yr1);
      p.width = (static_cast<double>(right - left) + fl + fr) * step;
      double e = 0.0;
      for (long k = left; k < right; ++k) e += 0.5 * (at(k) + at(k + 1) - 2.0 * bg) * step;
      e += 0.5 * (yl1 - bg + half - bg) * fl * step;
      e += 0.5 * (yr0 - bg + half - bg) * fr * step;
      p.energy = e / series.omega;
    }
    p.photons = 2.0 * p.energy;
    train.peaks.push_back(p);
  }
  std::sort(train.peaks.begin(), train.peaks.end(),
            [](const Pulse& a, const Pulse& b) { return a.time < b.time; });

  const std::size_t count = train.peaks.size();
  train.pulses_per_period = static_cast<int>(count);
  std::vector<double> spacing(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double next = k + 1 < count ? train.peaks[k + 1].time
                                      : train.peaks[0].time + series.period;
    spacing[k] = next - train.peaks[k].time;
  }
  double mean = 0.0;
  for (double s : spacing) mean += s;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (double s : spacing) var += (s - mean) * (s - mean);
  train.spacing_mean = mean;
  train.spacing_stddev = std::sqrt(var / static_cast<double>(count));
  return train;
}

QuadratureResult quadrature_energy(const CavityConfig& cfg, const TruncationPolicy& trunc,
                                   double quad_tol, const QuadratureOptions& options) {
  require_below_threshold(cfg);
  trunc.validate();
  if (!(quad_tol > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'quad_tol': must be positive");
  }

  const double period = cfg.period();
  const double omega = cfg.omega();
  const double bg = background_density(cfg);
  const double start = std::isnan(options.window_start) ? pulse_center(cfg) : options.window_start;

  QuadratureResult out;
  out.background_energy = bg * period / omega;

  const auto excess = [&](double t) {
    ++out.evaluations;
    return (energy_density(t, cfg, trunc).e_u - bg) / omega;
  };

  std::priority_queue<Panel> panels;
  double value = 0.0;
  double error = 0.0;
  constexpr int kInitialPanels = 4;
  for (int k = 0; k < kInitialPanels; ++k) {
    const Panel p = gauss_kronrod(excess, start + k * period / kInitialPanels,
                                  start + (k + 1) * period / kInitialPanels);
    value += p.value;
    error += p.error;
    panels.push(p);
  }

  const auto target = [&] {
    return quad_tol * std::max({std::abs(value), out.background_energy, 1e-12});
  };
  while (error > target()) {
    if (static_cast<int>(panels.size()) >= options.max_panels) {
      throw Error(ErrorCode::QuadratureNonConvergence,
                  "quadrature did not reach the requested tolerance within max_panels");
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-13 * period) {
      throw Error(ErrorCode::QuadratureNonConvergence, "quadrature panel can no longer be split");
    }
    panels.pop();
    const Panel left = gauss_kronrod(excess, worst.a, mid);
    const Panel right = gauss_kronrod(excess, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift of incremental updates.
  value = 0.0;
  error = 0.0;
  out.panels = static_cast<int>(panels.size());
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  out.excess_energy = value;
  out.error_estimate = error;
  out.energy = out.background_energy + value;
  return out;
}

QuadratureResult uniform_period_energy(const CavityConfig& cfg, const TruncationPolicy& trunc,
                                       int n, unsigned workers) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "invalid parameter 'n': must be >= 1");
  require_below_threshold(cfg);
  const double period = cfg.period();
  const double omega = cfg.omega();
  const double bg = background_density(cfg);
  std::vector<double> values(static_cast<std::size_t>(n));
  parallel_for(values.size(), workers, [&](std::size_t i) {
    values[i] = energy_density(static_cast<double>(i) * period / n, cfg, trunc).e_u - bg;
  });
  double sum = 0.0;
  for (double x : values) sum += x;

  QuadratureResult out;
  out.background_energy = bg * period / omega;
  out.excess_energy = sum * (period / n) / omega;
  out.energy = out.background_energy + out.excess_energy;
  out.evaluations = n;
  out.panels = n;
  return out;
}

}  // namespace cavpulse
