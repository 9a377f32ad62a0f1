#include "cavpulse/config.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "cavpulse/error.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse {

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::InvalidParameter, "invalid parameter '" + key + "': " + what);
}

[[noreturn]] void inconsistent(const std::string& what) {
  throw Error(ErrorCode::InconsistentMirrors, "inconsistent mirrors: " + what);
}

double finite(const std::string& key, double value) {
  if (!std::isfinite(value)) invalid(key, "must be finite");
  return value;
}

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

struct Mirror {
  double R;
  double T;
};

std::optional<Mirror> resolve_mirror(const std::optional<double>& R, const std::optional<double>& T,
                                     const std::string& index) {
  const std::string rk = "R" + index;
  const std::string tk = "T" + index;
  if (R) finite(rk, *R);
  if (T) finite(tk, *T);
  if (R && (*R < 0.0 || *R > 1.0)) invalid(rk, "must lie in [0, 1]");
  if (T && (*T < 0.0 || *T > 1.0)) invalid(tk, "must lie in [0, 1]");
  if (R && T) {
    if (std::abs(*R + *T - 1.0) > kConsistencyTolerance) {
      inconsistent(rk + " + " + tk + " must equal 1");
    }
    return Mirror{*R, 1.0 - *R};
  }
  if (R) return Mirror{*R, 1.0 - *R};
  if (T) return Mirror{1.0 - *T, *T};
  return std::nullopt;
}

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffU;
    h *= 1099511628211ULL;
  }
}

}  // namespace

double CavityConfig::period() const noexcept { return kTwoPi / omega_; }

RawParameters CavityConfig::raw() const {
  RawParameters p;
  p.K = K_;
  p.omega = omega_;
  p.alpha = alpha_;
  p.r = r_;
  p.R1 = R1_;
  p.R2 = R2_;
  p.theta = theta_;
  return p;
}

std::uint64_t CavityConfig::fingerprint() const noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  fnv_mix(h, static_cast<std::uint64_t>(K_));
  for (double v : {omega_, length_, alpha_, rho_, r_, R1_, T1_, R2_, T2_, theta_, alpha_eff_}) {
    fnv_mix(h, std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

CavityConfig validate_config(const RawParameters& raw, ThresholdGate gate) {
  CavityConfig cfg;

  if (!raw.K) invalid("K", "missing");
  if (*raw.K < 1) invalid("K", "must be a positive integer");
  cfg.K_ = *raw.K;

  // Omega = K pi / L
  if (!raw.omega && !raw.length) invalid("omega", "one of omega or length is required");
  if (raw.omega) {
    cfg.omega_ = finite("omega", *raw.omega);
    if (cfg.omega_ <= 0.0) invalid("omega", "must be positive");
    cfg.length_ = cfg.K_ * kPi / cfg.omega_;
    if (raw.length) {
      finite("length", *raw.length);
      if (!close_relative(*raw.length, cfg.length_, kConsistencyTolerance)) {
        invalid("length", "must equal K pi / omega");
      }
    }
  } else {
    const double L = finite("length", *raw.length);
    if (L <= 0.0) invalid("length", "must be positive");
    cfg.length_ = L;
    cfg.omega_ = cfg.K_ * kPi / L;
  }

  const auto m1 = resolve_mirror(raw.R1, raw.T1, "1");
  const auto m2 = resolve_mirror(raw.R2, raw.T2, "2");
  const Mirror mirror1 = m1.value_or(Mirror{1.0, 0.0});
  cfg.R1_ = mirror1.R;
  cfg.T1_ = mirror1.T;

  // Roundtrip attenuation: r wins over rho; mirrors fill in what is missing.
  if (raw.r) {
    const double r = finite("r", *raw.r);
    if (r <= 0.0 || r >= 1.0) invalid("r", "must lie in (0, 1)");
    cfg.r_ = r;
    cfg.rho_ = -0.5 * std::log(r);
    if (raw.rho) {
      finite("rho", *raw.rho);
      if (!close_relative(*raw.rho, cfg.rho_, kConsistencyTolerance)) {
        inconsistent("rho does not match -ln(r)/2");
      }
    }
  } else if (raw.rho) {
    const double rho = finite("rho", *raw.rho);
    if (rho <= 0.0) invalid("rho", "must be positive");
    cfg.rho_ = rho;
    cfg.r_ = std::exp(-2.0 * rho);
  } else if (m2) {
    cfg.r_ = std::sqrt(cfg.R1_ * m2->R);
    if (cfg.r_ <= 0.0 || cfg.r_ >= 1.0) invalid("R2", "sqrt(R1 R2) must lie in (0, 1)");
    cfg.rho_ = -0.5 * std::log(cfg.r_);
  } else {
    invalid("rho", "one of rho, r or R2/T2 is required");
  }
  if (cfg.rho_ <= 0.0) invalid("rho", "must be positive");

  if (m2) {
    cfg.R2_ = m2->R;
    cfg.T2_ = m2->T;
    if (!close_relative(cfg.r_, std::sqrt(cfg.R1_ * cfg.R2_), kConsistencyTolerance)) {
      inconsistent("r = exp(-2 rho) differs from sqrt(R1 R2)");
    }
  } else {
    if (cfg.R1_ <= 0.0) inconsistent("R1 = 0 cannot sustain a roundtrip");
    const double R2 = cfg.r_ * cfg.r_ / cfg.R1_;
    if (R2 > 1.0) inconsistent("r^2 / R1 exceeds 1; no admissible R2");
    cfg.R2_ = R2;
    cfg.T2_ = 1.0 - R2;
  }

  if (raw.alpha) {
    cfg.alpha_ = finite("alpha", *raw.alpha);
    if (cfg.alpha_ < 0.0) invalid("alpha", "must be non-negative");
    cfg.alpha_eff_ = 2.0 * cfg.alpha_ / cfg.rho_;
    if (raw.alpha_eff) {
      finite("alpha_eff", *raw.alpha_eff);
      if (!close_relative(*raw.alpha_eff, cfg.alpha_eff_, kConsistencyTolerance)) {
        invalid("alpha_eff", "does not match 2 alpha / rho");
      }
    }
  } else if (raw.alpha_eff) {
    cfg.alpha_eff_ = finite("alpha_eff", *raw.alpha_eff);
    if (cfg.alpha_eff_ < 0.0) invalid("alpha_eff", "must be non-negative");
    cfg.alpha_ = 0.5 * cfg.alpha_eff_ * cfg.rho_;
  } else {
    invalid("alpha", "one of alpha or alpha_eff is required");
  }

  cfg.theta_ = finite("theta", raw.theta.value_or(0.0));
  if (cfg.theta_ < 0.0) invalid("theta", "must be non-negative");

  const bool exceeded = gate == ThresholdGate::BelowThreshold ? cfg.alpha_eff_ >= 1.0
                                                              : cfg.alpha_eff_ > 1.0 + 1e-12;
  if (exceeded) {
    std::ostringstream os;
    os << "alpha_eff = " << cfg.alpha_eff_ << " is at or above the parametric threshold 1";
    throw Error(ErrorCode::ThresholdExceeded, os.str());
  }
  return cfg;
}

void require_below_threshold(const CavityConfig& cfg) {
  if (!cfg.below_threshold()) {
    std::ostringstream os;
    os << "alpha_eff = " << cfg.alpha_eff() << " is at or above the parametric threshold 1";
    throw Error(ErrorCode::ThresholdExceeded, os.str());
  }
}

CavityConfig with_alpha(const CavityConfig& cfg, double alpha, ThresholdGate gate) {
  RawParameters raw = cfg.raw();
  raw.alpha = alpha;
  return validate_config(raw, gate);
}

std::string describe(const CavityConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "K=" << cfg.K() << " omega=" << cfg.omega() << " L=" << cfg.length()
     << " alpha=" << cfg.alpha() << " rho=" << cfg.rho() << " r=" << cfg.r()
     << " R1=" << cfg.R1() << " R2=" << cfg.R2() << " theta=" << cfg.theta()
     << " alpha_eff=" << cfg.alpha_eff();
  return os.str();
}

}  // namespace cavpulse
