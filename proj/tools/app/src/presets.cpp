#include "cavpulse/app/presets.hpp"

#include <vector>

#include "cavpulse/error.hpp"

namespace cavpulse::app {

namespace {

ParsedConfig figure(double alpha_eff, double theta) {
  ParsedConfig p;
  p.raw.K = 3;
  p.raw.omega = 1.0;
  p.raw.r = 0.9;
  p.raw.T1 = 0.0;
  p.raw.alpha_eff = alpha_eff;
  p.raw.theta = theta;
  return p;
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  out.push_back({"fig2-vacuum", 1, "alpha_eff = r = 0.9, vacuum (theta = 0), K = 3", figure(0.9, 0.0)});
  out.push_back({"fig2-theta02", 1, "alpha_eff = r = 0.9, theta = 0.2 Omega, K = 3", figure(0.9, 0.2)});
  out.push_back({"fig2-theta1", 1, "alpha_eff = r = 0.9, theta = Omega, K = 3", figure(0.9, 1.0)});
  out.push_back({"fig3-a05", 1, "alpha_eff = 0.5, r = 0.9, theta = 3924 Omega, K = 3", figure(0.5, 3924.0)});
  out.push_back({"fig3-a09", 1, "alpha_eff = 0.9, r = 0.9, theta = 3924 Omega, K = 3", figure(0.9, 3924.0)});
  out.push_back({"static", 1, "motionless cavity (alpha = 0), r = 0.9, theta = Omega, K = 3", figure(0.0, 1.0)});

  ParsedConfig room;
  room.scale = NaturalScale{kTwoPi * 1e10};
  room.temperature_kelvin = 300.0;
  room.raw.K = 3;
  room.raw.omega = 1.0;
  room.raw.rho = 1e-5;
  room.raw.alpha = 0.5e-5;
  room.raw.T1 = 0.0;
  room.raw.theta = room.scale->theta_ratio(300.0);
  out.push_back({"room-temp", 1,
                 "Omega = 2 pi 10 GHz, T = 300 K, rho = 1e-5, alpha = rho/2 (threshold), K = 3",
                 room});
  return out;
}

}  // namespace

std::span<const Preset> presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::InvalidParameter, "invalid parameter 'preset': unknown preset '" +
                                               std::string(name) + "'");
}

}  // namespace cavpulse::app
