#pragma once

#include <span>
#include <string>
#include <string_view>

#include "cavpulse/app/config_io.hpp"

namespace cavpulse::app {

/// Named parameter sets reproducing the published figure captions. All are
/// Omega-normalized with mirror 1 perfectly reflecting (T1 = 0).
struct Preset {
  std::string name;
  int version = 1;
  std::string description;
  ParsedConfig params;
};

[[nodiscard]] std::span<const Preset> presets();

/// Throws InvalidParameter for an unknown name.
[[nodiscard]] const Preset& find_preset(std::string_view name);

}  // namespace cavpulse::app
