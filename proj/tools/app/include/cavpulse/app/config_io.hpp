#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cavpulse/config.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse::app {

/// Parameters read from a key-value source, already in Omega-normalized
/// natural units. `scale` is set when SI input was converted.
struct ParsedConfig {
  RawParameters raw;
  std::optional<NaturalScale> scale;
  std::optional<double> temperature_kelvin;
};

/// Parses `key = value` lines; `#` starts a comment. Keys are the CavityConfig
/// field names (K, omega, length, alpha, alpha_eff, rho, r, R1, T1, R2, T2,
/// theta). With si_units, omega is in rad/s, length in seconds and theta in
/// rad/s, and `frequency_hz` and `temperature` (kelvin) are also accepted;
/// everything is rescaled so that Omega = 1.
[[nodiscard]] ParsedConfig parse_config_text(std::string_view text, bool si_units);

/// Reads and parses a file. Throws Error(Io) if it cannot be read.
[[nodiscard]] ParsedConfig load_config_file(const std::string& path, bool si_units);

/// Applies one `key=value` override on top of already-parsed parameters.
void apply_override(ParsedConfig& cfg, std::string_view assignment);

[[nodiscard]] std::string read_file(const std::string& path);
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t value);

}  // namespace cavpulse::app
