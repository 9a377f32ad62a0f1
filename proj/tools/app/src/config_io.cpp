#include "cavpulse/app/config_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cavpulse/error.hpp"

namespace cavpulse::app {

namespace {

[[noreturn]] void bad_key(std::string_view key, const std::string& what) {
  throw Error(ErrorCode::InvalidParameter,
              "invalid parameter '" + std::string(key) + "': " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    bad_key(key, "'" + std::string(text) + "' is not a decimal number");
  }
  return value;
}

int parse_integer(std::string_view key, std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) bad_key(key, "'" + std::string(text) + "' is not an integer");
  return value;
}

bool is_dimensionless(std::string_view key) {
  return key == "alpha" || key == "alpha_eff" || key == "rho" || key == "r" || key == "R1" ||
         key == "T1" || key == "R2" || key == "T2";
}

void assign(RawParameters& raw, std::string_view key, double v) {
  if (key == "alpha") raw.alpha = v;
  else if (key == "alpha_eff") raw.alpha_eff = v;
  else if (key == "rho") raw.rho = v;
  else if (key == "r") raw.r = v;
  else if (key == "R1") raw.R1 = v;
  else if (key == "T1") raw.T1 = v;
  else if (key == "R2") raw.R2 = v;
  else if (key == "T2") raw.T2 = v;
  else if (key == "omega") raw.omega = v;
  else if (key == "length") raw.length = v;
  else if (key == "theta") raw.theta = v;
  else bad_key(key, "unknown key");
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view line, int lineno) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::InvalidParameter,
                "config line " + std::to_string(lineno) + ": expected 'key = value'");
  }
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

ParsedConfig build(const std::map<std::string, std::string, std::less<>>& entries, bool si_units) {
  ParsedConfig out;
  RawParameters& raw = out.raw;
  std::optional<double> omega_si;
  std::optional<double> length_si;
  std::optional<double> theta_si;
  if (entries.contains("omega") && entries.contains("frequency_hz")) {
    bad_key("frequency_hz", "give either omega or frequency_hz");
  }

  for (const auto& [key, text] : entries) {
    if (key == "K") {
      raw.K = parse_integer(key, text);
    } else if (is_dimensionless(key)) {
      assign(raw, key, parse_number(key, text));
    } else if (key == "omega" || key == "length" || key == "theta") {
      const double v = parse_number(key, text);
      if (si_units) {
        if (key == "omega") omega_si = v;
        if (key == "length") length_si = v;
        if (key == "theta") theta_si = v;
      } else {
        assign(raw, key, v);
      }
    } else if (key == "frequency_hz" || key == "temperature") {
      if (!si_units) bad_key(key, "only accepted together with --si-units");
      const double v = parse_number(key, text);
      if (key == "frequency_hz") {
        omega_si = kTwoPi * v;
      } else {
        out.temperature_kelvin = v;
      }
    } else {
      bad_key(key, "unknown key");
    }
  }

  if (si_units) {
    if (!raw.K) bad_key("K", "missing");
    if (!omega_si && length_si) omega_si = *raw.K * kPi / *length_si;
    if (!omega_si || !(*omega_si > 0.0)) bad_key("omega", "a positive omega, frequency_hz or length is required");
    if (theta_si && out.temperature_kelvin) bad_key("temperature", "give either theta or temperature");
    const NaturalScale scale{*omega_si};
    raw.omega = 1.0;
    if (length_si) raw.length = *length_si * scale.omega_si;
    if (theta_si) raw.theta = *theta_si / scale.omega_si;
    if (out.temperature_kelvin) raw.theta = scale.theta_ratio(*out.temperature_kelvin);
    out.scale = scale;
  }
  return out;
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text, bool si_units) {
  std::map<std::string, std::string, std::less<>> entries;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto [key, value] = split_assignment(line, lineno);
    if (key.empty()) {
      throw Error(ErrorCode::InvalidParameter, "config line " + std::to_string(lineno) + ": empty key");
    }
    if (!entries.emplace(std::string(key), std::string(value)).second) {
      bad_key(key, "given more than once");
    }
  }
  return build(entries, si_units);
}

ParsedConfig load_config_file(const std::string& path, bool si_units) {
  return parse_config_text(read_file(path), si_units);
}

void apply_override(ParsedConfig& cfg, std::string_view assignment) {
  const auto [key, value] = split_assignment(assignment, 0);
  if (key == "K") {
    cfg.raw.K = parse_integer(key, value);
    return;
  }
  assign(cfg.raw, key, parse_number(key, value));
  // A new attenuation or rapidity replaces whatever it was derived from.
  if (key == "r") {
    cfg.raw.rho.reset();
    cfg.raw.R2.reset();
    cfg.raw.T2.reset();
  } else if (key == "rho") {
    cfg.raw.r.reset();
    cfg.raw.R2.reset();
    cfg.raw.T2.reset();
  } else if (key == "alpha") {
    cfg.raw.alpha_eff.reset();
  } else if (key == "alpha_eff") {
    cfg.raw.alpha.reset();
  } else if (key == "omega") {
    cfg.raw.length.reset();
  } else if (key == "length") {
    cfg.raw.omega.reset();
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  return ss.str();
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace cavpulse::app
