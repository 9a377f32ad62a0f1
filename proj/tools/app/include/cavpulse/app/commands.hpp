#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cavpulse/analysis.hpp"
#include "cavpulse/app/config_io.hpp"
#include "cavpulse/config.hpp"
#include "cavpulse/energetics.hpp"
#include "cavpulse/error.hpp"

namespace cavpulse::app {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitThreshold = 3,
  kExitVerification = 4,
  kExitIo = 5,
};

[[nodiscard]] int exit_code_for(ErrorCode code) noexcept;

struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::vector<std::string> overrides;
  bool si_units = false;
  int samples = kDefaultSamples;
  double tol = 1e-12;
  int max_index = 10000;
  double quad_tol = 1e-6;
  double prominence = 0.5;
  std::optional<std::string> out;
  unsigned workers = 1;
  ThetaConvention convention = ThetaConvention::Ratio;
};

struct ResolvedInput {
  ParsedConfig params;
  std::string source;
  nlohmann::ordered_json checksums = nlohmann::ordered_json::object();
};

/// Loads the preset or config file named in `opts` and applies overrides.
[[nodiscard]] ResolvedInput resolve_input(const RunOptions& opts);

[[nodiscard]] TruncationPolicy truncation_from(const RunOptions& opts);

[[nodiscard]] nlohmann::ordered_json config_json(const CavityConfig& cfg);

[[nodiscard]] nlohmann::ordered_json manifest_json(std::string_view command, const RunOptions& opts,
                                                   const ResolvedInput& input,
                                                   const CavityConfig* cfg);

/// printf %.17g
[[nodiscard]] std::string format_double(double value);

/// Header `t_over_period,e_u,background,contrast`; densities in hbar*Omega^2.
void write_density_csv(const DensitySeries& series, const CavityConfig& cfg, std::ostream& os);

[[nodiscard]] nlohmann::ordered_json budget_json(const EnergyBudget& b);

[[nodiscard]] nlohmann::ordered_json pulse_train_json(const PulseTrain& train, double period,
                                                      double omega);

struct Check {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<Check> checks;
  nlohmann::ordered_json info = nlohmann::ordered_json::object();
  bool passed = true;
};

/// Dephasing identities, the static limit, quadrature against the closed
/// form (motion-induced part) and the threshold identity.
[[nodiscard]] VerifyReport run_verification(const CavityConfig& cfg, const TruncationPolicy& trunc,
                                            double quad_tol);

enum class SweepParameter { AlphaEff, Theta, R, K };

[[nodiscard]] SweepParameter parse_sweep_parameter(std::string_view name);
[[nodiscard]] std::string_view to_string(SweepParameter p) noexcept;

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  double peak_density = 0.0;
  double peak_contrast = 0.0;
  int pulse_count = 0;
  bool has_pulses = false;
  double pulse_width = 0.0;    // mean, in periods
  double pulse_photons = 0.0;  // mean per detected pulse
  double E_motion = 0.0;
  double photons_emitted = 0.0;
  double photons_intracavity = 0.0;
  std::string error;
};

struct SweepSettings {
  int samples = kDefaultSamples;
  TruncationPolicy truncation;
  double prominence = 0.5;
  unsigned workers = 1;
  ThetaConvention convention = ThetaConvention::Ratio;
};

/// One row per value, in input order; failures land in the error column.
[[nodiscard]] std::vector<SweepRow> run_sweep(const ParsedConfig& base, SweepParameter param,
                                              const std::vector<double>& values,
                                              const SweepSettings& settings);

void write_sweep_csv(SweepParameter param, const std::vector<SweepRow>& rows, std::ostream& os);

/// Full command-line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cavpulse::app
