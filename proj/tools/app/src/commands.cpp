#include "cavpulse/app/commands.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cavpulse/app/presets.hpp"
#include "cavpulse/dephasing.hpp"
#include "cavpulse/parallel.hpp"
#include "cavpulse/radiation.hpp"
#include "cavpulse/units.hpp"

namespace cavpulse::app {

using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter:
    case ErrorCode::InconsistentMirrors: return kExitConfig;
    case ErrorCode::ThresholdExceeded:
    case ErrorCode::PoleProximity: return kExitThreshold;
    case ErrorCode::Io: return kExitIo;
    default: return kExitFailure;
  }
}

ResolvedInput resolve_input(const RunOptions& opts) {
  if (opts.config_path.has_value() == opts.preset.has_value()) {
    throw Error(ErrorCode::InvalidParameter,
                "invalid parameter 'config': give exactly one of --config or --preset");
  }
  ResolvedInput in;
  if (opts.preset) {
    const Preset& p = find_preset(*opts.preset);
    if (opts.si_units) {
      throw Error(ErrorCode::InvalidParameter, "invalid parameter 'si-units': presets are already normalized");
    }
    in.params = p.params;
    in.source = "preset:" + p.name + "@v" + std::to_string(p.version);
  } else {
    const std::string text = read_file(*opts.config_path);
    in.params = parse_config_text(text, opts.si_units);
    in.source = *opts.config_path;
    in.checksums[*opts.config_path] = "fnv1a64:" + hex64(fnv1a64(text));
  }
  for (const auto& o : opts.overrides) apply_override(in.params, o);
  return in;
}

TruncationPolicy truncation_from(const RunOptions& opts) {
  TruncationPolicy t;
  t.tail_tolerance = opts.tol;
  t.max_index = opts.max_index;
  t.validate();
  return t;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const std::optional<std::string>& path, std::ostream& out, const std::string& payload) {
  if (!path) {
    out << payload;
    return;
  }
  std::ofstream f(*path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + *path + "' for writing");
  f << payload;
  f.flush();
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + *path + "'");
}

void emit_csv(const RunOptions& opts, const ordered_json& manifest, std::ostream& out,
              const std::string& csv) {
  emit(opts.out, out, csv);
  if (opts.out) emit(*opts.out + ".manifest.json", out, manifest.dump(2) + "\n");
}

CavityConfig validated(const ResolvedInput& in, ThresholdGate gate = ThresholdGate::BelowThreshold) {
  return validate_config(in.params.raw, gate);
}

double max_relative(const EnergyBudget& a, const EnergyBudget& b) {
  const auto rel = [](double x, double y) {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / s;
  };
  return std::max({rel(a.E_total, b.E_total), rel(a.E_motion, b.E_motion),
                   rel(a.E_intracavity, b.E_intracavity),
                   rel(a.E_intracavity_motion, b.E_intracavity_motion),
                   rel(a.photons_emitted, b.photons_emitted),
                   rel(a.photons_intracavity, b.photons_intracavity)});
}

}  // namespace

ordered_json config_json(const CavityConfig& cfg) {
  return ordered_json{{"K", cfg.K()},         {"omega", cfg.omega()}, {"length", cfg.length()},
                      {"alpha", cfg.alpha()}, {"rho", cfg.rho()},     {"r", cfg.r()},
                      {"R1", cfg.R1()},       {"T1", cfg.T1()},       {"R2", cfg.R2()},
                      {"T2", cfg.T2()},       {"theta", cfg.theta()}, {"alpha_eff", cfg.alpha_eff()}};
}

ordered_json manifest_json(std::string_view command, const RunOptions& opts,
                           const ResolvedInput& input, const CavityConfig* cfg) {
  ordered_json m;
  m["command"] = command;
  m["tool_version"] = kToolVersion;
  m["source"] = input.source;
  m["config"] = cfg ? config_json(*cfg) : ordered_json(nullptr);
  if (cfg) m["config_fingerprint"] = hex64(cfg->fingerprint());
  m["units"] = "hbar = c = 1; time in 1/Omega; energy in hbar*Omega; density in hbar*Omega^2";
  if (input.params.scale) m["omega_si_rad_per_s"] = input.params.scale->omega_si;
  m["truncation"] = {{"tail_tolerance", opts.tol}, {"max_index", opts.max_index}};
  m["samples"] = opts.samples;
  m["quad_tol"] = opts.quad_tol;
  m["theta_convention"] = to_string(opts.convention);
  m["input_checksums"] = input.checksums;
  m["timestamp"] = utc_timestamp();
  return m;
}

void write_density_csv(const DensitySeries& series, const CavityConfig& cfg, std::ostream& os) {
  const double om2 = cfg.omega() * cfg.omega();
  const double vacuum_scale = om2 / (48.0 * kPi);
  os << "t_over_period,e_u,background,contrast\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    const double e = series.values[i];
    const double contrast = series.background > 0.0 ? (e - series.background) / series.background
                                                     : e / vacuum_scale;
    os << format_double(series.times[i] / series.period) << ',' << format_double(e / om2) << ','
       << format_double(series.background / om2) << ',' << format_double(contrast) << '\n';
  }
}

ordered_json budget_json(const EnergyBudget& b) {
  return ordered_json{{"E_total", b.E_total},
                      {"E_background", b.E_background},
                      {"E_motion", b.E_motion},
                      {"E_intracavity", b.E_intracavity},
                      {"E_intracavity_background", b.E_intracavity_background},
                      {"E_intracavity_motion", b.E_intracavity_motion},
                      {"F_value", b.F_value},
                      {"photons_emitted", b.photons_emitted},
                      {"photons_intracavity", b.photons_intracavity},
                      {"at_threshold", b.at_threshold},
                      {"theta_convention", to_string(b.convention)}};
}

ordered_json pulse_train_json(const PulseTrain& train, double period, double omega) {
  ordered_json peaks = ordered_json::array();
  for (const auto& p : train.peaks) {
    peaks.push_back({{"t_over_period", p.time / period},
                     {"height", p.height / (omega * omega)},
                     {"width_over_period", p.width / period},
                     {"energy", p.energy},
                     {"photons", p.photons}});
  }
  return ordered_json{{"pulses_per_period", train.pulses_per_period},
                      {"spacing_mean_over_period", train.spacing_mean / period},
                      {"spacing_stddev_over_period", train.spacing_stddev / period},
                      {"peaks", peaks}};
}

VerifyReport run_verification(const CavityConfig& cfg, const TruncationPolicy& trunc,
                              double quad_tol) {
  require_below_threshold(cfg);
  VerifyReport report;
  const double period = cfg.period();
  const double omega = cfg.omega();
  const auto add = [&](std::string name, double error, double tolerance) {
    const bool ok = std::isfinite(error) && error < tolerance;
    report.checks.push_back({std::move(name), error, tolerance, ok});
    report.passed = report.passed && ok;
  };

  {
    const CavityConfig still = with_alpha(cfg, 0.0);
    const double bg = background_density(still);
    const double scale = std::max(bg, omega * omega / (48.0 * kPi));
    double worst = 0.0;
    for (int j = 0; j < 16; ++j) {
      const double e = energy_density((j + 0.25) / 16.0 * period, still, trunc).e_u;
      worst = std::max(worst, std::abs(e - bg) / scale);
    }
    add("static_limit", worst, 1e-9);
  }

  {
    double roundtrip = 0.0;
    double derivative = 0.0;
    double quasi = 0.0;
    const double h = 1e-6 * period;
    for (int p : {-1, 1, 2, 3, 5, 10}) {
      const auto m = mobius_coefficients(p, cfg);
      for (int j = 0; j < 8; ++j) {
        const double u = (j + 0.37) / 8.0 * period;
        const auto d = dephasing(u, p, cfg);
        const auto rhs = m.apply(std::polar(1.0, omega * u));
        roundtrip = std::max(roundtrip, std::abs(std::polar(1.0, omega * d.value) - rhs));
        const double fd = (dephasing(u + h, p, cfg).value - dephasing(u - h, p, cfg).value) / (2.0 * h);
        derivative = std::max(derivative, std::abs(fd - d.derivative) / d.derivative);
        quasi = std::max(quasi, std::abs(dephasing(u + period, p, cfg).value - d.value - period) / period);
      }
    }
    add("dephasing_roundtrip", roundtrip, 1e-10);
    add("dephasing_derivative", derivative, 1e-6);
    add("quasi_periodicity", quasi, 1e-10);
  }

  {
    const QuadratureResult q = quadrature_energy(cfg, trunc, quad_tol);
    const EnergyBudget closed = energy_budget(cfg);
    const double denom = closed.E_motion != 0.0 ? std::abs(closed.E_motion)
                                                : std::max(closed.E_background, 1e-6);
    add("closed_form_vs_quadrature", std::abs(q.excess_energy - closed.E_motion) / denom, 0.05);
    report.info["quadrature_motion_energy"] = q.excess_energy;
    report.info["closed_form_motion_energy"] = closed.E_motion;
    report.info["quadrature_background_energy"] = q.background_energy;
    report.info["closed_form_background_energy"] = closed.E_background;
    report.info["background_ratio"] =
        closed.E_background > 0.0 ? ordered_json(q.background_energy / closed.E_background)
                                  : ordered_json(nullptr);
    report.info["quadrature_error_estimate"] = q.error_estimate;
    report.info["quadrature_evaluations"] = q.evaluations;
  }

  {
    const EnergyBudget thr = threshold_budget(cfg);
    const EnergyBudget at = energy_budget(with_alpha(cfg, 0.5 * cfg.rho(), ThresholdGate::UpToThreshold));
    add("threshold_identity", max_relative(thr, at), 1e-12);
  }
  return report;
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "alpha_eff") return SweepParameter::AlphaEff;
  if (name == "theta") return SweepParameter::Theta;
  if (name == "r") return SweepParameter::R;
  if (name == "K") return SweepParameter::K;
  throw Error(ErrorCode::InvalidParameter,
              "invalid parameter 'param': must be one of alpha_eff, theta, r, K");
}

std::string_view to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::AlphaEff: return "alpha_eff";
    case SweepParameter::Theta: return "theta";
    case SweepParameter::R: return "r";
    case SweepParameter::K: return "K";
  }
  return "?";
}

std::vector<SweepRow> run_sweep(const ParsedConfig& base, SweepParameter param,
                                const std::vector<double>& values, const SweepSettings& settings) {
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), settings.workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      ParsedConfig point = base;
      if (param == SweepParameter::K) {
        if (values[i] != std::floor(values[i])) {
          throw Error(ErrorCode::InvalidParameter, "invalid parameter 'K': sweep value is not an integer");
        }
        apply_override(point, "K=" + std::to_string(static_cast<long long>(values[i])));
      } else {
        apply_override(point, std::string(to_string(param)) + "=" + format_double(values[i]));
      }
      const CavityConfig cfg = validate_config(point.raw);
      const DensitySeries series = sample_period(cfg, settings.samples, settings.truncation, 1);
      double peak = series.values.front();
      for (double v : series.values) peak = std::max(peak, v);
      const double om2 = cfg.omega() * cfg.omega();
      row.peak_density = peak / om2;
      row.peak_contrast = series.background > 0.0 ? (peak - series.background) / series.background
                                                  : peak / (om2 / (48.0 * kPi));
      const EnergyBudget b = energy_budget(cfg, 1e-16, settings.convention);
      row.E_motion = b.E_motion;
      row.photons_emitted = b.photons_emitted;
      row.photons_intracavity = b.photons_intracavity;
      row.ok = true;
      try {
        const PulseTrain train = detect_pulses(series, settings.prominence);
        row.has_pulses = true;
        row.pulse_count = train.pulses_per_period;
        double width = 0.0;
        double photons = 0.0;
        for (const auto& p : train.peaks) {
          width += p.width / series.period;
          photons += p.photons;
        }
        row.pulse_width = width / train.pulses_per_period;
        row.pulse_photons = photons / train.pulses_per_period;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoPulses) throw;
        row.error = std::string(to_string(e.code()));
      }
    } catch (const Error& e) {
      row.ok = false;
      row.error = std::string(to_string(e.code())) + ": " + e.what();
    }
  });
  return rows;
}

void write_sweep_csv(SweepParameter param, const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "parameter,value,peak_density,peak_contrast,pulse_count,pulse_width,pulse_photons,"
        "E_motion,photons_emitted,photons_intracavity,error\n";
  for (const auto& r : rows) {
    os << to_string(param) << ',' << format_double(r.value) << ',';
    if (r.ok) {
      os << format_double(r.peak_density) << ',' << format_double(r.peak_contrast) << ','
         << r.pulse_count << ',';
      if (r.has_pulses) {
        os << format_double(r.pulse_width) << ',' << format_double(r.pulse_photons) << ',';
      } else {
        os << ",,";
      }
      os << format_double(r.E_motion) << ',' << format_double(r.photons_emitted) << ','
         << format_double(r.photons_intracavity) << ',';
    } else {
      os << ",,,,,,,,";
    }
    std::string quoted = r.error;
    for (std::size_t pos = 0; (pos = quoted.find('"', pos)) != std::string::npos; pos += 2) {
      quoted.insert(pos, 1, '"');
    }
    if (!quoted.empty()) os << '"' << quoted << '"';
    os << '\n';
  }
}

namespace {

int cmd_density(const RunOptions& opts, std::ostream& out) {
  const ResolvedInput in = resolve_input(opts);
  const CavityConfig cfg = validated(in);
  const DensitySeries series = sample_period(cfg, opts.samples, truncation_from(opts), opts.workers);
  std::ostringstream csv;
  write_density_csv(series, cfg, csv);
  emit_csv(opts, manifest_json("density", opts, in, &cfg), out, csv.str());
  return kExitOk;
}

int cmd_pulses(const RunOptions& opts, std::ostream& out) {
  const ResolvedInput in = resolve_input(opts);
  const CavityConfig cfg = validated(in);
  const DensitySeries series = sample_period(cfg, opts.samples, truncation_from(opts), opts.workers);
  ordered_json doc;
  doc["manifest"] = manifest_json("pulses", opts, in, &cfg);
  doc["background"] = series.background / (cfg.omega() * cfg.omega());
  doc["pulse_train"] = pulse_train_json(detect_pulses(series, opts.prominence), series.period, series.omega);
  emit(opts.out, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_energy(const RunOptions& opts, std::ostream& out) {
  const ResolvedInput in = resolve_input(opts);
  const CavityConfig cfg = validated(in, ThresholdGate::UpToThreshold);
  const EnergyBudget budget = energy_budget(cfg, 1e-16, opts.convention);
  const EnergyBudget threshold = threshold_budget(cfg, 1e-16, opts.convention);
  const PhotonEstimate per_pulse = photons_per_pulse(cfg);

  ordered_json doc;
  doc["manifest"] = manifest_json("energy", opts, in, &cfg);
  doc["budget"] = budget_json(budget);
  doc["threshold_budget"] = budget_json(threshold);
  doc["photons_per_pulse"] = {{"count", per_pulse.count}, {"regime_warning", per_pulse.regime_warning}};
  if (in.params.scale) {
    const NaturalScale& s = *in.params.scale;
    const auto joules = [&](const EnergyBudget& b) {
      return ordered_json{{"E_total_J", s.energy_joule(b.E_total)},
                          {"E_background_J", s.energy_joule(b.E_background)},
                          {"E_motion_J", s.energy_joule(b.E_motion)},
                          {"E_intracavity_J", s.energy_joule(b.E_intracavity)},
                          {"E_intracavity_motion_J", s.energy_joule(b.E_intracavity_motion)}};
    };
    doc["si"] = {{"omega_rad_per_s", s.omega_si},
                 {"temperature_K", s.kelvin(cfg.theta_ratio())},
                 {"hbar_omega_J", s.energy_joule(1.0)},
                 {"budget", joules(budget)},
                 {"threshold_budget", joules(threshold)}};
  }
  emit(opts.out, out, doc.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const RunOptions& opts, std::ostream& out) {
  const ResolvedInput in = resolve_input(opts);
  const CavityConfig cfg = validated(in);
  const VerifyReport report = run_verification(cfg, truncation_from(opts), opts.quad_tol);
  ordered_json doc;
  doc["manifest"] = manifest_json("verify", opts, in, &cfg);
  ordered_json checks = ordered_json::array();
  ordered_json failures = ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"error", c.error}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    if (!c.passed) failures.push_back(c.name);
  }
  doc["checks"] = checks;
  doc["info"] = report.info;
  doc["passed"] = report.passed;
  doc["failures"] = failures;
  emit(opts.out, out, doc.dump(2) + "\n");
  return report.passed ? kExitOk : kExitVerification;
}

int cmd_sweep(const RunOptions& opts, const std::string& param_name, const std::vector<double>& values,
              std::ostream& out) {
  const SweepParameter param = parse_sweep_parameter(param_name);
  const ResolvedInput in = resolve_input(opts);
  SweepSettings settings;
  settings.samples = opts.samples;
  settings.truncation = truncation_from(opts);
  settings.prominence = opts.prominence;
  settings.workers = opts.workers;
  settings.convention = opts.convention;
  if (settings.samples < kMinSamples) {
    throw Error(ErrorCode::InvalidParameter, "invalid parameter 'samples': must be >= 64");
  }
  const auto rows = run_sweep(in.params, param, values, settings);
  std::ostringstream csv;
  write_sweep_csv(param, rows, csv);
  ordered_json manifest = manifest_json("sweep", opts, in, nullptr);
  manifest["sweep"] = {{"parameter", param_name}, {"values", values}};
  emit_csv(opts, manifest, out, csv.str());
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string item(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
    ParsedConfig scratch;
    apply_override(scratch, "theta=" + item);  // reuse the strict number parser
    out.push_back(*scratch.raw.theta);
  }
  return out;
}

void add_common(CLI::App& sub, RunOptions& o, std::string& convention) {
  sub.add_option("--config", o.config_path, "Parameter file (key = value)");
  sub.add_option("--preset", o.preset, "Named parameter set (see `presets`)");
  sub.add_option("--set", o.overrides, "Override a parameter, key=value (repeatable)");
  sub.add_flag("--si-units", o.si_units, "Config file values are SI (rad/s, s, K)");
  sub.add_option("--samples", o.samples, "Samples per period")->check(CLI::Range(kMinSamples, 1 << 24));
  sub.add_option("--tol", o.tol, "Series tail tolerance");
  sub.add_option("--max-index", o.max_index, "Hard cap on the ray index");
  sub.add_option("--quad-tol", o.quad_tol, "Relative quadrature tolerance");
  sub.add_option("--prominence", o.prominence, "Pulse detection prominence, fraction of peak excess");
  sub.add_option("--out", o.out, "Write output to a file (a manifest sidecar is added for CSV)");
  sub.add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 256u));
  sub.add_option("--theta-convention", convention, "ratio (theta/Omega) or literal")
      ->check(CLI::IsMember({"ratio", "literal"}));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal radiation from a vibrating cavity mirror", "cavpulse"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  RunOptions opts;
  std::string convention = "ratio";
  std::string sweep_param;
  std::string sweep_values;

  auto* density = app.add_subcommand("density", "Energy density over one period, as CSV");
  auto* energy = app.add_subcommand("energy", "Closed-form energy and photon budget, as JSON");
  auto* verify = app.add_subcommand("verify", "Self-consistency checks, as JSON");
  auto* sweep = app.add_subcommand("sweep", "Scan one parameter, as CSV");
  auto* pulses = app.add_subcommand("pulses", "Detected pulses in one period, as JSON");
  auto* list = app.add_subcommand("presets", "List the built-in parameter sets");
  for (auto* sub : {density, energy, verify, sweep, pulses}) add_common(*sub, opts, convention);
  sweep->add_option("--param", sweep_param, "alpha_eff, theta, r or K")->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    opts.convention = convention == "literal" ? ThetaConvention::Literal : ThetaConvention::Ratio;
    if (*list) {
      for (const auto& p : presets()) out << p.name << "  (v" << p.version << ")  " << p.description << '\n';
      return kExitOk;
    }
    if (*density) return cmd_density(opts, out);
    if (*energy) return cmd_energy(opts, out);
    if (*verify) return cmd_verify(opts, out);
    if (*pulses) return cmd_pulses(opts, out);
    if (*sweep) return cmd_sweep(opts, sweep_param, parse_values(sweep_values), out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace cavpulse::app
