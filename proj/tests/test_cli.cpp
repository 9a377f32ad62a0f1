#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavpulse/app/commands.hpp"
#include "cavpulse/app/config_io.hpp"
#include "cavpulse/app/presets.hpp"
#include "cavpulse/error.hpp"
#include "cavpulse/units.hpp"

using namespace cavpulse;
using namespace cavpulse::app;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cavpulse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cavpulse_test_" + name);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = temp_path(name);
  std::ofstream(path) << text;
  return path.string();
}

ErrorCode parse_error(const std::string& text, bool si = false) {
  try {
    (void)parse_config_text(text, si);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto p = parse_config_text("# cavity\nK = 2\nomega=1\n  rho = 0.005 # high finesse\n\nalpha_eff = 0.8\n", false);
  CHECK(*p.raw.K == 2);
  CHECK(*p.raw.rho == 0.005);
  CHECK(*p.raw.alpha_eff == 0.8);
  CHECK_FALSE(p.raw.theta.has_value());
  CHECK_FALSE(p.scale.has_value());

  CHECK(parse_error("K = 2\nK = 3\n") == ErrorCode::InvalidParameter);
  CHECK(parse_error("colour = red\n") == ErrorCode::InvalidParameter);
  CHECK(parse_error("rho = abc\n") == ErrorCode::InvalidParameter);
  CHECK(parse_error("K = 2.5\n") == ErrorCode::InvalidParameter);
  CHECK(parse_error("just words\n") == ErrorCode::InvalidParameter);
  CHECK(parse_error("temperature = 300\n") == ErrorCode::InvalidParameter);
  try {
    (void)parse_config_text("rho = 0.1\nbogus = 1\n", false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'bogus'") != std::string::npos);
  }
}

TEST_CASE("SI input is normalised and round-trips") {
  const auto p = parse_config_text("K = 3\nfrequency_hz = 1e10\ntemperature = 300\nrho = 1e-5\nalpha = 5e-6\n", true);
  REQUIRE(p.scale.has_value());
  CHECK(*p.raw.omega == 1.0);
  CHECK(p.scale->omega_si == doctest::Approx(kTwoPi * 1e10));
  CHECK(std::abs(*p.raw.theta / 3924.0 - 1.0) < 5e-3);
  CHECK(std::abs(p.scale->kelvin(*p.raw.theta) / 300.0 - 1.0) < 1e-12);

  const auto q = parse_config_text("K = 3\nomega = 6.283185307179586e10\ntheta = 6.283185307179586e10\nrho = 0.01\nalpha = 0\n", true);
  CHECK(*q.raw.theta == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(parse_error("K = 3\nomega = 1\nfrequency_hz = 1\nrho = 0.1\n", true) == ErrorCode::InvalidParameter);
  CHECK(parse_error("K = 3\nrho = 0.1\nalpha = 0\n", true) == ErrorCode::InvalidParameter);
}

TEST_CASE("overrides replace derived quantities") {
  ParsedConfig p = find_preset("fig2-vacuum").params;
  apply_override(p, "alpha=0.01");
  CHECK_FALSE(p.raw.alpha_eff.has_value());
  apply_override(p, "rho=0.02");
  CHECK_FALSE(p.raw.r.has_value());
  apply_override(p, "K=4");
  CHECK(*p.raw.K == 4);
  CHECK_THROWS_AS(apply_override(p, "nonsense=1"), Error);
  CHECK_THROWS_AS(apply_override(p, "no-equals"), Error);
}

TEST_CASE("presets encode the figure captions") {
  for (const auto& preset : presets()) {
    CHECK(preset.version >= 1);
    const auto cfg = validate_config(preset.params.raw, ThresholdGate::UpToThreshold);
    if (preset.name.rfind("fig", 0) == 0) {
      CHECK(cfg.K() == 3);
      CHECK(cfg.r() == doctest::Approx(0.9));
      CHECK(cfg.T1() == 0.0);
    }
  }
  CHECK(find_preset("fig2-theta02").params.raw.theta == 0.2);
  CHECK(find_preset("fig3-a05").params.raw.alpha_eff == 0.5);
  CHECK(find_preset("fig3-a09").params.raw.theta == 3924.0);
  CHECK_THROWS_AS((void)find_preset("fig9"), Error);
  const auto room = validate_config(find_preset("room-temp").params.raw, ThresholdGate::UpToThreshold);
  CHECK(room.alpha_eff() == doctest::Approx(1.0));
  CHECK(std::abs(room.theta() / 3924.0 - 1.0) < 5e-3);
}

TEST_CASE("density command") {
  const auto r = run({"density", "--preset", "fig2-vacuum"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2049);
  CHECK(ls[0] == "t_over_period,e_u,background,contrast");
  double max_contrast = -1.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto cells = split(ls[i]);
    REQUIRE(cells.size() == 4);
    max_contrast = std::max(max_contrast, std::stod(cells[3]));
  }
  CHECK(std::isfinite(max_contrast));
  CHECK(max_contrast > 0.0);

  const auto flat = run({"density", "--preset", "static", "--samples", "128"});
  REQUIRE(flat.code == 0);
  const auto fl = lines(flat.out);
  CHECK(fl.size() == 129);
  for (std::size_t i = 1; i < fl.size(); ++i) CHECK(std::abs(std::stod(split(fl[i])[3])) < 1e-10);
}

TEST_CASE("density output is deterministic and carries a manifest") {
  const auto a = temp_path("a.csv").string();
  const auto b = temp_path("b.csv").string();
  REQUIRE(run({"density", "--preset", "fig3-a09", "--samples", "256", "--out", a}).code == 0);
  REQUIRE(run({"density", "--preset", "fig3-a09", "--samples", "256", "--out", b, "--workers", "3"}).code == 0);
  CHECK(read_file(a) == read_file(b));
  const auto manifest = nlohmann::json::parse(read_file(a + ".manifest.json"));
  CHECK(manifest["command"] == "density");
  CHECK(manifest["tool_version"] == kToolVersion);
  CHECK(manifest["source"] == "preset:fig3-a09@v1");
  CHECK(manifest["config"]["alpha_eff"] == 0.9);
  CHECK(manifest["samples"] == 256);
  CHECK(manifest.contains("timestamp"));
  CHECK(manifest.contains("truncation"));

  // the two fig3 presets: higher rapidity, higher peak
  double peak[2] = {0, 0};
  int k = 0;
  for (const char* name : {"fig3-a05", "fig3-a09"}) {
    const auto r = run({"density", "--preset", name});
    const auto ls = lines(r.out);
    for (std::size_t i = 1; i < ls.size(); ++i) peak[k] = std::max(peak[k], std::stod(split(ls[i])[1]));
    ++k;
  }
  CHECK(peak[1] > peak[0]);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  std::filesystem::remove(a + ".manifest.json");
  std::filesystem::remove(b + ".manifest.json");
}

TEST_CASE("config files are checksummed") {
  const auto path = write_temp("cfg.txt", "K = 2\nomega = 1\nrho = 0.05\nalpha = 0\ntheta = 1\n");
  const auto r = run({"energy", "--config", path});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const std::string expected = "fnv1a64:" + hex64(fnv1a64(read_file(path)));
  CHECK(doc["manifest"]["input_checksums"][path] == expected);
  CHECK(doc["budget"]["photons_emitted"] == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("energy command at room temperature") {
  const auto r = run({"energy", "--preset", "room-temp"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["budget"]["photons_intracavity"].get<double>() > 1e6);
  const double n = doc["photons_per_pulse"]["count"].get<double>();
  CHECK(n >= 15.0);
  CHECK(n <= 25.0);
  CHECK(doc["budget"]["theta_convention"] == "1+theta^2/Omega^2");
  REQUIRE(doc.contains("si"));
  CHECK(doc["si"]["temperature_K"].get<double>() == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(doc["si"]["hbar_omega_J"].get<double>() == doctest::Approx(1.054571817e-34 * kTwoPi * 1e10));
}

TEST_CASE("verify command") {
  const auto good = run({"verify", "--preset", "static"});
  CHECK(good.code == 0);
  const auto doc = nlohmann::json::parse(good.out);
  CHECK(doc["passed"] == true);
  for (const auto& c : doc["checks"]) CHECK(c["error"].get<double>() < 1e-9);

  const auto path = write_temp("hf.txt", "K = 2\nomega = 1\nrho = 0.005\nalpha_eff = 0.8\ntheta = 10\n");
  const auto hf = run({"verify", "--config", path});
  CHECK(hf.code == 0);
  const auto hdoc = nlohmann::json::parse(hf.out);
  for (const auto& c : hdoc["checks"]) {
    if (c["name"] == "closed_form_vs_quadrature") CHECK(c["error"].get<double>() < 0.05);
  }

  // rho = 0.053 is outside the high-finesse regime of the closed form
  const auto coarse = run({"verify", "--preset", "fig2-theta1"});
  CHECK(coarse.code == kExitVerification);
  const auto cdoc = nlohmann::json::parse(coarse.out);
  CHECK(cdoc["failures"].size() == 1);
  CHECK(cdoc["failures"][0] == "closed_form_vs_quadrature");

  const auto over = run({"verify", "--config", path, "--set", "alpha_eff=1.05"});
  CHECK(over.code == kExitThreshold);
  CHECK(over.out.empty());
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run({"density", "--preset", "fig2-vacuum", "--set", "alpha_eff=1.05"}).code == kExitThreshold);
  CHECK(run({"density", "--preset", "fig2-vacuum", "--set", "alpha_eff=1"}).code == kExitThreshold);
  CHECK(run({"energy", "--preset", "fig2-vacuum", "--set", "alpha_eff=1"}).code == kExitOk);
  CHECK(run({"energy", "--preset", "fig2-vacuum", "--set", "alpha_eff=1.01"}).code == kExitThreshold);
  CHECK(run({"density", "--preset", "unknown"}).code == kExitConfig);
  CHECK(run({"density"}).code == kExitConfig);
  CHECK(run({"density", "--config", "/nonexistent/cavpulse.cfg"}).code == kExitIo);
  CHECK(run({"density", "--preset", "fig2-vacuum", "--out", "/nonexistent/dir/x.csv"}).code == kExitIo);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"--version"}).code == kExitOk);

  const auto bad = run({"energy", "--preset", "fig2-vacuum", "--set", "theta=-1"});
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("'theta'") != std::string::npos);
  CHECK(exit_code_for(ErrorCode::PoleProximity) == kExitThreshold);
  CHECK(exit_code_for(ErrorCode::InconsistentMirrors) == kExitConfig);
}

TEST_CASE("sweep command") {
  SUBCASE("empty value list gives only the header") {
    const auto r = run({"sweep", "--preset", "fig3-a05", "--param", "alpha_eff", "--values", ""});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() == 1);
    CHECK(lines(r.out)[0].rfind("parameter,value,peak_density", 0) == 0);
  }
  SUBCASE("peak density rises with rapidity") {
    const auto r = run({"sweep", "--preset", "fig3-a05", "--param", "alpha_eff", "--values",
                        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "--samples", "1024", "--workers", "2"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 10);
    double prev = 0.0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
      const auto c = split(ls[i]);
      CHECK(std::stod(c[1]) == doctest::Approx(0.1 * i));
      const double peak = std::stod(c[2]);
      CHECK(peak > prev);
      prev = peak;
    }
  }
  SUBCASE("pulse photons follow theta squared at high temperature") {
    const auto r = run({"sweep", "--preset", "fig3-a09", "--param", "theta", "--values", "500,1000,2000,4000"});
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 5);
    for (std::size_t i = 2; i < ls.size(); ++i) {
      const double ratio = std::stod(split(ls[i])[6]) / std::stod(split(ls[i - 1])[6]);
      CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
    }
  }
  SUBCASE("bad points are recorded, not fatal") {
    const auto r = run({"sweep", "--preset", "fig3-a05", "--param", "K", "--values", "2,2.5,3", "--samples", "128"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(split(ls[1]).back().empty());
    CHECK(ls[2].find("InvalidParameter") != std::string::npos);
    CHECK(split(ls[3]).back().empty());
  }
  SUBCASE("static point has no pulses") {
    const auto r = run({"sweep", "--preset", "static", "--param", "alpha_eff", "--values", "0", "--samples", "128"});
    const auto c = split(lines(r.out)[1]);
    CHECK(c[4] == "0");
    CHECK(c[5].empty());
  }
  CHECK(run({"sweep", "--preset", "fig3-a05", "--param", "omega", "--values", "1"}).code == kExitConfig);
  CHECK(run({"sweep", "--preset", "fig3-a05", "--param", "theta", "--values", "1,x"}).code == kExitConfig);
}

TEST_CASE("pulses command") {
  const auto r = run({"pulses", "--preset", "fig3-a09"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["pulse_train"]["pulses_per_period"].get<int>() >= 1);
  CHECK(doc["pulse_train"]["spacing_stddev_over_period"].get<double>() < 0.05);
  CHECK(run({"pulses", "--preset", "static"}).code == kExitFailure);
}

TEST_CASE("number formatting keeps 17 digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
