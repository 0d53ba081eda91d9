#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "widthlab/error.hpp"
#include "widthlab/harness.hpp"

using namespace widthlab;

namespace {

std::string message_of(const std::string& text) {
  try {
    ExperimentConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and diagnostics") {
  const ExperimentConfig c = ExperimentConfig::parse(
      R"({"task": "expect", "system": {"kind": "trig", "n": 5}, "p": 4, "samples": 20000, "seed": 3})");
  CHECK(c.task == "expect");
  CHECK(c.p == 4.0);
  CHECK(c.seed == 3);
  CHECK(std::isinf(ExperimentConfig::parse(R"({"task": "expect", "p": "inf", "seed": 1})").p));

  CHECK(message_of(R"({"task": "expect", "seed": 1, "colour": 2})").find("colour") != std::string::npos);
  CHECK(message_of(R"({"task": "dance", "seed": 1})").find("task") != std::string::npos);
  CHECK(message_of(R"({"task": "expect"})").find("seed") != std::string::npos);
  CHECK(message_of(R"({"task": "expect", "seed": 1, "p": "big"})").find("'p'") != std::string::npos);
  CHECK(message_of(R"({"task": "radius", "seed": 1, "q": 3})").find("'q'") != std::string::npos);
  CHECK(message_of(R"({"task": "expect", "seed": 1, "samples": 10})").find("samples") != std::string::npos);
  const std::string malformed = message_of("{\n  \"task\": \"expect\",\n  \"seed\": ,\n}");
  CHECK(malformed.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("widths task reproduces the exact column") {
  ExperimentConfig c = ExperimentConfig::parse(R"({"task": "widths", "semiaxes": [3, 2, 1], "seed": 1})");
  const RunOutput out = run(c);
  CHECK(out.pass);
  REQUIRE(out.rows.size() == 4);
  CHECK(out.rows[0][1] == "3");
  CHECK(out.rows[1][1] == "2");
  CHECK(out.rows[2][1] == "1");
  CHECK(out.rows[3][1] == "0");
  for (const auto& row : out.rows) CHECK(std::stod(row[4]) <= 1e-3);
}

TEST_CASE("expect task respects the closed-form bound") {
  const RunOutput out = run(ExperimentConfig::parse(
      R"({"task": "expect", "system": {"kind": "trig", "degree": 1}, "p": 4, "samples": 50000, "seed": 2})"));
  CHECK(out.pass);
  REQUIRE(out.rows.size() == 1);
  CHECK(std::stod(out.rows[0][3]) <= std::stod(out.rows[0][6]) + std::stod(out.rows[0][4]));
}

TEST_CASE("volume, radius and scaling tasks run") {
  CHECK(run(ExperimentConfig::parse(R"({"task": "volume", "system": {"kind": "trig", "n": 3}, "p": 4,
                                         "samples": 20000, "seed": 2})"))
            .pass);
  const RunOutput radius =
      run(ExperimentConfig::parse(R"({"task": "radius", "n_values": [3, 4], "p": 4, "samples": 5000, "seed": 2})"));
  CHECK(radius.rows.size() == 2);
  const RunOutput scaling = run(ExperimentConfig::parse(R"({"task": "scaling", "manifold": "S2", "gamma": 2, "seed": 0})"));
  CHECK(scaling.pass);
  CHECK(scaling.rows.size() == 9);
  CHECK_THROWS_AS(run(ExperimentConfig::parse(R"({"task": "scaling", "manifold": "CP5", "seed": 0})")), ConfigError);
}

TEST_CASE("santalo-2d check has margin π² - 8") {
  const VerificationReport r = run_check("santalo-2d", 0);
  CHECK(r.pass);
  CHECK(r.worst_margin == doctest::Approx(std::numbers::pi * std::numbers::pi - 8.0));
  CHECK(r.worst_margin == doctest::Approx(1.8696).epsilon(1e-4));
}

TEST_CASE("fourier-tail check is an exact identity") {
  const VerificationReport r = run_check("fourier-tail", 7);
  CHECK(r.pass);
  CHECK(r.worst_margin == 0.0);
  CHECK_THROWS_AS(run_check("no-such-check", 0), ConfigError);
}

TEST_CASE("verification checks: names and anchors") {
  const auto& names = verification_checks();
  CHECK(names.size() == 15);
  CHECK(names.front() == "mmm-chain");
  CHECK(names.back() == "sobolev-slope");
  const VerificationReport r = run_check("lemma1-projection", 1);
  CHECK(r.pass);
  CHECK(!r.anchor.empty());
  CHECK(r.violations == 0);
  CHECK(r.to_json()["check"] == "lemma1-projection");
}

TEST_CASE("an inflated radius constant is caught") {
  RadiusCheckOptions o;
  o.train_seeds = {0, 1};
  o.validate_seeds = {10, 11};
  o.subspaces = 4;
  o.expectation_samples = 5000;
  const VerificationReport ok = radius_validity_check(false, o, 3);
  CHECK(ok.pass);
  o.constant_scale = 10.0;
  const VerificationReport bad = radius_validity_check(false, o, 3);
  CHECK(!bad.pass);
  CHECK(bad.violations > 0);
  CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto dir = std::filesystem::temp_directory_path() / "widthlab_harness_test";
  const ExperimentConfig c = ExperimentConfig::parse(
      R"({"task": "verify", "checks": ["eq111", "lemma3-expectation", "santalo-2d"], "seed": 7})");
  write_output(run(c), dir / "a", c.task);
  write_output(run(c), dir / "b", c.task);
  CHECK(slurp(dir / "a" / "verify.csv") == slurp(dir / "b" / "verify.csv"));
  CHECK(slurp(dir / "a" / "verify.json") == slurp(dir / "b" / "verify.json"));
  CHECK(slurp(dir / "a" / "verify.csv").rfind("check,anchor,trials,violations,worst_margin,pass\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
