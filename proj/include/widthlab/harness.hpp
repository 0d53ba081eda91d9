#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace widthlab {

/// Parsed and schema-checked experiment configuration.
struct ExperimentConfig {
  std::string task;  // expect | volume | radius | widths | verify | scaling
  nlohmann::json system = {{"kind", "trig"}, {"n", 3}};
  double p = 2.0;
  std::optional<double> q;
  double gamma = 2.0;
  std::vector<int> n_values;
  int n_min = 4;
  int n_max = 12;
  std::vector<double> semiaxes;
  std::string manifold = "S2";
  std::vector<std::string> checks;
  std::size_t samples = 200000;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::filesystem::path output = ".";

  /// Throws ConfigError naming the offending field (or line/column for
  /// malformed JSON).
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& file);
};

struct VerificationReport {
  std::string check;
  std::string anchor;
  std::size_t trials = 0;
  std::size_t violations = 0;
  /// Smallest slack (bound side minus measured side, normalized per check);
  /// negative when violated.
  double worst_margin = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// Names of the checks run by verify_all, in output order.
const std::vector<std::string>& verification_checks();

/// Runs one named check. Throws ConfigError for an unknown name.
VerificationReport run_check(const std::string& name, std::uint64_t seed);

/// Runs every check concurrently; per-check seeds are mix(seed, hash(name)).
std::vector<VerificationReport> verify_all(std::uint64_t seed);

/// Calibrate-then-validate protocol for the section-radius lower bounds over
/// n in {3..6}, p in {2, 4} (and q in {1.25, 1.5, 2} for the cross-section
/// form). The constant is `safety` × the smallest training ratio, times
/// `constant_scale`.
struct RadiusCheckOptions {
  std::vector<std::uint64_t> train_seeds;
  std::vector<std::uint64_t> validate_seeds;
  std::size_t subspaces = 10;
  int restarts = 8;
  std::size_t expectation_samples = 50000;
  double safety = 0.5;
  double constant_scale = 1.0;
};

VerificationReport radius_validity_check(bool cross_section, const RadiusCheckOptions& options, std::uint64_t seed);

/// Table of rows written as CSV plus a JSON summary.
struct RunOutput {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;
  bool pass = true;

  std::string csv() const;
};

RunOutput run(const ExperimentConfig& config);

/// Writes <dir>/<task>.csv and <dir>/<task>.json.
void write_output(const RunOutput& out, const std::filesystem::path& dir, const std::string& task);

std::string format_double(double x);

}  // namespace widthlab
