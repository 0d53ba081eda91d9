#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "widthlab/error.hpp"
#include "widthlab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"widthlab: convex-body volumes, section radii and widths"};
  std::string task;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool all = false;
  std::vector<std::string> checks;
  app.add_option("task", task, "expect | volume | radius | widths | verify | scaling")->required();
  app.add_option("--config", config_file, "JSON experiment configuration");
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out_dir, "output directory for <task>.csv and <task>.json");
  app.add_flag("--all", all, "run every verification check (verify only)");
  app.add_option("--check", checks, "run the named verification check(s) (verify only)");
  CLI11_PARSE(app, argc, argv);

  try {
    widthlab::ExperimentConfig config;
    if (!config_file.empty()) {
      config = widthlab::ExperimentConfig::load(config_file);
      if (config.task != task)
        throw widthlab::ConfigError("field 'task': config says '" + config.task + "' but '" + task + "' was requested");
    } else if (task == "verify" && (all || !checks.empty())) {
      config.task = "verify";
    } else {
      throw widthlab::ConfigError("task '" + task + "' needs --config");
    }
    if (seed) config.seed = *seed;
    if (!checks.empty()) config.checks = checks;
    if (all) config.checks.clear();
    if (!out_dir.empty()) config.output = out_dir;

    const widthlab::RunOutput out = widthlab::run(config);
    widthlab::write_output(out, config.output, config.task);
    std::cout << out.csv();
    std::cout << (out.pass ? "PASS" : "FAIL") << '\n';
    return out.pass ? 0 : 1;
  } catch (const widthlab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
