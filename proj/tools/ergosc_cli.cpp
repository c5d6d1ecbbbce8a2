#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ergosc/config.hpp"
#include "ergosc/csv.hpp"
#include "ergosc/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bilinear ergodic oscillation experiments"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run the experiment named by a config and write CSV rows");
  std::string config_path, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> experiment;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_path, "CSV output path (stdout when omitted)");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--experiment", experiment, "Override the experiment name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = ergosc::load_config(config_path, experiment, seed);
    const auto result = ergosc::run(cfg);
    if (out_path.empty())
      ergosc::write_csv(std::cout, result.rows);
    else
      ergosc::emit_csv(result.rows, out_path);
    for (const auto& note : result.notes) std::cerr << "BoundViolated: " << note << '\n';
    return result.violations ? 2 : 0;
  } catch (const ergosc::Error& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == ergosc::ErrorKind::BoundViolated ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
