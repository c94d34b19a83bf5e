#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mim/error.hpp"
#include "mim/runner.hpp"

namespace {

int execute(const std::string& command, const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out, const std::string& artifacts) {
  try {
    mim::Scenario scenario = mim::load_scenario(scenario_path);
    if (seed) scenario.seed = *seed;
    if (command != "report" && mim::task_name(scenario.task) != command &&
        !(command == "inspect" && mim::task_name(scenario.task) == "inspect_structure"))
      mim::fail(mim::ErrorCode::ConfigError, "scenario task is '" + std::string(mim::task_name(scenario.task)) +
                                                 "', not '" + command + "'");
    mim::RunOptions options;
    if (!artifacts.empty()) options.artifact_dir = artifacts;
    const mim::RunResult result = mim::run(scenario, options);
    if (!out.empty())
      mim::emit_report(result.report, out);
    else if (command == "report")
      std::cout << mim::dump_report(result.report);
    if (command != "report" || !out.empty()) std::cout << result.summary;
    return result.exit_code;
  } catch (const mim::Error& e) {
    std::cerr << "mimsim: " << e.what() << "\n";
    return mim::kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobile Inspection Module simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string artifacts;
  app.add_option("--scenario", scenario, "Scenario JSON file")->required();
  app.add_option("--seed", seed, "Override the scenario seed");
  app.add_option("--out", out, "Write the JSON report to this path");
  app.add_option("--artifacts", artifacts, "Directory for point clouds (.xyz) and thermal frames (.csv)");

  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"inspect", "Plan viewpoints, scan and detect defects on an ORU or structure patches"},
      {"walk", "Plan and replay a walking gait to a goal fixture"},
      {"pod", "Run a probability-of-detection campaign"},
      {"maintain", "Execute a tool retrieval and tool-use sequence"},
      {"report", "Run the scenario's task and print the full report"},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mim::kExitError;
  }
  return execute(app.get_subcommands().front()->get_name(), scenario, seed, out, artifacts);
}
