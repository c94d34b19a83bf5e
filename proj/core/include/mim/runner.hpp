#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mim/config_io.hpp"
#include "mim/inspection.hpp"
#include "mim/locomotion.hpp"
#include "mim/maintenance.hpp"
#include "mim/verification.hpp"

namespace mim {

struct InspectTask {
  std::string oru;
  PlannerParams planner;
  StandoffRange range;
};

struct InspectStructureTask {
  std::vector<std::string> patches;  // empty: every structure patch
  PlannerParams planner;
  StandoffRange range;
};

struct WalkTask {
  std::string goal;
  std::optional<std::string> start_left;  // default: the assembly's feet
  std::optional<std::string> start_rear;
  double reach_m = kDefaultReach;
};

struct PodTask {
  PodSpec spec;
  bool base_seed_given = false;  // otherwise the scenario seed is used
  double standoff_m = kMaxStandoff;
};

struct MaintainAction {
  std::string op;  // open_lid, close_lid, retrieve, stow, grasp, torque
  std::string arm;
  std::size_t slot = 0;
  double dim_cm = 0.0;
  Vec3 worksite = Vec3::Zero();
  std::string fastener;
  double torque_nm = 0.0;
};

struct MaintainTask {
  std::vector<Fastener> fasteners;
  std::vector<MaintainAction> actions;
};

using Task = std::variant<InspectTask, InspectStructureTask, WalkTask, PodTask, MaintainTask>;

/// "inspect", "inspect_structure", "walk", "pod" or "maintain".
std::string_view task_name(const Task& task);

struct Scenario {
  std::string name;
  std::string scene;                   // as written in the scenario file
  std::filesystem::path scene_path;    // resolved against the scenario directory
  std::uint64_t seed = 0;
  Json task_echo;
  Task task;
};

/// Errors: ConfigError.
Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

enum class RowStatus { Pass, Fail, NotExercised };
std::string_view to_string(RowStatus s);

inline constexpr std::array<std::string_view, 11> kRequirementRows = {
    "Payloads", "Spacecraft", "Profilometry", "Resolution", "Reliability", "Range",
    "Thermal",  "Illumination", "Handling", "Grasping", "Torque"};

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitError = 2;

struct RunOptions {
  std::optional<std::filesystem::path> artifact_dir;  // point clouds (.xyz) and thermal frames (.csv)
};

struct RunResult {
  Json report;
  int exit_code = kExitOk;
  std::string summary;  // human-readable lines for the terminal
};

/// Errors: ConfigError for ids missing from the scene, IoError for artifact
/// writes, and whatever the task modules raise.
RunResult run(const Scenario& scenario, const SceneFile& scene, const RunOptions& options = {});
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// Writes the report as indented JSON with a trailing newline. Errors: IoError.
void emit_report(const Json& report, const std::filesystem::path& path);
std::string dump_report(const Json& report);

}  // namespace mim
