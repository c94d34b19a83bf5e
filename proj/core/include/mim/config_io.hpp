#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "mim/interconnect.hpp"
#include "mim/scene.hpp"
#include "mim/sensors.hpp"

namespace mim {

using Json = nlohmann::ordered_json;

/// Errors: ConfigError (missing file or malformed JSON).
Json read_json_file(const std::filesystem::path& path);

// Every parser below reports malformed or inconsistent input as ConfigError,
// with the offending key in the message.

/// {"position": [x, y, z], "orientation": [w, x, y, z]}; orientation optional
/// and normalized on load.
Pose parse_pose(const Json& j);
SurfacePatch parse_patch(const Json& j);
/// {"type": "crater" | "scratch" | "hotspot", ...sizes}.
DefectKind parse_defect_kind(const Json& j);
Defect parse_defect(const Json& j);
Oru parse_oru(const Json& j);
FixturePoint parse_fixture(const Json& j);
WarehouseScene parse_scene(const Json& j);
/// Fixture ids in anchors are checked against the scene.
AssemblyGraph parse_assembly(const Json& j, const WarehouseScene& scene);
/// Overrides on top of default_sensor_head().
SensorHead parse_sensor_head(const Json& j);

struct SceneFile {
  WarehouseScene scene;
  std::optional<AssemblyGraph> assembly;
  SensorHead head;
};

SceneFile parse_scene_file(const Json& j);
SceneFile load_scene_file(const std::filesystem::path& path);

}  // namespace mim
