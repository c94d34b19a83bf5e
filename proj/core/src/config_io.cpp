#include "mim/config_io.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>

#include "mim/error.hpp"

namespace mim {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigError, what); }

const Json& at(const Json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing key '") + key + "'");
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("key '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key);
}

Vec3 vec3(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) bad(std::string(what) + " must be an array of 3 numbers");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const nlohmann::json::exception& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

Vec2 vec2(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) bad(std::string(what) + " must be an array of 2 numbers");
  try {
    return {j[0].get<double>(), j[1].get<double>()};
  } catch (const nlohmann::json::exception& e) {
    bad(std::string(what) + ": " + e.what());
  }
}

// Runs a constructor or validator, reporting its failure as ConfigError.
template <class F>
auto checked(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    bad(context + ": " + e.what());
  }
}

const Json& array_at(const Json& j, const char* key) {
  const Json& a = at(j, key);
  if (!a.is_array()) bad(std::string("key '") + key + "' must be an array");
  return a;
}

const Json kEmptyArray = Json::array();

const Json& optional_array(const Json& j, const char* key) {
  return j.contains(key) ? array_at(j, key) : kEmptyArray;
}

void apply_patch_fields(SurfacePatch& p, const Json& j) {
  p.emissivity = get_or(j, "emissivity", p.emissivity);
  p.base_temperature = get_or(j, "base_temperature", p.base_temperature);
  p.reachable = get_or(j, "reachable", p.reachable);
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

Pose parse_pose(const Json& j) {
  const Vec3 position = vec3(at(j, "position"), "position");
  Quat q = Quat::Identity();
  if (j.contains("orientation")) {
    const Json& o = j["orientation"];
    if (!o.is_array() || o.size() != 4) bad("orientation must be [w, x, y, z]");
    try {
      q = Quat(o[0].get<double>(), o[1].get<double>(), o[2].get<double>(), o[3].get<double>());
    } catch (const nlohmann::json::exception& e) {
      bad(std::string("orientation: ") + e.what());
    }
    if (!(q.norm() > 0.0)) bad("orientation must be a nonzero quaternion");
    q.normalize();
  }
  return checked("pose", [&] { return Pose::make(position, q); });
}

SurfacePatch parse_patch(const Json& j) {
  SurfacePatch p;
  p.id = get<std::string>(j, "id");
  p.frame = parse_pose(at(j, "frame"));
  const Vec2 extent = vec2(at(j, "extent"), "extent");
  p.extent_u = extent.x();
  p.extent_v = extent.y();
  apply_patch_fields(p, j);
  checked("patch '" + p.id + "'", [&] { validate(p); });
  return p;
}

DefectKind parse_defect_kind(const Json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "crater") return ImpactCrater{get<double>(j, "diameter_mm"), get<double>(j, "depth_mm")};
  if (type == "scratch")
    return Scratch{get<double>(j, "depth_mm"), get<double>(j, "width_mm"), get<double>(j, "length_mm"),
                   get_or(j, "angle_deg", 0.0) * std::numbers::pi / 180.0};
  if (type == "hotspot") return ThermalHotspot{get<double>(j, "delta_c"), get<double>(j, "radius_mm")};
  bad("unknown defect type '" + type + "'");
}

Defect parse_defect(const Json& j) {
  Defect d;
  d.kind = parse_defect_kind(j);
  d.patch_id = get<std::string>(j, "patch");
  d.uv = vec2(at(j, "uv"), "uv");
  return d;
}

Oru parse_oru(const Json& j) {
  const auto id = get<std::string>(j, "id");
  const Pose pose = j.contains("pose") ? parse_pose(j["pose"]) : Pose{};
  if (j.contains("box")) {
    const Vec3 size = vec3(j["box"], "box");
    Oru box = checked("ORU '" + id + "'", [&] { return make_box_oru(id, size, pose); });
    if (!j.contains("patch_properties")) return box;
    const Json& props = j["patch_properties"];
    if (!props.is_object()) bad("patch_properties must be an object keyed by patch id");
    std::vector<SurfacePatch> patches = box.patches();
    for (const auto& [pid, fields] : props.items()) {
      auto it = std::find_if(patches.begin(), patches.end(), [&](const SurfacePatch& p) { return p.id == pid; });
      if (it == patches.end()) bad("ORU '" + id + "' has no patch '" + pid + "'");
      apply_patch_fields(*it, fields);
    }
    return checked("ORU '" + id + "'", [&] { return Oru(id, std::move(patches), box.bounding_box(), pose); });
  }
  std::vector<SurfacePatch> patches;
  for (const auto& p : array_at(j, "patches")) patches.push_back(parse_patch(p));
  const Vec3 bbox = vec3(at(j, "bounding_box"), "bounding_box");
  return checked("ORU '" + id + "'", [&] { return Oru(id, std::move(patches), {bbox.x(), bbox.y(), bbox.z()}, pose); });
}

FixturePoint parse_fixture(const Json& j) {
  FixturePoint f;
  f.id = get<std::string>(j, "id");
  f.pose = parse_pose(j);
  const auto location = get_or<std::string>(j, "location", "external");
  if (location == "internal")
    f.location = LocationClass::Internal;
  else if (location == "external")
    f.location = LocationClass::External;
  else
    bad("fixture '" + f.id + "': location must be internal or external");
  if (j.contains("occupant")) f.occupant = get<std::string>(j, "occupant");
  return f;
}

WarehouseScene parse_scene(const Json& j) {
  std::vector<FixturePoint> fixtures;
  std::vector<Oru> orus;
  std::vector<SurfacePatch> structure;
  std::vector<Defect> defects;
  for (const auto& f : optional_array(j, "fixtures")) fixtures.push_back(parse_fixture(f));
  for (const auto& o : optional_array(j, "orus")) orus.push_back(parse_oru(o));
  for (const auto& p : optional_array(j, "structure_patches")) structure.push_back(parse_patch(p));
  for (const auto& d : optional_array(j, "defects")) defects.push_back(parse_defect(d));
  const double ambient = get_or(j, "ambient_temperature", 20.0);
  return checked("scene", [&] {
    return WarehouseScene(std::move(fixtures), std::move(orus), std::move(structure), std::move(defects), ambient);
  });
}

AssemblyGraph parse_assembly(const Json& j, const WarehouseScene& scene) {
  std::vector<ModuleAsset> modules;
  for (const auto& m : array_at(j, "modules")) {
    const auto id = get<std::string>(m, "id");
    const auto kind = checked("module '" + id + "'", [&] { return parse_module_kind(get<std::string>(m, "kind")); });
    const double draw = get_or(m, "power_draw_w", 0.0);
    if (kind == ModuleKind::Mim) {
      MimPowerDefaults power;
      if (m.contains("power")) {
        const Json& p = m["power"];
        power.unit_w = get_or(p, "unit_w", power.unit_w);
        power.unit_count = get_or(p, "unit_count", power.unit_count);
        power.obc_w = get_or(p, "obc_w", power.obc_w);
        power.illumination_w = get_or(p, "illumination_w", power.illumination_w);
      }
      ModuleAsset mim = make_mim(id, power);
      mim.power_draw_w = draw;
      modules.push_back(std::move(mim));
    } else if (kind == ModuleKind::WalkingManipulator) {
      modules.push_back(make_walking_manipulator(id, draw));
    } else {
      modules.push_back(make_single_port_module(id, kind, draw));
    }
  }
  AssemblyGraph graph = checked("assembly", [&] { return AssemblyGraph(std::move(modules)); });

  auto advance_to = [&](const std::string& port, CouplingState target) {
    if (target == CouplingState::Free) bad("port '" + port + "': a coupling cannot be declared free");
    while (graph.port(port).state != target) graph = advance_coupling(graph, port);
  };
  for (const auto& c : optional_array(j, "couplings")) {
    const auto a = get<std::string>(c, "a");
    const auto b = get<std::string>(c, "b");
    const auto state = checked("coupling", [&] { return parse_coupling_state(get_or<std::string>(c, "state", "full")); });
    checked("coupling " + a + " - " + b, [&] {
      graph = couple(graph, a, b);
      advance_to(a, state);
    });
  }
  for (const auto& an : optional_array(j, "anchors")) {
    const auto port = get<std::string>(an, "port");
    const auto fixture = get<std::string>(an, "fixture");
    const auto state = checked("anchor", [&] { return parse_coupling_state(get_or<std::string>(an, "state", "full")); });
    checked("anchor " + port + " @ " + fixture, [&] {
      const FixturePoint& f = scene.fixture(fixture);
      if (f.occupant && *f.occupant != port) bad("fixture '" + fixture + "' is occupied by '" + *f.occupant + "'");
      graph = anchor(graph, port, fixture);
      advance_to(port, state);
    });
  }
  return graph;
}

SensorHead parse_sensor_head(const Json& j) {
  SensorHead head = default_sensor_head(j.contains("base_pose") ? parse_pose(j["base_pose"]) : Pose{});
  head.tilt_deg = get_or(j, "tilt_deg", head.tilt_deg);
  head.illumination_on = get_or(j, "illumination", head.illumination_on);
  head.ambient_light = get_or(j, "ambient_light", head.ambient_light);
  if (j.contains("camera")) {
    const Json& c = j["camera"];
    for (auto& cam : head.cameras) {
      cam.focal_length_m = get_or(c, "focal_length_m", cam.focal_length_m);
      cam.pixel_pitch_m = get_or(c, "pixel_pitch_m", cam.pixel_pitch_m);
      cam.width_px = get_or(c, "width_px", cam.width_px);
      cam.height_px = get_or(c, "height_px", cam.height_px);
      cam.min_feature_px = get_or(c, "min_feature_px", cam.min_feature_px);
    }
  }
  if (j.contains("profilometer")) {
    const Json& p = j["profilometer"];
    auto& m = head.profilometer;
    m.sample_pitch_mm = get_or(p, "sample_pitch_mm", m.sample_pitch_mm);
    m.depth_noise_sigma_mm = get_or(p, "depth_noise_sigma_mm", m.depth_noise_sigma_mm);
    m.scan_u_m = get_or(p, "scan_u_m", m.scan_u_m);
    m.scan_v_m = get_or(p, "scan_v_m", m.scan_v_m);
    m.min_range_m = get_or(p, "min_range_m", m.min_range_m);
    m.max_range_m = get_or(p, "max_range_m", m.max_range_m);
  }
  if (j.contains("thermal")) {
    const Json& t = j["thermal"];
    head.thermal.netd_c = get_or(t, "netd_c", head.thermal.netd_c);
    head.thermal.hfov_deg = get_or(t, "hfov_deg", head.thermal.hfov_deg);
    head.thermal.subsamples = get_or(t, "subsamples", head.thermal.subsamples);
  }
  checked("sensor_head", [&] { validate(head); });
  return head;
}

SceneFile parse_scene_file(const Json& j) {
  if (!j.is_object()) bad("scene file must hold a JSON object");
  WarehouseScene scene = parse_scene(j);
  std::optional<AssemblyGraph> assembly;
  if (j.contains("assembly")) assembly = parse_assembly(j["assembly"], scene);
  SensorHead head = j.contains("sensor_head") ? parse_sensor_head(j["sensor_head"]) : default_sensor_head();
  return {std::move(scene), std::move(assembly), std::move(head)};
}

SceneFile load_scene_file(const std::filesystem::path& path) { return parse_scene_file(read_json_file(path)); }

}  // namespace mim
