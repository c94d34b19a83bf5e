#include "mim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "mim/error.hpp"
#include "mim/random.hpp"

namespace mim {

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigError, what); }

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("task: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("task key '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

Vec3 vec3_of(const Json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  if (v.size() != 3) bad(std::string("task key '") + key + "' must hold 3 numbers");
  return {v[0], v[1], v[2]};
}

Json arr(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json arr(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json pose_json(const Pose& p) {
  const Quat& q = p.orientation;
  return Json{{"position", arr(p.position)}, {"orientation", Json::array({q.w(), q.x(), q.y(), q.z()})}};
}

void parse_planner(const Json& t, PlannerParams& planner, StandoffRange& range) {
  planner.standoffs_m = get_or(t, "standoffs_m", planner.standoffs_m);
  planner.coverage_cells = get_or(t, "coverage_cells", planner.coverage_cells);
  if (t.contains("standoff_range")) {
    const auto r = get<std::vector<double>>(t, "standoff_range");
    if (r.size() != 2) bad("standoff_range must be [min, max]");
    range = {r[0], r[1]};
  }
}

MaintainAction parse_action(const Json& a, const std::string& default_arm) {
  static const std::set<std::string> kOps = {"open_lid", "close_lid", "retrieve", "stow", "grasp", "torque"};
  MaintainAction act;
  act.op = get<std::string>(a, "op");
  if (!kOps.contains(act.op)) bad("unknown maintenance op '" + act.op + "'");
  act.arm = get_or(a, "arm", default_arm);
  if (act.op == "retrieve" || act.op == "stow") act.slot = get<std::size_t>(a, "slot");
  if (act.op == "grasp") {
    act.dim_cm = get<double>(a, "dim_cm");
    act.worksite = vec3_of(a, "worksite");
  }
  if (act.op == "torque") {
    act.fastener = get<std::string>(a, "fastener");
    act.torque_nm = get<double>(a, "torque_nm");
  }
  if (act.op != "open_lid" && act.op != "close_lid" && act.arm.empty())
    bad("maintenance op '" + act.op + "' needs an arm");
  return act;
}

Task parse_task(const Json& t) {
  if (!t.is_object()) bad("scenario key 'task' must be an object");
  const auto type = get<std::string>(t, "type");
  if (type == "inspect") {
    InspectTask task;
    task.oru = get<std::string>(t, "oru");
    parse_planner(t, task.planner, task.range);
    return task;
  }
  if (type == "inspect_structure") {
    InspectStructureTask task;
    task.patches = get_or(t, "patches", task.patches);
    parse_planner(t, task.planner, task.range);
    return task;
  }
  if (type == "walk") {
    WalkTask task;
    task.goal = get<std::string>(t, "goal");
    if (t.contains("start")) {
      task.start_left = get<std::string>(t.at("start"), "left");
      task.start_rear = get<std::string>(t.at("start"), "rear");
    }
    task.reach_m = get_or(t, "reach_m", task.reach_m);
    return task;
  }
  if (type == "pod") {
    PodTask task;
    PodSpec& s = task.spec;
    s.patch_id = get<std::string>(t, "patch");
    if (t.contains("defect")) s.defect = parse_defect_kind(t.at("defect"));
    s.n_trials = get_or(t, "n_trials", s.n_trials);
    task.base_seed_given = t.contains("base_seed");
    s.base_seed = get_or(t, "base_seed", s.base_seed);
    s.confidence = get_or(t, "confidence", s.confidence);
    s.target_pod = get_or(t, "target_pod", s.target_pod);
    s.hit_tolerance_mm = get_or(t, "hit_tolerance_mm", s.hit_tolerance_mm);
    s.detector.threshold_scale = get_or(t, "threshold_scale", s.detector.threshold_scale);
    s.threads = get_or(t, "threads", s.threads);
    task.standoff_m = get_or(t, "standoff_m", task.standoff_m);
    return task;
  }
  if (type == "maintain") {
    MaintainTask task;
    const auto arm = get_or<std::string>(t, "arm", "");
    for (const auto& f : get_or(t, "fasteners", Json::array())) {
      Fastener fastener;
      fastener.id = get<std::string>(f, "id");
      fastener.position = vec3_of(f, "position");
      fastener.fastened = get_or(f, "fastened", true);
      task.fasteners.push_back(std::move(fastener));
    }
    for (const auto& a : get<Json>(t, "actions")) task.actions.push_back(parse_action(a, arm));
    return task;
  }
  bad("unknown task type '" + type + "'");
}

std::string artifact_stem(std::size_t viewpoint, std::string_view patch_id) {
  char prefix[24];
  std::snprintf(prefix, sizeof prefix, "vp%03zu_", viewpoint);
  std::string out = prefix;
  for (char c : patch_id) {
    if (c == '+')
      out += 'p';
    else if (c == '-')
      out += 'm';
    else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')
      out += c;
    else
      out += '_';
  }
  return out;
}

template <class Writer>
void write_artifact(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  writer(out);
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

class Rows {
 public:
  void record(std::string_view row, bool pass) {
    RowStatus& s = status_.at(std::string(row));
    if (s != RowStatus::Fail) s = pass ? RowStatus::Pass : RowStatus::Fail;
  }
  bool any_fail() const {
    return std::any_of(status_.begin(), status_.end(), [](const auto& kv) { return kv.second == RowStatus::Fail; });
  }
  Json to_json() const {
    Json rows = Json::array();
    for (auto name : kRequirementRows)
      rows.push_back({{"element", name}, {"status", to_string(status_.at(std::string(name)))}});
    return rows;
  }
  std::string summary() const {
    std::string out;
    for (auto name : kRequirementRows) {
      const RowStatus s = status_.at(std::string(name));
      if (s != RowStatus::NotExercised) out += std::string(name) + ": " + std::string(to_string(s)) + "\n";
    }
    return out;
  }

 private:
  std::map<std::string, RowStatus> status_ = [] {
    std::map<std::string, RowStatus> m;
    for (auto name : kRequirementRows) m.emplace(name, RowStatus::NotExercised);
    return m;
  }();
};

struct Context {
  const Scenario& scenario;
  const SceneFile& file;
  const RunOptions& options;
  Json report;
  Rows rows;
  std::string summary;
};

bool outside_box(const Oru& oru, const Vec3& world) {
  const Vec3 local = oru.pose().orientation.conjugate() * (world - oru.pose().position);
  const auto& box = oru.bounding_box();
  for (int i = 0; i < 3; ++i)
    if (std::abs(local[i]) > box[static_cast<std::size_t>(i)] / 2.0) return true;
  return false;
}

void run_inspection(Context& ctx, const std::vector<std::string>& ids, const PlannerParams& planner,
                    const StandoffRange& range, const Oru* oru) {
  const WarehouseScene& scene = ctx.file.scene;
  const InspectionPlan plan = oru ? plan_viewpoints(scene, *oru, ctx.file.head, range, planner)
                                  : plan_viewpoints(scene, ids, ctx.file.head, range, planner);
  const std::uint64_t seed = ctx.scenario.seed;
  const auto& dir = ctx.options.artifact_dir;
  if (dir) {
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create '" + dir->string() + "': " + ec.message());
  }

  struct Found {
    std::string patch;
    Vec2 uv;
  };
  struct HotFound {
    std::string patch;
    Vec2 uv;
    ThermalClass cls;
    double tolerance_mm;
  };
  std::vector<Found> unique;
  std::vector<HotFound> hot;
  std::set<std::size_t> resolvable;
  Json viewpoints = Json::array(), detections = Json::array(), images = Json::array(), anomalies = Json::array();
  bool range_ok = true, external = true, illuminated = true, frames_in_range = true;
  std::uint64_t capture = 0;

  for (std::size_t i = 0; i < plan.viewpoints.size(); ++i) {
    const Viewpoint& vp = plan.viewpoints[i];
    SensorHead head = ctx.file.head;
    head.base_pose = vp.pose;
    head.tilt_deg = 0.0;
    range_ok = range_ok && vp.standoff_m >= kMinStandoff && vp.standoff_m <= kMaxStandoff &&
               vp.standoff_m >= range.min_m && vp.standoff_m <= range.max_m;
    if (oru) external = external && outside_box(*oru, head.sensor_pose().position);
    Json patches = Json::array();
    for (const auto& c : vp.covers) patches.push_back(c.patch_id);
    viewpoints.push_back({{"index", i}, {"pose", pose_json(vp.pose)}, {"standoff_m", vp.standoff_m}, {"patches", patches}});

    for (const auto& c : vp.covers) {
      const std::uint64_t scan_seed = mix_seed(seed + 2 * capture);
      const std::uint64_t thermal_seed = mix_seed(seed + 2 * capture + 1);
      ++capture;
      const std::string stem = artifact_stem(i, c.patch_id);

      const PointCloud cloud = scan_profile(scene, head, c.patch_id, scan_seed);
      if (dir) write_artifact(*dir / (stem + ".xyz"), [&](std::ostream& o) { write_xyz(cloud, o); });
      for (const auto& d : detect_surface_defects(cloud)) {
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Found& f) {
          return f.patch == d.patch_id && (f.uv - d.centroid_uv).norm() * 1000.0 <= 2.0;
        });
        if (seen) continue;
        unique.push_back({d.patch_id, d.centroid_uv});
        detections.push_back({{"viewpoint", i},
                              {"patch", d.patch_id},
                              {"centroid_uv", arr(d.centroid_uv)},
                              {"class", to_string(d.kind_guess)},
                              {"size_mm", d.size_mm},
                              {"major_extent_mm", d.major_extent_mm},
                              {"minor_extent_mm", d.minor_extent_mm},
                              {"elongation", d.elongation},
                              {"depth_mm", d.depth_mm()},
                              {"samples", d.samples}});
      }

      const Image image = capture_image(scene, head, c.patch_id);
      illuminated = illuminated && image.illumination_used;
      Json features = Json::array();
      for (const auto& f : image.features) {
        if (f.resolvable) resolvable.insert(f.defect_index);
        features.push_back({{"defect", f.defect_index},
                            {"size_mm", f.size_mm},
                            {"apparent_size_px", f.apparent_size_px},
                            {"resolvable", f.resolvable}});
      }
      images.push_back({{"viewpoint", i},
                        {"patch", c.patch_id},
                        {"standoff_m", image.standoff_m},
                        {"illumination_used", image.illumination_used},
                        {"features", features}});

      const ThermalFrame frame = capture_thermal(scene, head, c.patch_id, thermal_seed);
      if (dir) write_artifact(*dir / (stem + ".csv"), [&](std::ostream& o) { write_csv(frame, o); });
      for (double v : frame.values) frames_in_range = frames_in_range && v >= ThermalModel::kMinC && v <= ThermalModel::kMaxC;
      const PatchView view = scene.view(c.patch_id);
      const double pixel_mm = 2.0 * vp.standoff_m * std::tan(deg_to_rad(head.thermal.hfov_deg / 2.0)) /
                              ThermalModel::kWidth * 1000.0;
      for (const auto& a : detect_thermal_anomalies(frame, view.patch->base_temperature)) {
        Vec2 sum = Vec2::Zero();
        int hits = 0;
        for (const auto& [col, row] : a.pixels)
          if (auto uv = thermal_pixel_uv(view, head, col + 0.5, row + 0.5)) {
            sum += *uv;
            ++hits;
          }
        const Vec2 centroid = hits ? Vec2(sum / hits) : Vec2(Vec2::Zero());
        hot.push_back({c.patch_id, centroid, a.classification, 2.0 * pixel_mm});
        anomalies.push_back({{"viewpoint", i},
                             {"patch", c.patch_id},
                             {"classification", to_string(a.classification)},
                             {"pixels", a.pixels.size()},
                             {"mean_delta_c", a.mean_delta_c},
                             {"peak_delta_c", a.peak_delta_c},
                             {"centroid_uv", arr(centroid)}});
      }
    }
  }

  // Ground truth on the inspected patches, scored against the detections.
  const std::set<std::string> inspected(plan.inspected_patches.begin(), plan.inspected_patches.end());
  Json truth = Json::array();
  std::optional<bool> resolution_ok, profilometry_ok, thermal_ok;
  auto fold = [](std::optional<bool>& acc, bool v) { acc = acc.value_or(true) && v; };
  for (std::size_t di = 0; di < scene.defects().size(); ++di) {
    const Defect& d = scene.defects()[di];
    if (!inspected.contains(d.patch_id)) continue;
    Json row{{"index", di}, {"kind", kind_name(d.kind)}, {"patch", d.patch_id}, {"uv", arr(d.uv)}};
    if (const auto* h = std::get_if<ThermalHotspot>(&d.kind)) {
      const ThermalClass want = h->delta_c >= 0 ? ThermalClass::Hot : ThermalClass::Cold;
      const bool found = std::any_of(hot.begin(), hot.end(), [&](const HotFound& a) {
        return a.patch == d.patch_id && a.cls == want && (a.uv - d.uv).norm() * 1000.0 <= h->radius_mm + a.tolerance_mm;
      });
      row["detected"] = found;
      const double target = scene.patch(d.patch_id).base_temperature + h->delta_c;
      if (std::abs(h->delta_c) >= kDefaultThermalThreshold && target >= ThermalModel::kMinC &&
          target <= ThermalModel::kMaxC)
        fold(thermal_ok, found);
    } else {
      const double tol = std::max(2.0, bounding_radius_mm(d.kind));
      const bool found = std::any_of(unique.begin(), unique.end(), [&](const Found& f) {
        return f.patch == d.patch_id && (f.uv - d.uv).norm() * 1000.0 <= tol;
      });
      const bool seen = resolvable.contains(di);
      row["detected"] = found;
      row["resolvable"] = seen;
      if (const auto* c = std::get_if<ImpactCrater>(&d.kind); c && c->diameter_mm >= 0.6 - 1e-9)
        fold(resolution_ok, found && seen);
      if (const auto* s = std::get_if<Scratch>(&d.kind); s && s->depth_mm >= 0.3 - 1e-9) fold(profilometry_ok, found);
    }
    truth.push_back(std::move(row));
  }

  const bool complete = plan.coverage_fraction >= 1.0 - 1e-9 && plan.unreachable_patches.empty();
  ctx.rows.record("Payloads", complete);
  if (oru) ctx.rows.record("Spacecraft", complete && external);
  ctx.rows.record("Range", range_ok);
  ctx.rows.record("Illumination", illuminated);
  if (resolution_ok) ctx.rows.record("Resolution", *resolution_ok);
  if (profilometry_ok) ctx.rows.record("Profilometry", *profilometry_ok);
  if (thermal_ok) ctx.rows.record("Thermal", *thermal_ok && frames_in_range);

  ctx.report["plans"]["inspection"] = {{"viewpoint_count", plan.viewpoints.size()}, {"viewpoints", viewpoints}};
  ctx.report["coverage"] = {{"fraction", plan.coverage_fraction},
                            {"reachable_area_m2", plan.reachable_area_m2},
                            {"inspected_patches", plan.inspected_patches},
                            {"unreachable_patches", plan.unreachable_patches}};
  ctx.report["detections"] = detections;
  ctx.report["ground_truth"] = truth;
  ctx.report["images"] = images;
  ctx.report["thermal_anomalies"] = anomalies;
  char line[96];
  std::snprintf(line, sizeof line, "viewpoints: %zu, coverage: %.6f, detections: %zu\n", plan.viewpoints.size(),
                plan.coverage_fraction, detections.size());
  ctx.summary += line;
  for (const auto& p : plan.unreachable_patches) ctx.summary += "unreachable: " + p + "\n";
}

void run_task(Context& ctx, const InspectTask& t) {
  const Oru& oru = [&]() -> const Oru& {
    try {
      return ctx.file.scene.oru(t.oru);
    } catch (const Error&) {
      bad("scenario references unknown ORU '" + t.oru + "'");
    }
  }();
  run_inspection(ctx, {}, t.planner, t.range, &oru);
}

void run_task(Context& ctx, const InspectStructureTask& t) {
  std::vector<std::string> ids = t.patches;
  if (ids.empty())
    for (const auto& p : ctx.file.scene.structure_patches()) ids.push_back(p.id);
  if (ids.empty()) bad("scene has no structure patches to inspect");
  for (const auto& id : ids)
    if (!ctx.file.scene.has_patch(id)) bad("scenario references unknown patch '" + id + "'");
  run_inspection(ctx, ids, t.planner, t.range, nullptr);
}

void run_task(Context& ctx, const WalkTask& t) {
  const WarehouseScene& scene = ctx.file.scene;
  const auto& assembly = ctx.file.assembly;
  auto fixture_of = [&](const std::string& port) -> std::string {
    const auto& f = assembly->port(port).fixture;
    if (!f) bad("walking foot '" + port + "' is not anchored");
    return *f;
  };
  std::optional<WalkingLegs> legs;
  if (assembly) legs = walking_legs(*assembly);
  std::string left, rear;
  if (t.start_left) {
    left = *t.start_left;
    rear = *t.start_rear;
  } else {
    if (!legs) bad("walk task needs either a start or an assembly with anchored legs");
    left = fixture_of(legs->left_foot);
    rear = fixture_of(legs->rear_foot);
  }
  for (const auto& id : {left, rear, t.goal})
    try {
      scene.fixture(id);
    } catch (const Error&) {
      bad("scenario references unknown fixture '" + id + "'");
    }

  const FixtureGraph graph = FixtureGraph::from_scene(scene, t.reach_m, assembly ? &*assembly : nullptr);
  const GaitPlan plan = plan_walk(graph, left, rear, t.goal);

  Json steps = Json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i)
    steps.push_back({{"step", i + 1},
                     {"leg", to_string(plan.steps[i].leg)},
                     {"from", plan.steps[i].detach_from},
                     {"to", plan.steps[i].attach_to}});
  Json walk{{"start_left", left}, {"start_rear", rear}, {"goal", t.goal}, {"reach_m", t.reach_m}, {"steps", steps}};

  const bool replay = legs && fixture_of(legs->left_foot) == left && fixture_of(legs->rear_foot) == rear;
  walk["replayed"] = replay;
  if (replay) {
    AssemblyGraph state = *assembly;
    const std::string mim = the_mim(state).id;
    for (const auto& step : plan.steps) {
      state = execute_step(state, scene, step, t.reach_m);
      if (!state.is_held(mim)) fail(ErrorCode::IllegalStep, "replay left the MIM without an anchor");
    }
    Json anchors = Json::array();
    for (const auto& a : state.anchors()) anchors.push_back({{"port", a.port}, {"fixture", a.fixture}});
    walk["final_anchors"] = anchors;
  }
  ctx.report["plans"]["walk"] = walk;
  ctx.summary += format_plan(plan);
}

void run_task(Context& ctx, const PodTask& t) {
  const WarehouseScene& scene = ctx.file.scene;
  if (!scene.has_patch(t.spec.patch_id)) bad("scenario references unknown patch '" + t.spec.patch_id + "'");
  PodSpec spec = t.spec;
  if (!t.base_seed_given) spec.base_seed = ctx.scenario.seed;
  const PatchView view = scene.view(spec.patch_id);
  SensorHead head = ctx.file.head;
  head.tilt_deg = 0.0;
  head.base_pose = pose_facing(view, Vec2(view.patch->extent_u / 2.0, view.patch->extent_v / 2.0), t.standoff_m);
  const PodResult r = run_pod_campaign(scene, head, spec);

  Json trials = Json::array();
  for (const auto& rec : r.records)
    trials.push_back({{"index", rec.index},
                      {"seed", rec.seed},
                      {"placement_uv", arr(rec.placement_uv)},
                      {"detected", rec.detected},
                      {"nearest_mm", rec.nearest_mm < 0.0 ? Json(nullptr) : Json(rec.nearest_mm)}});
  Json defect{{"type", kind_name(spec.defect)}};
  if (const auto* c = std::get_if<ImpactCrater>(&spec.defect)) {
    defect["diameter_mm"] = c->diameter_mm;
    defect["depth_mm"] = c->depth_mm;
  } else if (const auto* s = std::get_if<Scratch>(&spec.defect)) {
    defect["depth_mm"] = s->depth_mm;
    defect["width_mm"] = s->width_mm;
    defect["length_mm"] = s->length_mm;
  }
  ctx.report["pod"] = {{"patch", spec.patch_id},
                       {"defect", defect},
                       {"standoff_m", t.standoff_m},
                       {"base_seed", spec.base_seed},
                       {"k", r.hits},
                       {"n", r.trials},
                       {"alpha", r.alpha},
                       {"confidence", r.confidence},
                       {"target_pod", r.target_pod},
                       {"pod_lower_bound", r.pod_lower_bound},
                       {"pass", r.pass},
                       {"trials", trials}};
  ctx.rows.record("Reliability", r.pass);
  ctx.rows.record("Range", t.standoff_m >= kMinStandoff && t.standoff_m <= kMaxStandoff);
  if (const auto* c = std::get_if<ImpactCrater>(&spec.defect); c && c->diameter_mm <= 0.6 + 1e-9)
    ctx.rows.record("Resolution", r.pass);
  if (const auto* s = std::get_if<Scratch>(&spec.defect); s && s->depth_mm <= 0.3 + 1e-9)
    ctx.rows.record("Profilometry", r.pass);
  char line[96];
  std::snprintf(line, sizeof line, "k=%d n=%d pod_lower_bound=%.6f pass=%s\n", r.hits, r.trials, r.pod_lower_bound,
                r.pass ? "true" : "false");
  ctx.summary += line;
}

void run_task(Context& ctx, const MaintainTask& t) {
  if (!ctx.file.assembly) bad("maintain task needs an assembly in the scene file");
  for (const auto& a : t.actions)
    if (!a.arm.empty() && !ctx.file.assembly->has_module(a.arm)) bad("scenario references unknown arm '" + a.arm + "'");
  Workcell cell(*ctx.file.assembly, ctx.file.head, t.fasteners);

  Json log = Json::array();
  bool handled = true;
  std::optional<bool> grasping, torque;
  bool any_handling = false;
  for (std::size_t i = 0; i < t.actions.size(); ++i) {
    const MaintainAction& a = t.actions[i];
    Json entry{{"index", i}, {"op", a.op}};
    if (!a.arm.empty() && a.op != "open_lid" && a.op != "close_lid") entry["arm"] = a.arm;
    const std::size_t before = cell.log().size();
    bool ok = true;
    std::string outcome = "ok";
    try {
      if (a.op == "open_lid" || a.op == "close_lid") {
        cell.set_lid(a.op == "open_lid");
      } else if (a.op == "retrieve") {
        entry["slot"] = a.slot;
        cell.retrieve_tool(a.arm, a.slot);
      } else if (a.op == "stow") {
        entry["slot"] = a.slot;
        cell.stow_tool(a.arm, a.slot);
      } else if (a.op == "grasp") {
        entry["dim_cm"] = a.dim_cm;
        entry["worksite"] = arr(a.worksite);
        const GraspOutcome g = cell.grasp(a.arm, a.dim_cm, a.worksite);
        ok = g.success;
        outcome = to_string(g.result);
      } else {
        entry["fastener"] = a.fastener;
        entry["torque_nm"] = a.torque_nm;
        const TorqueOutcome q = cell.apply_torque(a.arm, a.fastener, a.torque_nm);
        ok = q.success;
        outcome = to_string(q.result);
        entry["fastened"] = q.fastened;
      }
    } catch (const Error& e) {
      ok = false;
      outcome = "error";
      entry["error"] = to_string(e.code());
      entry["message"] = e.what();
    }
    const bool errored = outcome == "error";
    entry["success"] = ok;
    entry["outcome"] = outcome;
    Json observations = Json::array();
    if (cell.log().size() > before)
      for (const auto& o : cell.log().back().observations)
        observations.push_back({{"kind", o.kind},
                                {"observer", o.observer},
                                {"angle_deg", o.angle_deg},
                                {"distance_m", o.distance_m}});
    entry["observations"] = observations;
    log.push_back(std::move(entry));

    if (a.op != "open_lid" && a.op != "close_lid") {
      any_handling = true;
      handled = handled && !errored;
    }
    if (a.op == "grasp") {
      const bool in_envelope = a.dim_cm >= kGripMinCm && a.dim_cm <= kGripMaxCm;
      grasping = grasping.value_or(true) && !errored && ok == in_envelope;
    }
    if (a.op == "torque") {
      const bool in_envelope = a.torque_nm >= kTorqueMinNm && a.torque_nm <= kTorqueMaxNm;
      torque = torque.value_or(true) && !errored && ok == in_envelope;
    }
  }
  if (any_handling) ctx.rows.record("Handling", handled && cell.tools_conserved());
  if (grasping) ctx.rows.record("Grasping", *grasping);
  if (torque) ctx.rows.record("Torque", *torque);
  ctx.report["maintenance_log"] = log;
  ctx.summary += "maintenance actions: " + std::to_string(t.actions.size()) + "\n";
}

Json configuration_json(const std::optional<AssemblyGraph>& assembly) {
  if (!assembly) return nullptr;
  try {
    return to_string(validate_configuration(*assembly));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnanchoredAssembly) return "unanchored";
    if (e.code() == ErrorCode::Unrecognized) return "unrecognized";
    throw;
  }
}

Json power_json(const std::optional<AssemblyGraph>& assembly) {
  if (!assembly) return nullptr;
  const PowerReport p = power_check(*assembly);
  return {{"total_power_w", p.total_power_w},
          {"bus_voltage_v", p.bus_voltage_v},
          {"total_current_a", p.total_current_a},
          {"limit_a", p.limit_a},
          {"within_limit", p.within_limit}};
}

}  // namespace

std::string_view task_name(const Task& task) {
  static constexpr std::string_view kNames[] = {"inspect", "inspect_structure", "walk", "pod", "maintain"};
  return kNames[task.index()];
}

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Pass: return "PASS";
    case RowStatus::Fail: return "FAIL";
    case RowStatus::NotExercised: return "NOT_EXERCISED";
  }
  return "NOT_EXERCISED";
}

Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("scenario must be a JSON object");
  Scenario s;
  s.name = get_or<std::string>(j, "name", "");
  s.scene = get<std::string>(j, "scene");
  s.scene_path = std::filesystem::path(s.scene).is_absolute() ? std::filesystem::path(s.scene) : base_dir / s.scene;
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (!j.contains("task")) bad("scenario: missing key 'task'");
  s.task_echo = j.at("task");
  s.task = parse_task(s.task_echo);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_json_file(path), path.parent_path());
}

RunResult run(const Scenario& scenario, const SceneFile& file, const RunOptions& options) {
  Context ctx{scenario, file, options, Json::object(), {}, {}};
  Json& r = ctx.report;
  r["scenario"] = {{"name", scenario.name}, {"scene", scenario.scene}, {"seed", scenario.seed}, {"task", scenario.task_echo}};
  r["configuration"] = configuration_json(file.assembly);
  r["power"] = power_json(file.assembly);
  r["plans"] = {{"inspection", nullptr}, {"walk", nullptr}};
  r["coverage"] = nullptr;
  r["detections"] = Json::array();
  r["ground_truth"] = Json::array();
  r["images"] = Json::array();
  r["thermal_anomalies"] = Json::array();
  r["pod"] = nullptr;
  r["maintenance_log"] = Json::array();

  std::visit([&](const auto& task) { run_task(ctx, task); }, scenario.task);

  RunResult out;
  out.exit_code = ctx.rows.any_fail() ? kExitViolation : kExitOk;
  r["traceability"] = ctx.rows.to_json();
  r["exit_code"] = out.exit_code;
  out.report = std::move(r);
  out.summary = ctx.summary + ctx.rows.summary();
  return out;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  return run(scenario, load_scene_file(scenario.scene_path), options);
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

void emit_report(const Json& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  const std::string text = dump_report(report);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace mim
