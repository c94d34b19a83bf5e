#include "mim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mim/error.hpp"
#include "mim/random.hpp"

namespace mim {

namespace {

// Geometry is evaluated in floating point; a pose placed exactly at a
// boundary must not flip because of the last ulp.
constexpr double kRangeSlack = 1e-9;

Vec2 to_uv(const PatchView& patch, const Vec3& world) {
  const Vec3 local = patch.world.orientation.conjugate() * (world - patch.world.position);
  return {local.x(), local.y()};
}

void check_range(double standoff, double lo, double hi, std::string_view what) {
  if (standoff < lo - kRangeSlack || standoff > hi + kRangeSlack) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s standoff %.4f m outside [%.2f, %.2f] m", std::string(what).c_str(), standoff,
                  lo, hi);
    fail(ErrorCode::OutOfRange, buf);
  }
}

// Corner hits of a pinhole frustum on the patch plane; empty when any
// corner ray misses the plane.
std::vector<Vec2> frustum_corners(const PatchView& patch, const Pose& sensor, const Vec3& origin_local,
                                  double tan_h, double tan_v) {
  std::vector<Vec2> out;
  const Vec3 origin = sensor.apply(origin_local);
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      const Vec3 dir = sensor.rotate(Vec3(sx * tan_h, sy * tan_v, 1.0));
      const double t = intersect_ray_plane(origin, dir, patch.world.position, patch.normal());
      if (t <= 0.0) return {};
      out.push_back(to_uv(patch, origin + t * dir));
    }
  return out;
}

double visual_size_mm(const DefectKind& kind) {
  if (const auto* c = std::get_if<ImpactCrater>(&kind)) return c->diameter_mm;
  if (const auto* s = std::get_if<Scratch>(&kind)) return s->width_mm;
  return 0.0;
}

}  // namespace

double CameraModel::hfov_deg() const {
  return 2.0 * std::atan(width_px * pixel_pitch_m / (2.0 * focal_length_m)) * 180.0 / std::numbers::pi;
}

double CameraModel::vfov_deg() const {
  return 2.0 * std::atan(height_px * pixel_pitch_m / (2.0 * focal_length_m)) * 180.0 / std::numbers::pi;
}

double ThermalModel::vfov_deg() const {
  const double half = std::atan(std::tan(deg_to_rad(hfov_deg / 2.0)) * kHeight / kWidth);
  return 2.0 * half * 180.0 / std::numbers::pi;
}

Pose SensorHead::sensor_pose() const {
  Pose p = base_pose;
  if (tilt_deg != 0.0) p.orientation = (p.orientation * rotation_x(deg_to_rad(tilt_deg))).normalized();
  return p;
}

SensorHead default_sensor_head(const Pose& base) {
  SensorHead head;
  head.base_pose = base;
  const double dx = 0.06;
  const double dy = 0.04;
  const Vec3 corners[] = {{-dx, -dy, 0.0}, {dx, -dy, 0.0}, {-dx, dy, 0.0}, {dx, dy, 0.0}};
  for (std::size_t i = 0; i < head.cameras.size(); ++i) head.cameras[i].mount = corners[i];
  return head;
}

void validate(const SensorHead& head) {
  validate(head.base_pose);
  require(head.tilt_deg >= -90.0 && head.tilt_deg <= 90.0, ErrorCode::InvalidArgument,
          "tilt must lie within [-90, 90] degrees");
  for (const auto& c : head.cameras)
    require(c.focal_length_m > 0 && c.pixel_pitch_m > 0 && c.width_px > 0 && c.height_px > 0 && c.min_feature_px > 0,
            ErrorCode::InvalidArgument, "camera parameters must be positive");
  const auto& p = head.profilometer;
  require(p.sample_pitch_mm > 0 && p.depth_noise_sigma_mm >= 0 && p.scan_u_m > 0 && p.scan_v_m > 0,
          ErrorCode::InvalidArgument, "profilometer pitch and window must be > 0, sigma >= 0");
  require(p.min_range_m >= kMinStandoff && p.max_range_m <= kMaxStandoff && p.min_range_m < p.max_range_m,
          ErrorCode::InvalidArgument, "profilometer working range must lie within [0.2, 2.0] m");
  require(head.thermal.netd_c >= 0 && head.thermal.hfov_deg > 0 && head.thermal.hfov_deg < 180 &&
              head.thermal.subsamples >= 1,
          ErrorCode::InvalidArgument, "thermal parameters out of range");
}

Pose pose_facing(const PatchView& patch, const Vec2& uv, double standoff_m) {
  Pose p;
  p.position = patch.point(uv) + standoff_m * patch.normal();
  // Half turn about x: sensor z looks down the normal, x stays along u.
  p.orientation = (patch.world.orientation * Quat(0.0, 1.0, 0.0, 0.0)).normalized();
  return p;
}

double gsd_mm(const CameraModel& camera, double distance_m) {
  require(distance_m > 0.0, ErrorCode::NonPositiveDistance, "distance must be > 0");
  return distance_m * camera.pixel_pitch_m / camera.focal_length_m * 1000.0;
}

Sighting sight(const PatchView& patch, const SensorHead& head) {
  const Pose sensor = head.sensor_pose();
  const Vec3 dir = sensor.rotate(Vec3::UnitZ());
  const double t = intersect_ray_plane(sensor.position, dir, patch.world.position, patch.normal());
  require(t > 0.0, ErrorCode::NotInView, "boresight does not reach patch '" + patch.patch->id + "'");
  return {t, to_uv(patch, sensor.position + t * dir)};
}

Polygon camera_footprint(const PatchView& patch, const SensorHead& head) {
  const Pose sensor = head.sensor_pose();
  std::vector<Vec2> corners;
  for (const auto& cam : head.cameras) {
    const double tan_h = cam.width_px * cam.pixel_pitch_m / (2.0 * cam.focal_length_m);
    const double tan_v = cam.height_px * cam.pixel_pitch_m / (2.0 * cam.focal_length_m);
    auto c = frustum_corners(patch, sensor, cam.mount, tan_h, tan_v);
    corners.insert(corners.end(), c.begin(), c.end());
  }
  return convex_hull(std::move(corners));
}

Polygon scan_footprint(const PatchView& patch, const SensorHead& head) {
  const Sighting s = sight(patch, head);
  const double hu = head.profilometer.scan_u_m / 2.0;
  const double hv = head.profilometer.scan_v_m / 2.0;
  return rectangle(s.hit_uv.x() - hu, s.hit_uv.y() - hv, s.hit_uv.x() + hu, s.hit_uv.y() + hv);
}

std::vector<ImageFeature> Image::resolvable_features() const {
  std::vector<ImageFeature> out;
  std::copy_if(features.begin(), features.end(), std::back_inserter(out),
               [](const ImageFeature& f) { return f.resolvable; });
  return out;
}

Image capture_image(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id) {
  validate(head);
  const PatchView patch = scene.view(patch_id);
  const Sighting s = sight(patch, head);
  check_range(s.standoff_m, kMinStandoff, kMaxStandoff, "camera");
  const Polygon hull = camera_footprint(patch, head);
  Image img;
  img.patch_id = std::string(patch_id);
  img.standoff_m = s.standoff_m;
  img.footprint = clip_to_rectangle(hull, patch.patch->extent_u, patch.patch->extent_v);
  require(polygon_area(img.footprint) > 0.0, ErrorCode::NotInView,
          "patch '" + img.patch_id + "' is outside every camera frustum");
  img.illumination_used = head.illumination_on;
  const bool lit = head.illumination_on || head.ambient_light;

  const Pose sensor = head.sensor_pose();
  const Vec3 boresight = sensor.rotate(Vec3::UnitZ());
  for (std::size_t i = 0; i < scene.defects().size(); ++i) {
    const Defect& d = scene.defects()[i];
    const double size = visual_size_mm(d.kind);
    if (d.patch_id != patch_id || size <= 0.0 || !point_in_convex_polygon(img.footprint, d.uv)) continue;
    // Depth along the optical axis sets the pinhole scale.
    const double depth = (patch.point(d.uv) - sensor.position).dot(boresight);
    double best_px = 0.0;
    bool resolvable = false;
    for (const auto& cam : head.cameras) {
      const double gsd = gsd_mm(cam, depth);
      best_px = std::max(best_px, size / gsd);
      resolvable = resolvable || size >= cam.min_feature_px * gsd * (1.0 - kRangeSlack);
    }
    img.features.push_back({i, size, best_px, lit && resolvable});
  }
  return img;
}

PointCloud scan_profile(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id,
                        std::uint64_t seed) {
  validate(head);
  const PatchView patch = scene.view(patch_id);
  const auto& prof = head.profilometer;
  const Sighting s = sight(patch, head);
  check_range(s.standoff_m, prof.min_range_m, prof.max_range_m, "profilometer");

  const Polygon window = scan_footprint(patch, head);
  const double u0 = std::max(0.0, window[0].x());
  const double v0 = std::max(0.0, window[0].y());
  const double u1 = std::min(patch.patch->extent_u, window[2].x());
  const double v1 = std::min(patch.patch->extent_v, window[2].y());
  require(u1 > u0 && v1 > v0, ErrorCode::NotInView, "scan window misses patch '" + std::string(patch_id) + "'");

  const double pitch = prof.sample_pitch_mm / 1000.0;
  PointCloud cloud;
  cloud.patch_id = std::string(patch_id);
  cloud.seed = seed;
  cloud.pitch_mm = prof.sample_pitch_mm;
  cloud.cols = static_cast<std::size_t>(std::floor((u1 - u0) / pitch + 1e-9)) + 1;
  cloud.rows = static_cast<std::size_t>(std::floor((v1 - v0) / pitch + 1e-9)) + 1;
  cloud.points.reserve(cloud.cols * cloud.rows);

  Rng rng(seed);
  for (std::size_t r = 0; r < cloud.rows; ++r) {
    const double v = std::min(v1, v0 + static_cast<double>(r) * pitch);
    for (std::size_t c = 0; c < cloud.cols; ++c) {
      const double u = std::min(u1, u0 + static_cast<double>(c) * pitch);
      const double h = patch.height_mm({u, v});
      cloud.points.emplace_back(u, v, rng.normal(h, prof.depth_noise_sigma_mm) / 1000.0);
    }
  }
  return cloud;
}

void write_xyz(const PointCloud& cloud, std::ostream& out) {
  char buf[96];
  for (const auto& p : cloud.points) {
    const int n = std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out.write(buf, n);
  }
}

std::optional<Vec2> thermal_pixel_uv(const PatchView& patch, const SensorHead& head, double col, double row) {
  const Pose sensor = head.sensor_pose();
  const double tan_h = std::tan(deg_to_rad(head.thermal.hfov_deg / 2.0));
  const double tan_v = tan_h * ThermalModel::kHeight / ThermalModel::kWidth;
  const double fx = col / ThermalModel::kWidth * 2.0 - 1.0;
  const double fy = row / ThermalModel::kHeight * 2.0 - 1.0;
  const Vec3 dir = sensor.rotate(Vec3(fx * tan_h, fy * tan_v, 1.0));
  const double t = intersect_ray_plane(sensor.position, dir, patch.world.position, patch.normal());
  if (t <= 0.0) return std::nullopt;
  return to_uv(patch, sensor.position + t * dir);
}

ThermalFrame capture_thermal(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id,
                             std::uint64_t seed) {
  validate(head);
  const PatchView patch = scene.view(patch_id);
  const Sighting s = sight(patch, head);
  check_range(s.standoff_m, kMinStandoff, kMaxStandoff, "thermal imager");

  const auto& model = head.thermal;
  const int n = model.subsamples;
  const double ambient = scene.ambient_temperature();

  ThermalFrame frame;
  frame.patch_id = std::string(patch_id);
  frame.values.resize(static_cast<std::size_t>(ThermalModel::kWidth * ThermalModel::kHeight));
  bool sees_patch = false;
  Rng rng(seed);
  for (int row = 0; row < ThermalModel::kHeight; ++row)
    for (int col = 0; col < ThermalModel::kWidth; ++col) {
      double sum = 0.0;
      for (int sy = 0; sy < n; ++sy)
        for (int sx = 0; sx < n; ++sx) {
          const auto uv = thermal_pixel_uv(patch, head, col + (sx + 0.5) / n, row + (sy + 0.5) / n);
          double temp = ambient;
          if (uv && patch.patch->contains(*uv)) {
            temp = patch.temperature_c(*uv);
            sees_patch = true;
          }
          sum += temp;
        }
      const double value = rng.normal(sum / (n * n), model.netd_c);
      frame.values[static_cast<std::size_t>(row * ThermalModel::kWidth + col)] =
          std::clamp(value, ThermalModel::kMinC, ThermalModel::kMaxC);
    }
  require(sees_patch, ErrorCode::NotInView, "patch '" + frame.patch_id + "' is outside the thermal field of view");
  return frame;
}

void write_csv(const ThermalFrame& frame, std::ostream& out) {
  char buf[32];
  for (int row = 0; row < ThermalModel::kHeight; ++row) {
    for (int col = 0; col < ThermalModel::kWidth; ++col) {
      if (col) out.put(',');
      const int n = std::snprintf(buf, sizeof buf, "%.4f", frame.at(col, row));
      out.write(buf, n);
    }
    out.put('\n');
  }
}

}  // namespace mim
