#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mim/geometry.hpp"
#include "mim/scene.hpp"

namespace mim {

/// Inspection standoff limits shared by every sensor of the head (m).
inline constexpr double kMinStandoff = 0.2;
inline constexpr double kMaxStandoff = 2.0;

struct CameraModel {
  double focal_length_m = 8e-3;
  double pixel_pitch_m = 1.2e-6;
  int width_px = 4608;
  int height_px = 2592;
  /// Optical center in the sensor-head frame (m).
  Vec3 mount = Vec3::Zero();
  /// Smallest resolvable feature, in pixels.
  double min_feature_px = 2.0;

  double hfov_deg() const;
  double vfov_deg() const;
};

struct ProfilometerModel {
  double sample_pitch_mm = 0.1;
  double depth_noise_sigma_mm = 0.02;
  /// Scanned window on the target, centered on the boresight (m).
  double scan_u_m = 0.1;
  double scan_v_m = 0.1;
  double min_range_m = kMinStandoff;
  double max_range_m = kMaxStandoff;
};

struct ThermalModel {
  static constexpr int kWidth = 80;
  static constexpr int kHeight = 62;
  static constexpr double kMinC = -40.0;
  static constexpr double kMaxC = 150.0;
  double netd_c = 0.5;
  double hfov_deg = 45.0;
  /// Per-pixel supersampling (n x n) used to average the footprint.
  int subsamples = 4;

  double vfov_deg() const;
};

/// Tilting sensor enclosure. The sensor frame is the base frame rotated by
/// `tilt_deg` about its x axis; the boresight is the sensor +z axis.
struct SensorHead {
  Pose base_pose;
  double tilt_deg = 0.0;
  bool illumination_on = true;
  /// Scene lit by an external source; lets images resolve features with
  /// the ring light off.
  bool ambient_light = false;
  std::array<CameraModel, 4> cameras;
  ProfilometerModel profilometer;
  ThermalModel thermal;

  Pose sensor_pose() const;
  Vec3 boresight() const { return sensor_pose().rotate(Vec3::UnitZ()); }
};

/// Four identical cameras on the corners of the front panel.
SensorHead default_sensor_head(const Pose& base = {});
/// Throws InvalidArgument.
void validate(const SensorHead& head);

/// Head pose looking straight down the patch normal from `standoff_m`,
/// sensor x aligned with the patch u axis.
Pose pose_facing(const PatchView& patch, const Vec2& uv, double standoff_m);

/// Ground sample distance (mm/px). Errors: NonPositiveDistance.
double gsd_mm(const CameraModel& camera, double distance_m);

/// Where the boresight meets a patch plane.
struct Sighting {
  double standoff_m = 0.0;
  Vec2 hit_uv = Vec2::Zero();
};
/// Errors: NotInView when the boresight never reaches the patch plane.
Sighting sight(const PatchView& patch, const SensorHead& head);

/// Footprint of the whole camera array on the patch plane (patch uv, unclipped).
Polygon camera_footprint(const PatchView& patch, const SensorHead& head);
/// Profilometer window on the patch plane (patch uv, unclipped, axis aligned).
Polygon scan_footprint(const PatchView& patch, const SensorHead& head);

struct ImageFeature {
  std::size_t defect_index = 0;  // index into scene.defects()
  double size_mm = 0.0;
  double apparent_size_px = 0.0;
  bool resolvable = false;
};

struct Image {
  std::string patch_id;
  double standoff_m = 0.0;
  Polygon footprint;  // clipped to the patch
  bool illumination_used = false;
  std::vector<ImageFeature> features;  // every visual defect inside the footprint

  std::vector<ImageFeature> resolvable_features() const;
};

/// Errors: UnknownPatch, OutOfRange, NotInView.
Image capture_image(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id);

/// Height samples on a regular grid. Coordinates are meters in the patch
/// frame (x along u, y along v, z along the outward normal), row-major with
/// `cols` samples per row.
struct PointCloud {
  std::string patch_id;
  std::uint64_t seed = 0;
  double pitch_mm = 0.0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<Vec3> points;
};

/// Errors: UnknownPatch, OutOfRange, NotInView.
PointCloud scan_profile(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id,
                        std::uint64_t seed);

/// ASCII XYZ, one `x y z` triple per line, 9 significant digits.
void write_xyz(const PointCloud& cloud, std::ostream& out);

struct ThermalFrame {
  std::string patch_id;
  std::vector<double> values;  // kHeight rows of kWidth values, °C

  double at(int col, int row) const { return values[static_cast<std::size_t>(row * ThermalModel::kWidth + col)]; }
};

/// Patch uv hit by the ray through fractional pixel coordinates (col, row),
/// pixel centers at +0.5; nullopt when the ray misses the patch plane.
std::optional<Vec2> thermal_pixel_uv(const PatchView& patch, const SensorHead& head, double col, double row);

/// Errors: UnknownPatch, OutOfRange, NotInView.
ThermalFrame capture_thermal(const WarehouseScene& scene, const SensorHead& head, std::string_view patch_id,
                             std::uint64_t seed);

/// One CSV row per sensor row, values with 4 decimals.
void write_csv(const ThermalFrame& frame, std::ostream& out);

}  // namespace mim
