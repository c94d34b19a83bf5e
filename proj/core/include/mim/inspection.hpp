#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mim/geometry.hpp"
#include "mim/scene.hpp"
#include "mim/sensors.hpp"

namespace mim {

struct CoveredPatch {
  std::string patch_id;
  Polygon footprint;  // patch uv, clipped to the patch
};

struct Viewpoint {
  Pose pose;  // sensor head base pose, tilt 0
  double standoff_m = 0.0;
  std::vector<CoveredPatch> covers;
};

struct InspectionPlan {
  std::vector<Viewpoint> viewpoints;
  double coverage_fraction = 0.0;
  double reachable_area_m2 = 0.0;
  std::vector<std::string> inspected_patches;
  /// Excluded from the coverage denominator, reported on their own.
  std::vector<std::string> unreachable_patches;
};

struct StandoffRange {
  double min_m = kMinStandoff;
  double max_m = kMaxStandoff;
};

struct PlannerParams {
  /// Candidate standoffs, tried in order. Values outside the allowed range
  /// are dropped; if none survive the first is clamped into the range.
  std::vector<double> standoffs_m = {0.5};
  /// Coverage is accounted on an n x n grid of cell centers per patch.
  int coverage_cells = 128;
};

/// Greedy set cover of the reachable patches with profilometer windows.
/// Errors: NoReachableSurface, InvalidArgument (empty or disjoint range).
InspectionPlan plan_viewpoints(const WarehouseScene& scene, std::span<const std::string> patch_ids,
                               const SensorHead& head, StandoffRange range = {}, const PlannerParams& params = {});
InspectionPlan plan_viewpoints(const WarehouseScene& scene, const Oru& oru, const SensorHead& head,
                               StandoffRange range = {}, const PlannerParams& params = {});

/// Covered fraction of the reachable area of `patch_ids` (0 when nothing is reachable).
double coverage(const InspectionPlan& plan, const WarehouseScene& scene, std::span<const std::string> patch_ids,
                int cells = 128);
double coverage(const InspectionPlan& plan, const Oru& oru, int cells = 128);

enum class DefectClass { Scratch, Impact };
std::string_view to_string(DefectClass c);

struct DetectorParams {
  double sigma_factor = 3.0;
  double min_threshold_mm = 0.15;
  /// Multiplies the detection threshold; > 1 desensitizes the detector.
  double threshold_scale = 1.0;
  std::size_t min_cluster_samples = 2;
  /// Region growing floor, as a fraction of the detection threshold.
  double grow_fraction = 1.0 / 3.0;
  double elongation_ratio = 3.0;
};

struct DetectedDefect {
  std::string patch_id;
  Vec2 centroid_uv = Vec2::Zero();
  DefectClass kind_guess = DefectClass::Impact;
  /// Diameter for impacts, length for scratches (= major extent).
  double size_mm = 0.0;
  double major_extent_mm = 0.0;
  double minor_extent_mm = 0.0;
  double elongation = 1.0;
  double peak_residual_mm = 0.0;  // signed, negative for depressions
  std::size_t samples = 0;

  double depth_mm() const { return -peak_residual_mm; }
};

struct SurfaceAnalysis {
  double plane_a = 0.0;  // z = a x + b y + c (meters)
  double plane_b = 0.0;
  double plane_c = 0.0;
  double sigma_est_mm = 0.0;
  double threshold_mm = 0.0;
  double grow_threshold_mm = 0.0;
  std::vector<double> residuals_mm;  // row-major, same layout as the cloud
  std::vector<DetectedDefect> defects;
};

/// Plane fit, robust noise estimate, thresholding, 8-connected clustering.
/// Errors: EmptyCloud, InvalidArgument (points do not match the grid shape).
SurfaceAnalysis analyze_surface(const PointCloud& cloud, const DetectorParams& params = {});
std::vector<DetectedDefect> detect_surface_defects(const PointCloud& cloud, const DetectorParams& params = {});

/// Scratch iff elongation >= ratio (inclusive).
DefectClass classify_defect(const DetectedDefect& d, double elongation_ratio = 3.0);

enum class ThermalClass { Hot, Cold };
std::string_view to_string(ThermalClass c);

struct ThermalAnomaly {
  std::string patch_id;
  std::vector<std::pair<int, int>> pixels;  // (col, row)
  double mean_delta_c = 0.0;
  double peak_delta_c = 0.0;
  ThermalClass classification = ThermalClass::Hot;
};

inline constexpr double kDefaultThermalThreshold = 5.0;

/// 8-connected same-sign clusters of |value - expected| > threshold.
std::vector<ThermalAnomaly> detect_thermal_anomalies(const ThermalFrame& frame, double expected_c,
                                                     double threshold_c = kDefaultThermalThreshold);

}  // namespace mim
