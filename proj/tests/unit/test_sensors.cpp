#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "expect_error.hpp"
#include "mim/random.hpp"
#include "mim/sensors.hpp"
#include "oracles.hpp"

using namespace mim;
using testing_support::coupon_scene;
using testing_support::head_over;
using testing_support::head_over_center;

namespace {

Defect crater_at(const std::string& patch, Vec2 uv, double dia = 0.6, double depth = 0.2) {
  return Defect{ImpactCrater{dia, depth}, patch, uv};
}

// A small profilometer window keeps the clouds a few thousand points.
SensorHead small_window(SensorHead head, double window_m = 0.005) {
  head.profilometer.scan_u_m = window_m;
  head.profilometer.scan_v_m = window_m;
  return head;
}

double max_pixel(const ThermalFrame& f) { return *std::max_element(f.values.begin(), f.values.end()); }
double min_pixel(const ThermalFrame& f) { return *std::min_element(f.values.begin(), f.values.end()); }

}  // namespace

TEST(Gsd, DefaultCameraAtTwoMeters) {
  EXPECT_NEAR(gsd_mm(CameraModel{}, 2.0), 2.0 * 1.2e-6 / 8e-3 * 1000.0, 1e-12);
  EXPECT_NEAR(gsd_mm(CameraModel{}, 2.0), 0.3, 1e-12);
}

TEST(Gsd, DefaultCameraAtMinimumRange) { EXPECT_NEAR(gsd_mm(CameraModel{}, 0.2), 0.03, 1e-12); }

TEST(Gsd, NonPositiveDistance) {
  EXPECT_MIM_ERROR(gsd_mm(CameraModel{}, 0.0), ErrorCode::NonPositiveDistance);
  EXPECT_MIM_ERROR(gsd_mm(CameraModel{}, -1.0), ErrorCode::NonPositiveDistance);
}

TEST(Gsd, LinearInDistance) {
  for (double d : {0.2, 0.37, 0.5, 1.0, 1.3}) EXPECT_EQ(gsd_mm(CameraModel{}, 2 * d), 2 * gsd_mm(CameraModel{}, d));
}

TEST(Gsd, MinimumFeatureAtMaxRangeIsRequirement) {
  const CameraModel cam;
  EXPECT_NEAR(cam.min_feature_px * gsd_mm(cam, 2.0), 0.6, 1e-12);
}

TEST(CaptureImage, CraterResolvableAtTwoMeters) {
  const auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}));
  const Image img = capture_image(scene, head_over_center(scene, "coupon", 2.0), "coupon");
  ASSERT_EQ(img.features.size(), 1u);
  EXPECT_TRUE(img.features[0].resolvable);
  EXPECT_TRUE(img.illumination_used);
  EXPECT_NEAR(img.standoff_m, 2.0, 1e-9);
}

TEST(CaptureImage, IlluminationOffListsButDoesNotResolve) {
  const auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}));
  auto head = head_over_center(scene, "coupon", 2.0);
  head.illumination_on = false;
  const Image img = capture_image(scene, head, "coupon");
  ASSERT_EQ(img.features.size(), 1u);
  EXPECT_FALSE(img.features[0].resolvable);
  EXPECT_TRUE(img.resolvable_features().empty());
  head.ambient_light = true;
  EXPECT_TRUE(capture_image(scene, head, "coupon").features[0].resolvable);
}

TEST(CaptureImage, OutsideRangeIsRejected) {
  const auto scene = coupon_scene(0.05);
  EXPECT_MIM_ERROR(capture_image(scene, head_over_center(scene, "coupon", 2.5), "coupon"), ErrorCode::OutOfRange);
  EXPECT_MIM_ERROR(capture_image(scene, head_over_center(scene, "coupon", 2.01), "coupon"), ErrorCode::OutOfRange);
  EXPECT_MIM_ERROR(capture_image(scene, head_over_center(scene, "coupon", 0.19), "coupon"), ErrorCode::OutOfRange);
}

TEST(CaptureImage, FacingAwayIsNotInView) {
  const auto scene = coupon_scene(0.05);
  auto head = head_over_center(scene, "coupon", 1.0);
  head.tilt_deg = 180.0;
  EXPECT_ANY_THROW(capture_image(scene, head, "coupon"));
}

TEST(CaptureImage, ResolvabilityIsMonotone) {
  for (double d : {0.3, 0.8, 1.5, 2.0})
    for (double size : {0.1, 0.2, 0.4, 0.6, 1.0}) {
      const auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}, size, 0.1));
      if (!capture_image(scene, head_over_center(scene, "coupon", d), "coupon").features.at(0).resolvable) continue;
      for (double d2 : {0.2, std::max(0.2, d / 2), d})
        for (double s2 : {size, size * 1.5, size * 3}) {
          const auto s = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}, s2, 0.1));
          EXPECT_TRUE(capture_image(s, head_over_center(s, "coupon", d2), "coupon").features.at(0).resolvable)
              << "size " << s2 << " at " << d2;
        }
    }
}

TEST(ScanProfile, NoiselessFlatPatchIsZero) {
  const auto scene = coupon_scene(0.05);
  auto head = small_window(head_over_center(scene, "coupon", 1.0));
  head.profilometer.depth_noise_sigma_mm = 0.0;
  const PointCloud cloud = scan_profile(scene, head, "coupon", 3);
  ASSERT_EQ(cloud.points.size(), cloud.cols * cloud.rows);
  EXPECT_EQ(cloud.cols, 51u);
  EXPECT_EQ(cloud.rows, 51u);
  for (const auto& p : cloud.points) EXPECT_EQ(p.z(), 0.0);
}

TEST(ScanProfile, SameSeedSameCloud) {
  const auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}));
  const auto head = small_window(head_over_center(scene, "coupon", 1.0));
  const PointCloud a = scan_profile(scene, head, "coupon", 77);
  const PointCloud b = scan_profile(scene, head, "coupon", 77);
  EXPECT_EQ(a.points, b.points);
  const PointCloud c = scan_profile(scene, head, "coupon", 78);
  EXPECT_NE(a.points, c.points);
}

TEST(ScanProfile, NoisyCraterMinimumWithinThreeSigma) {
  const auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}));
  const auto head = small_window(head_over_center(scene, "coupon", 2.0));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PointCloud cloud = scan_profile(scene, head, "coupon", seed);
    double min_z = 0.0;
    for (const auto& p : cloud.points) min_z = std::min(min_z, p.z() * 1000.0);
    EXPECT_GE(min_z, -0.26);
    EXPECT_LE(min_z, -0.14);
  }
}

TEST(ScanProfile, NoiselessMatchesSurfaceHeight) {
  auto scene = coupon_scene(0.05).with_defect(crater_at("coupon", {0.025, 0.025}, 1.2, 0.3));
  scene = scene.with_defect(Defect{Scratch{0.3, 0.2, 3.0, 0.4}, "coupon", {0.0245, 0.026}});
  auto head = small_window(head_over_center(scene, "coupon", 0.6));
  head.profilometer.depth_noise_sigma_mm = 0.0;
  const PointCloud cloud = scan_profile(scene, head, "coupon", 5);
  double deepest = 0.0;
  for (const auto& p : cloud.points) {
    const double expected = surface_height(scene, "coupon", {p.x(), p.y()});
    EXPECT_NEAR(p.z() * 1000.0, expected, 1e-12);
    deepest = std::min(deepest, p.z() * 1000.0);
  }
  EXPECT_LT(deepest, -0.29);
}

TEST(ScanProfile, RangeLimits) {
  const auto scene = coupon_scene(0.05);
  EXPECT_MIM_ERROR(scan_profile(scene, small_window(head_over_center(scene, "coupon", 0.19)), "coupon", 1),
                   ErrorCode::OutOfRange);
  EXPECT_MIM_ERROR(scan_profile(scene, small_window(head_over_center(scene, "coupon", 2.01)), "coupon", 1),
                   ErrorCode::OutOfRange);
  EXPECT_NO_THROW(scan_profile(scene, small_window(head_over_center(scene, "coupon", 0.2)), "coupon", 1));
}

TEST(ScanProfile, WindowOffThePatchIsNotInView) {
  const auto scene = coupon_scene(0.05);
  const auto head = small_window(head_over(scene, "coupon", {0.5, 0.5}, 1.0));
  EXPECT_MIM_ERROR(scan_profile(scene, head, "coupon", 1), ErrorCode::NotInView);
}

TEST(ScanProfile, XyzExportFormat) {
  PointCloud cloud;
  cloud.points = {Vec3(0.001, 0.5, -0.0002), Vec3(1.0 / 3.0, 0, 0)};
  std::ostringstream out;
  write_xyz(cloud, out);
  EXPECT_EQ(out.str(), "0.001 0.5 -0.0002\n0.333333333 0 0\n");
}

TEST(CaptureThermal, UniformPatchNoiseless) {
  const auto scene = coupon_scene(1.0, 20.0);
  auto head = head_over_center(scene, "coupon", 0.5);
  head.thermal.netd_c = 0.0;
  const ThermalFrame f = capture_thermal(scene, head, "coupon", 9);
  ASSERT_EQ(f.values.size(), static_cast<std::size_t>(ThermalModel::kWidth * ThermalModel::kHeight));
  for (double v : f.values) EXPECT_DOUBLE_EQ(v, 20.0);
}

TEST(CaptureThermal, HotspotAtUpperBound) {
  const auto scene = coupon_scene(1.0, 20.0).with_defect(Defect{ThermalHotspot{130.0, 500.0}, "coupon", {0.5, 0.5}});
  const auto head = head_over_center(scene, "coupon", 0.2);
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    EXPECT_GE(max_pixel(capture_thermal(scene, head, "coupon", seed)), 150.0 - 3 * head.thermal.netd_c);
}

TEST(CaptureThermal, ClampsAtRangeEnds) {
  const auto hot = coupon_scene(1.0, 20.0).with_defect(Defect{ThermalHotspot{180.0, 500.0}, "coupon", {0.5, 0.5}});
  const auto cold = coupon_scene(1.0, 20.0).with_defect(Defect{ThermalHotspot{-100.0, 500.0}, "coupon", {0.5, 0.5}});
  const auto head = head_over_center(hot, "coupon", 0.2);
  const ThermalFrame fh = capture_thermal(hot, head, "coupon", 1);
  const ThermalFrame fc = capture_thermal(cold, head, "coupon", 1);
  EXPECT_EQ(max_pixel(fh), ThermalModel::kMaxC);
  EXPECT_EQ(min_pixel(fc), ThermalModel::kMinC);
  EXPECT_LE(max_pixel(fc), ThermalModel::kMaxC);
  EXPECT_GE(min_pixel(fh), ThermalModel::kMinC);
}

TEST(CaptureThermal, ValuesStayInRangeForRandomScenes) {
  Rng gen(4);
  for (int i = 0; i < 20; ++i) {
    const double base = gen.uniform(-100.0, 250.0);
    auto scene = coupon_scene(1.0, base);
    scene = scene.with_defect(Defect{ThermalHotspot{gen.uniform(-300.0, 300.0), gen.uniform(10.0, 600.0)}, "coupon",
                                     {gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0)}});
    auto head = head_over_center(scene, "coupon", gen.uniform(0.2, 2.0));
    head.thermal.netd_c = gen.uniform(0.0, 5.0);
    for (double v : capture_thermal(scene, head, "coupon", static_cast<std::uint64_t>(i)).values) {
      EXPECT_GE(v, ThermalModel::kMinC);
      EXPECT_LE(v, ThermalModel::kMaxC);
    }
  }
}

TEST(CaptureThermal, SameSeedSameFrame) {
  const auto scene = coupon_scene(1.0, 20.0);
  const auto head = head_over_center(scene, "coupon", 0.5);
  EXPECT_EQ(capture_thermal(scene, head, "coupon", 5).values, capture_thermal(scene, head, "coupon", 5).values);
}

TEST(CaptureThermal, PixelCenterRaysHitUnderTheBoresight) {
  const auto scene = coupon_scene(1.0, 20.0);
  const auto head = head_over_center(scene, "coupon", 0.5);
  const auto uv = thermal_pixel_uv(scene.view("coupon"), head, ThermalModel::kWidth / 2.0, ThermalModel::kHeight / 2.0);
  ASSERT_TRUE(uv.has_value());
  EXPECT_NEAR(uv->x(), 0.5, 1e-9);
  EXPECT_NEAR(uv->y(), 0.5, 1e-9);
}

TEST(CaptureThermal, CsvExportShape) {
  const auto scene = coupon_scene(1.0, 20.0);
  auto head = head_over_center(scene, "coupon", 0.5);
  head.thermal.netd_c = 0.0;
  std::ostringstream out;
  write_csv(capture_thermal(scene, head, "coupon", 1), out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), ThermalModel::kHeight);
  EXPECT_EQ(text.substr(0, 8), "20.0000,");
}
