#include <benchmark/benchmark.h>
#include <cmath>

#include "mim/inspection.hpp"
#include "mim/sensors.hpp"

namespace {

mim::WarehouseScene coupon(double size_m) {
  mim::SurfacePatch p;
  p.id = "coupon";
  p.extent_u = size_m;
  p.extent_v = size_m;
  return mim::WarehouseScene({}, {}, {p}, {mim::Defect{mim::ImpactCrater{0.6, 0.2}, "coupon", {size_m / 2, size_m / 2}}},
                             20.0);
}

mim::SensorHead head_for(const mim::WarehouseScene& scene, double window_m) {
  const auto& p = scene.patch("coupon");
  auto head = mim::default_sensor_head(mim::pose_facing(scene.view("coupon"), {p.extent_u / 2, p.extent_v / 2}, 2.0));
  head.profilometer.scan_u_m = window_m;
  head.profilometer.scan_v_m = window_m;
  return head;
}

// Window side in millimeters.
void BM_ScanProfile(benchmark::State& state) {
  const double window = state.range(0) / 1000.0;
  const auto scene = coupon(0.1);
  const auto head = head_for(scene, window);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mim::scan_profile(scene, head, "coupon", seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(std::pow(window / 1e-4 + 1, 2)));
}
BENCHMARK(BM_ScanProfile)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_DetectSurfaceDefects(benchmark::State& state) {
  const double window = state.range(0) / 1000.0;
  const auto scene = coupon(0.1);
  const auto cloud = mim::scan_profile(scene, head_for(scene, window), "coupon", 1);
  for (auto _ : state) benchmark::DoNotOptimize(mim::detect_surface_defects(cloud));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cloud.points.size()));
}
BENCHMARK(BM_DetectSurfaceDefects)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CaptureThermal(benchmark::State& state) {
  const auto scene = coupon(1.0);
  const auto head = head_for(scene, 0.1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mim::capture_thermal(scene, head, "coupon", seed++));
}
BENCHMARK(BM_CaptureThermal)->Unit(benchmark::kMillisecond);

}  // namespace
