#include <benchmark/benchmark.h>

#include "mim/verification.hpp"

namespace {

void BM_ClopperPearson(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  int k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mim::clopper_pearson_lower(k, n, 0.05));
    k = (k + 1) % (n + 1);
  }
}
BENCHMARK(BM_ClopperPearson)->Arg(29)->Arg(200)->Arg(2000);

void BM_PodCampaign(benchmark::State& state) {
  mim::SurfacePatch p;
  p.id = "coupon";
  p.extent_u = 0.05;
  p.extent_v = 0.05;
  const mim::WarehouseScene scene({}, {}, {p}, {}, 20.0);
  const auto head = mim::default_sensor_head(mim::pose_facing(scene.view("coupon"), {0.025, 0.025}, 2.0));
  mim::PodSpec spec;
  spec.patch_id = "coupon";
  spec.n_trials = 29;
  spec.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mim::run_pod_campaign(scene, head, spec));
}
BENCHMARK(BM_PodCampaign)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
