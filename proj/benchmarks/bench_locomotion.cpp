#include <benchmark/benchmark.h>
#include <cmath>

#include <random>

#include "mim/locomotion.hpp"

namespace {

// Square lattice of fixtures with 1 m spacing, walking corner to corner.
void BM_PlanWalkLattice(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::vector<mim::FixtureNode> nodes;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) nodes.push_back({"F" + std::to_string(i * side + j), mim::Vec3(i, j, 0)});
  const mim::FixtureGraph graph(nodes, mim::kDefaultReach);
  const std::string goal = "F" + std::to_string(side * side - 1);
  for (auto _ : state) benchmark::DoNotOptimize(mim::plan_walk(graph, "F0", "F1", goal));
  state.counters["fixtures"] = side * side;
}
BENCHMARK(BM_PlanWalkLattice)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_PlanWalkRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> coord(0.0, std::sqrt(static_cast<double>(n)));
  std::vector<mim::FixtureNode> nodes = {{"F0", mim::Vec3(0, 0, 0)}, {"F1", mim::Vec3(1, 0, 0)}};
  for (int i = 2; i < n; ++i) nodes.push_back({"F" + std::to_string(i), mim::Vec3(coord(gen), coord(gen), 0)});
  const mim::FixtureGraph graph(nodes, mim::kDefaultReach);
  const std::string goal = "F" + std::to_string(n - 1);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(mim::plan_walk(graph, "F0", "F1", goal));
    } catch (const std::exception&) {
    }
  }
}
BENCHMARK(BM_PlanWalkRandom)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
