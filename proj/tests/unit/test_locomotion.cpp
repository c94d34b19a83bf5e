#include <random>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "expect_error.hpp"
#include "mim/locomotion.hpp"
#include "oracles.hpp"

using namespace mim;
using testing_support::fixture_row;
using testing_support::walking_assembly;

namespace {

std::vector<FixtureNode> nodes_at(const std::vector<double>& xs) {
  std::vector<FixtureNode> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({"F" + std::to_string(i), Vec3(xs[i], 0, 0)});
  return out;
}

WarehouseScene scene_of(const std::vector<FixtureNode>& nodes) {
  std::vector<FixturePoint> fixtures;
  for (const auto& n : nodes) {
    FixturePoint f;
    f.id = n.id;
    f.pose.position = n.position;
    fixtures.push_back(f);
  }
  return WarehouseScene(fixtures, {}, {}, {}, 20.0);
}

// Replays a plan on placements alone and checks every step is legal.
void expect_legal(const FixtureGraph& g, const GaitPlan& plan) {
  std::string left = plan.start_left, rear = plan.start_rear;
  for (const auto& s : plan.steps) {
    std::string& moving = s.leg == Leg::Left ? left : rear;
    const std::string& staying = s.leg == Leg::Left ? rear : left;
    ASSERT_EQ(moving, s.detach_from);
    ASSERT_NE(s.attach_to, staying);
    ASSERT_NE(s.attach_to, s.detach_from);
    ASSERT_FALSE(g.is_occupied(s.attach_to));
    ASSERT_TRUE(g.within_reach(g.index_of(staying), g.index_of(s.attach_to)));
    moving = s.attach_to;
  }
  EXPECT_TRUE(left == plan.goal || rear == plan.goal);
}

}  // namespace

TEST(Reachable, IsolatedFixtureHasNoNeighbors) {
  const FixtureGraph g(nodes_at({0.0, 2.0}), 1.5);
  EXPECT_TRUE(reachable_fixtures(g, "F0").empty());
}

TEST(Reachable, ChainReachesBothNeighbors) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5);
  EXPECT_EQ(reachable_fixtures(g, "F1"), (std::vector<std::string>{"F0", "F2"}));
}

TEST(Reachable, AnchorExcludedAndBoundaryIncluded) {
  const FixtureGraph g(nodes_at({0.0, 1.5}), 1.5);
  EXPECT_EQ(reachable_fixtures(g, "F0"), (std::vector<std::string>{"F1"}));
}

TEST(Reachable, OccupiedFixtureExcluded) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5, {"F2"});
  EXPECT_EQ(reachable_fixtures(g, "F1"), (std::vector<std::string>{"F0"}));
}

TEST(Reachable, UnknownFixture) {
  const FixtureGraph g(nodes_at({0.0, 1.0}), 1.5);
  EXPECT_MIM_ERROR(reachable_fixtures(g, "F9"), ErrorCode::UnknownFixture);
}

TEST(PlanWalk, GoalUnderLeftLegIsEmpty) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5);
  EXPECT_TRUE(plan_walk(g, "F0", "F1", "F0").steps.empty());
}

TEST(PlanWalk, ThreeCollinearFixturesOneStep) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5);
  const GaitPlan plan = plan_walk(g, "F0", "F1", "F2");
  ASSERT_EQ(plan.steps.size(), 1u);
  EXPECT_EQ(plan.steps[0], (GaitStep{Leg::Left, "F0", "F2"}));
  EXPECT_EQ(static_cast<int>(plan.steps.size()), oracle::shortest_gait({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)},
                                                                       1.5, {false, false, false}, 0, 1, 2));
}

TEST(PlanWalk, GapWiderThanReachIsNoPath) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 3.0}), 1.5);
  EXPECT_MIM_ERROR(plan_walk(g, "F0", "F1", "F2"), ErrorCode::NoPath);
}

TEST(PlanWalk, InvalidStarts) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 3.0}), 1.5);
  EXPECT_MIM_ERROR(plan_walk(g, "F0", "F0", "F1"), ErrorCode::InvalidStart);
  EXPECT_MIM_ERROR(plan_walk(g, "F1", "F2", "F0"), ErrorCode::InvalidStart);
  EXPECT_MIM_ERROR(plan_walk(g, "F7", "F1", "F0"), ErrorCode::InvalidStart);
  EXPECT_MIM_ERROR(plan_walk(g, "F0", "F1", "F9"), ErrorCode::UnknownFixture);
}

TEST(PlanWalk, OccupiedGoalIsNoPath) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5, {"F2"});
  EXPECT_MIM_ERROR(plan_walk(g, "F0", "F1", "F2"), ErrorCode::NoPath);
}

TEST(PlanWalk, LongRailAlternatesLegs) {
  const FixtureGraph g(nodes_at({0, 1, 2, 3, 4, 5}), 1.5);
  const GaitPlan plan = plan_walk(g, "F0", "F1", "F5");
  expect_legal(g, plan);
  for (std::size_t i = 1; i < plan.steps.size(); ++i) EXPECT_NE(plan.steps[i].leg, plan.steps[i - 1].leg);
}

TEST(PlanWalk, FormatsOneStepPerLine) {
  const FixtureGraph g(nodes_at({0.0, 1.0, 2.0}), 1.5);
  EXPECT_EQ(format_plan(plan_walk(g, "F0", "F1", "F2")), "step 1: left F0 -> F2\n");
}

TEST(PlanWalk, OptimalAndLegalOnRandomLayouts) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> coord(0.0, 3.0);
  for (int run = 0; run < 60; ++run) {
    const int n = 2 + run % 7;
    std::vector<FixtureNode> nodes;
    std::vector<Vec3> pos;
    for (int i = 0; i < n; ++i) {
      pos.emplace_back(coord(gen), coord(gen), 0.0);
      nodes.push_back({"F" + std::to_string(i), pos.back()});
    }
    const FixtureGraph g(nodes, 1.5);
    const std::vector<bool> blocked(n, false);
    for (int l = 0; l < n; ++l)
      for (int r = 0; r < n; ++r) {
        if (l == r || (pos[l] - pos[r]).norm() > 1.5) continue;
        for (int goal = 0; goal < n; ++goal) {
          const int best = oracle::shortest_gait(pos, 1.5, blocked, l, r, goal);
          const auto id = [](int i) { return "F" + std::to_string(i); };
          if (best < 0) {
            EXPECT_MIM_ERROR(plan_walk(g, id(l), id(r), id(goal)), ErrorCode::NoPath);
            continue;
          }
          const GaitPlan plan = plan_walk(g, id(l), id(r), id(goal));
          EXPECT_EQ(static_cast<int>(plan.steps.size()), best);
          expect_legal(g, plan);
        }
      }
  }
}

TEST(PlanWalk, Deterministic) {
  const FixtureGraph g(nodes_at({0, 0.8, 1.6, 2.4, 3.2}), 1.7);
  const GaitPlan a = plan_walk(g, "F0", "F1", "F4");
  const GaitPlan b = plan_walk(g, "F0", "F1", "F4");
  EXPECT_EQ(a.steps, b.steps);
}

TEST(ExecuteStep, LegalStepMovesAnchor) {
  const auto nodes = nodes_at({0.0, 1.0, 2.0});
  const auto scene = scene_of(nodes);
  const auto g = execute_step(walking_assembly("F0", "F1"), scene, {Leg::Left, "F0", "F2"});
  std::vector<std::string> fixtures;
  for (const auto& a : g.anchors()) {
    fixtures.push_back(a.fixture);
    EXPECT_EQ(a.state, CouplingState::FullCoupled);
  }
  std::sort(fixtures.begin(), fixtures.end());
  EXPECT_EQ(fixtures, (std::vector<std::string>{"F1", "F2"}));
  EXPECT_EQ(g.port("wm1:b").fixture, "F2");
  EXPECT_EQ(g.port("wm2:b").fixture, "F1");
}

TEST(ExecuteStep, OccupiedTargetIsIllegal) {
  auto fixtures = fixture_row(3, 1.0);
  fixtures[2].occupant = "other:si";
  const WarehouseScene scene(fixtures, {}, {}, {}, 20.0);
  EXPECT_MIM_ERROR(execute_step(walking_assembly("F0", "F1"), scene, {Leg::Left, "F0", "F2"}), ErrorCode::IllegalStep);
}

TEST(ExecuteStep, DetachingOnlyAnchorWouldDetach) {
  const WarehouseScene scene(fixture_row(3, 1.0), {}, {}, {}, 20.0);
  EXPECT_MIM_ERROR(execute_step(walking_assembly("F0", ""), scene, {Leg::Left, "F0", "F1"}),
                   ErrorCode::WouldDetachAssembly);
}

TEST(ExecuteStep, WrongDetachFixtureIsIllegal) {
  const WarehouseScene scene(fixture_row(3, 1.0), {}, {}, {}, 20.0);
  EXPECT_MIM_ERROR(execute_step(walking_assembly("F0", "F1"), scene, {Leg::Left, "F1", "F2"}), ErrorCode::IllegalStep);
}

TEST(ExecuteStep, ReplayKeepsAnAnchorThroughout) {
  const auto nodes = nodes_at({0, 1, 2, 3, 4, 5, 6});
  const auto scene = scene_of(nodes);
  AssemblyGraph g = walking_assembly("F0", "F1");
  const GaitPlan plan = plan_walk(FixtureGraph::from_scene(scene, 1.5, &g), "F0", "F1", "F6");
  for (const auto& step : plan.steps) {
    g = execute_step(g, scene, step);
    EXPECT_FALSE(g.anchors().empty());
    EXPECT_EQ(validate_configuration(g), Configuration::Walking);
  }
  EXPECT_TRUE(g.port_at_fixture("F6").has_value());
}

TEST(FixtureGraphFromScene, ForeignOccupantsBlockButOwnFeetDoNot) {
  auto fixtures = fixture_row(4, 1.0);
  fixtures[3].occupant = "other:si";
  const WarehouseScene scene(fixtures, {}, {}, {}, 20.0);
  const auto g = walking_assembly("F0", "F1");
  const FixtureGraph graph = FixtureGraph::from_scene(scene, 1.5, &g);
  EXPECT_FALSE(graph.is_occupied("F0"));
  EXPECT_FALSE(graph.is_occupied("F1"));
  EXPECT_TRUE(graph.is_occupied("F3"));
}
