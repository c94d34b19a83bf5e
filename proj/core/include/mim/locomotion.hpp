#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mim/geometry.hpp"
#include "mim/interconnect.hpp"
#include "mim/scene.hpp"

namespace mim {

enum class Leg { Left, Rear };
std::string_view to_string(Leg leg);

/// Free-leg reach: how far a detached leg may land from the anchored one.
inline constexpr double kDefaultReach = 1.5;

struct FixtureNode {
  std::string id;
  Vec3 position = Vec3::Zero();
};

class FixtureGraph {
 public:
  /// Throws InvalidArgument for reach <= 0 or duplicate ids.
  FixtureGraph(std::vector<FixtureNode> nodes, double reach_m, std::set<std::string> occupied = {});

  /// Nodes from the scene fixtures. Fixtures held by foreign ports are
  /// obstacles. When `walker` is given, its anchors count as obstacles too,
  /// except those of its two legs (the walker's own footing).
  static FixtureGraph from_scene(const WarehouseScene& scene, double reach_m = kDefaultReach,
                                 const AssemblyGraph* walker = nullptr);

  const std::vector<FixtureNode>& nodes() const { return nodes_; }
  double reach_m() const { return reach_m_; }
  bool contains(std::string_view id) const;
  bool is_occupied(std::string_view id) const { return occupied_.contains(std::string(id)); }
  /// Throws UnknownFixture.
  std::size_t index_of(std::string_view id) const;
  double distance(std::size_t a, std::size_t b) const { return (nodes_[a].position - nodes_[b].position).norm(); }
  bool within_reach(std::size_t a, std::size_t b) const { return distance(a, b) <= reach_m_; }

 private:
  std::vector<FixtureNode> nodes_;
  double reach_m_;
  std::set<std::string> occupied_;
};

/// Unoccupied fixtures other than `anchored_fixture` within reach, sorted by id.
/// Errors: UnknownFixture.
std::vector<std::string> reachable_fixtures(const FixtureGraph& graph, std::string_view anchored_fixture);

struct GaitStep {
  Leg leg = Leg::Left;
  std::string detach_from;
  std::string attach_to;

  friend bool operator==(const GaitStep&, const GaitStep&) = default;
};

struct GaitPlan {
  std::vector<GaitStep> steps;
  std::string start_left;
  std::string start_rear;
  std::string goal;
};

/// Minimum-step plan over (left, rear) leg placements. Among shortest plans
/// each step prefers the leg that did not move last, then the left leg, then
/// the smallest fixture id. Errors: UnknownFixture (goal), InvalidStart, NoPath.
GaitPlan plan_walk(const FixtureGraph& graph, std::string_view start_left, std::string_view start_rear,
                   std::string_view goal);

/// `step <n>: <leg> <from> -> <to>` per line, n counted from 1.
std::string format_plan(const GaitPlan& plan);

struct WalkingLegs {
  std::string left_arm;
  std::string rear_arm;
  std::string left_foot;  // far-end port of each leg
  std::string rear_foot;
};

/// Leg arms and feet of the MIM. Throws IllegalStep when the MIM does not
/// carry a manipulator on both leg ports.
WalkingLegs walking_legs(const AssemblyGraph& assembly);

/// Moves one leg: release, re-anchor at `attach_to`, advance to full coupling.
/// Errors: IllegalStep, UnknownFixture, WouldDetachAssembly (from decouple).
AssemblyGraph execute_step(const AssemblyGraph& assembly, const WarehouseScene& scene, const GaitStep& step,
                           double reach_m = kDefaultReach);

}  // namespace mim
