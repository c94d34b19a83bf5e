#include "mim/locomotion.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>

#include "mim/error.hpp"

namespace mim {

std::string_view to_string(Leg leg) { return leg == Leg::Left ? "left" : "rear"; }

FixtureGraph::FixtureGraph(std::vector<FixtureNode> nodes, double reach_m, std::set<std::string> occupied)
    : nodes_(std::move(nodes)), reach_m_(reach_m), occupied_(std::move(occupied)) {
  require(std::isfinite(reach_m_) && reach_m_ > 0.0, ErrorCode::InvalidArgument, "reach must be > 0");
  std::set<std::string> ids;
  for (const auto& n : nodes_) {
    require(ids.insert(n.id).second, ErrorCode::InvalidArgument, "duplicate fixture id '" + n.id + "'");
    require(n.position.allFinite(), ErrorCode::InvalidArgument, "fixture '" + n.id + "' position must be finite");
  }
}

FixtureGraph FixtureGraph::from_scene(const WarehouseScene& scene, double reach_m, const AssemblyGraph* walker) {
  std::vector<FixtureNode> nodes;
  std::set<std::string> occupied;
  std::set<std::string> own_feet;
  if (walker != nullptr) {
    const WalkingLegs legs = walking_legs(*walker);
    own_feet = {legs.left_foot, legs.rear_foot};
    for (const auto& a : walker->anchors())
      if (!own_feet.contains(a.port)) occupied.insert(a.fixture);
  }
  for (const auto& f : scene.fixtures()) {
    nodes.push_back({f.id, f.pose.position});
    if (f.occupant && !own_feet.contains(*f.occupant)) occupied.insert(f.id);
  }
  return FixtureGraph(std::move(nodes), reach_m, std::move(occupied));
}

bool FixtureGraph::contains(std::string_view id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const FixtureNode& n) { return n.id == id; });
}

std::size_t FixtureGraph::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id == id) return i;
  fail(ErrorCode::UnknownFixture, "no fixture '" + std::string(id) + "'");
}

std::vector<std::string> reachable_fixtures(const FixtureGraph& graph, std::string_view anchored_fixture) {
  const std::size_t from = graph.index_of(anchored_fixture);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < graph.nodes().size(); ++i) {
    const auto& n = graph.nodes()[i];
    if (i != from && !graph.is_occupied(n.id) && graph.within_reach(from, i)) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Move {
  Leg leg;
  std::size_t left;
  std::size_t rear;
  std::size_t to;  // fixture the moving leg lands on
};

// Legal single-leg moves from placement (left, rear). The anchored leg stays;
// the free leg lands on an unoccupied fixture within reach of it.
std::vector<Move> moves_from(const FixtureGraph& g, std::size_t left, std::size_t rear) {
  std::vector<Move> out;
  for (std::size_t c = 0; c < g.nodes().size(); ++c) {
    if (c == left || c == rear || g.is_occupied(g.nodes()[c].id)) continue;
    if (g.within_reach(rear, c)) out.push_back({Leg::Left, c, rear, c});
    if (g.within_reach(left, c)) out.push_back({Leg::Rear, left, c, c});
  }
  return out;
}

}  // namespace

GaitPlan plan_walk(const FixtureGraph& graph, std::string_view start_left, std::string_view start_rear,
                   std::string_view goal) {
  const std::size_t goal_idx = graph.index_of(goal);
  if (!graph.contains(start_left) || !graph.contains(start_rear))
    fail(ErrorCode::InvalidStart, "start fixtures must exist");
  const std::size_t l0 = graph.index_of(start_left);
  const std::size_t r0 = graph.index_of(start_rear);
  require(l0 != r0, ErrorCode::InvalidStart, "legs must start on distinct fixtures");
  require(graph.within_reach(l0, r0), ErrorCode::InvalidStart, "start fixtures are farther apart than reach");
  require(!graph.is_occupied(start_left) && !graph.is_occupied(start_rear), ErrorCode::InvalidStart,
          "start fixture held by another module");

  GaitPlan plan{{}, std::string(start_left), std::string(start_rear), std::string(goal)};
  if (goal_idx == l0 || goal_idx == r0) return plan;
  require(!graph.is_occupied(goal), ErrorCode::NoPath, "goal fixture '" + std::string(goal) + "' is occupied");

  // Distance-to-goal over placements, by BFS from every placement that has
  // a leg on the goal. Moves are reversible, so this equals forward distance.
  const std::size_t n = graph.nodes().size();
  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> dist(n * n, kUnseen);
  auto at = [n](std::size_t l, std::size_t r) { return l * n + r; };
  std::deque<std::pair<std::size_t, std::size_t>> queue;
  for (std::size_t other = 0; other < n; ++other) {
    if (other == goal_idx || graph.is_occupied(graph.nodes()[other].id) || !graph.within_reach(goal_idx, other))
      continue;
    for (auto s : {std::pair{goal_idx, other}, std::pair{other, goal_idx}}) {
      dist[at(s.first, s.second)] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto [l, r] = queue.front();
    queue.pop_front();
    const int d = dist[at(l, r)];
    for (const Move& m : moves_from(graph, l, r)) {
      int& slot = dist[at(m.left, m.rear)];
      if (slot == kUnseen) {
        slot = d + 1;
        queue.push_back({m.left, m.rear});
      }
    }
  }
  if (dist[at(l0, r0)] == kUnseen)
    fail(ErrorCode::NoPath, "no leg sequence reaches fixture '" + std::string(goal) + "'");

  std::size_t l = l0;
  std::size_t r = r0;
  std::optional<Leg> last;
  while (dist[at(l, r)] > 0) {
    const int want = dist[at(l, r)] - 1;
    std::optional<Move> best;
    auto key = [&](const Move& m) {
      return std::tuple<bool, int, const std::string&>(last && *last == m.leg, static_cast<int>(m.leg),
                                                        graph.nodes()[m.to].id);
    };
    for (const Move& m : moves_from(graph, l, r))
      if (dist[at(m.left, m.rear)] == want && (!best || key(m) < key(*best))) best = m;
    const std::size_t from = best->leg == Leg::Left ? l : r;
    plan.steps.push_back({best->leg, graph.nodes()[from].id, graph.nodes()[best->to].id});
    l = best->left;
    r = best->rear;
    last = best->leg;
  }
  return plan;
}

std::string format_plan(const GaitPlan& plan) {
  std::ostringstream out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& s = plan.steps[i];
    out << "step " << (i + 1) << ": " << to_string(s.leg) << ' ' << s.detach_from << " -> " << s.attach_to << '\n';
  }
  return out.str();
}

WalkingLegs walking_legs(const AssemblyGraph& assembly) {
  const ModuleAsset& mim = the_mim(assembly);
  WalkingLegs legs;
  for (Leg leg : {Leg::Left, Leg::Rear}) {
    const std::string& hardpoint = mim_port(mim, leg == Leg::Left ? MimPortRole::Left : MimPortRole::Rear);
    const auto arm_id = neighbor_module(assembly, hardpoint);
    const bool is_arm = arm_id && assembly.module(*arm_id).kind == ModuleKind::WalkingManipulator;
    require(is_arm, ErrorCode::IllegalStep,
            "no walking manipulator on the " + std::string(to_string(leg)) + " port of MIM '" + mim.id + "'");
    const ModuleAsset& arm = assembly.module(*arm_id);
    const std::string& attached = *assembly.port(hardpoint).peer;
    const auto foot = std::find_if(arm.ports.begin(), arm.ports.end(),
                                   [&](const SiPort& p) { return p.id != attached; });
    (leg == Leg::Left ? legs.left_arm : legs.rear_arm) = arm.id;
    (leg == Leg::Left ? legs.left_foot : legs.rear_foot) = foot->id;
  }
  require(legs.left_arm != legs.rear_arm, ErrorCode::IllegalStep, "both leg ports hold the same manipulator");
  return legs;
}

AssemblyGraph execute_step(const AssemblyGraph& assembly, const WarehouseScene& scene, const GaitStep& step,
                           double reach_m) {
  const Configuration config = validate_configuration(assembly);
  require(config == Configuration::Walking || config == Configuration::Maintenance, ErrorCode::IllegalStep,
          "assembly is not walking");
  const WalkingLegs legs = walking_legs(assembly);
  const std::string& foot = step.leg == Leg::Left ? legs.left_foot : legs.rear_foot;
  const std::string& other_foot = step.leg == Leg::Left ? legs.rear_foot : legs.left_foot;

  const SiPort& foot_port = assembly.port(foot);
  require(foot_port.fixture && *foot_port.fixture == step.detach_from, ErrorCode::IllegalStep,
          "the " + std::string(to_string(step.leg)) + " leg is not anchored at '" + step.detach_from + "'");
  require(step.attach_to != step.detach_from, ErrorCode::IllegalStep, "step must change fixture");
  const FixturePoint& target = scene.fixture(step.attach_to);
  const bool foreign_occupant = target.occupant && *target.occupant != foot && *target.occupant != other_foot;
  require(!foreign_occupant && !assembly.port_at_fixture(step.attach_to), ErrorCode::IllegalStep,
          "fixture '" + step.attach_to + "' is occupied");

  AssemblyGraph next = decouple(assembly, foot);

  const SiPort& stance = next.port(other_foot);
  require(stance.fixture.has_value(), ErrorCode::IllegalStep, "stance leg is not anchored");
  const double span = (scene.fixture(*stance.fixture).pose.position - target.pose.position).norm();
  require(span <= reach_m, ErrorCode::IllegalStep, "fixture '" + step.attach_to + "' is out of reach");

  next = anchor(next, foot, step.attach_to);
  next = advance_coupling(next, foot);
  next = advance_coupling(next, foot);
  return next;
}

}  // namespace mim
