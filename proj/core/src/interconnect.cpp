#include "mim/interconnect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "mim/error.hpp"

namespace mim {

std::string_view to_string(CouplingState state) {
  switch (state) {
    case CouplingState::Free: return "free";
    case CouplingState::Latched: return "latched";
    case CouplingState::PowerCoupled: return "power";
    case CouplingState::FullCoupled: return "full";
  }
  return "free";
}

CouplingState parse_coupling_state(std::string_view text) {
  if (text == "free") return CouplingState::Free;
  if (text == "latched") return CouplingState::Latched;
  if (text == "power") return CouplingState::PowerCoupled;
  if (text == "full") return CouplingState::FullCoupled;
  fail(ErrorCode::InvalidArgument, "unknown coupling state '" + std::string(text) + "'");
}

std::string_view to_string(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::Mim: return "mim";
    case ModuleKind::WalkingManipulator: return "walking_manipulator";
    case ModuleKind::Shuttle: return "shuttle";
    case ModuleKind::LargeArm: return "large_arm";
    case ModuleKind::Tool: return "tool";
    case ModuleKind::OruModule: return "oru";
  }
  return "mim";
}

ModuleKind parse_module_kind(std::string_view text) {
  for (ModuleKind k : {ModuleKind::Mim, ModuleKind::WalkingManipulator, ModuleKind::Shuttle, ModuleKind::LargeArm,
                       ModuleKind::Tool, ModuleKind::OruModule})
    if (to_string(k) == text) return k;
  fail(ErrorCode::InvalidArgument, "unknown module kind '" + std::string(text) + "'");
}

std::string_view to_string(Configuration c) {
  switch (c) {
    case Configuration::Walking: return "walking";
    case Configuration::ExternallyMounted: return "externally_mounted";
    case Configuration::LargeArmMounted: return "large_arm_mounted";
    case Configuration::Maintenance: return "maintenance";
  }
  return "walking";
}

AssemblyGraph::AssemblyGraph(std::vector<ModuleAsset> modules) : modules_(std::move(modules)) {
  std::set<std::string> module_ids;
  std::set<std::string> port_ids;
  for (auto& m : modules_) {
    require(!m.id.empty(), ErrorCode::InvalidArgument, "module id must not be empty");
    require(module_ids.insert(m.id).second, ErrorCode::InvalidArgument, "duplicate module id '" + m.id + "'");
    if (m.kind == ModuleKind::Mim)
      require(m.ports.size() == 3, ErrorCode::InvalidArgument, "MIM '" + m.id + "' must have exactly 3 ports");
    if (m.kind == ModuleKind::WalkingManipulator)
      require(m.ports.size() == 2, ErrorCode::InvalidArgument,
              "walking manipulator '" + m.id + "' must have exactly 2 ports");
    require(std::isfinite(m.power_draw_w) && m.power_draw_w >= 0.0, ErrorCode::InvalidArgument,
            "module '" + m.id + "' power draw must be >= 0");
    for (const auto& u : m.internal_units)
      require(std::isfinite(u.watts) && u.watts >= 0.0, ErrorCode::InvalidArgument,
              "unit '" + u.name + "' power must be >= 0");
    for (auto& p : m.ports) {
      require(!p.id.empty(), ErrorCode::InvalidArgument, "port id must not be empty");
      require(port_ids.insert(p.id).second, ErrorCode::InvalidArgument, "duplicate port id '" + p.id + "'");
      require(p.state == CouplingState::Free && !p.peer && !p.fixture, ErrorCode::InvalidArgument,
              "port '" + p.id + "' must start free");
      p.owner = m.id;
    }
  }
}

std::vector<Coupling> AssemblyGraph::couplings() const {
  std::vector<Coupling> out;
  for (const auto& m : modules_)
    for (const auto& p : m.ports)
      if (p.peer && p.id < *p.peer) out.push_back({p.id, *p.peer, p.state});
  std::sort(out.begin(), out.end(), [](const Coupling& a, const Coupling& b) { return a.port_a < b.port_a; });
  return out;
}

std::vector<Anchor> AssemblyGraph::anchors() const {
  std::vector<Anchor> out;
  for (const auto& m : modules_)
    for (const auto& p : m.ports)
      if (p.fixture) out.push_back({p.id, *p.fixture, p.state});
  std::sort(out.begin(), out.end(), [](const Anchor& a, const Anchor& b) { return a.port < b.port; });
  return out;
}

bool AssemblyGraph::has_module(std::string_view id) const {
  return std::any_of(modules_.begin(), modules_.end(), [&](const ModuleAsset& m) { return m.id == id; });
}

bool AssemblyGraph::has_port(std::string_view id) const {
  for (const auto& m : modules_)
    for (const auto& p : m.ports)
      if (p.id == id) return true;
  return false;
}

const ModuleAsset& AssemblyGraph::module(std::string_view id) const {
  for (const auto& m : modules_)
    if (m.id == id) return m;
  fail(ErrorCode::UnknownModule, "no module '" + std::string(id) + "'");
}

const SiPort& AssemblyGraph::port(std::string_view id) const {
  for (const auto& m : modules_)
    for (const auto& p : m.ports)
      if (p.id == id) return p;
  fail(ErrorCode::UnknownPort, "no port '" + std::string(id) + "'");
}

SiPort& AssemblyGraph::mutable_port(std::string_view id) {
  return const_cast<SiPort&>(static_cast<const AssemblyGraph&>(*this).port(id));
}

const ModuleAsset& AssemblyGraph::owner_of(std::string_view port_id) const { return module(port(port_id).owner); }

std::optional<std::string> AssemblyGraph::port_at_fixture(std::string_view fixture_id) const {
  for (const auto& m : modules_)
    for (const auto& p : m.ports)
      if (p.fixture && *p.fixture == fixture_id) return p.id;
  return std::nullopt;
}

std::vector<std::string> AssemblyGraph::component(std::string_view module_id) const {
  std::set<std::string> seen{std::string(module(module_id).id)};
  std::deque<std::string> queue{std::string(module_id)};
  while (!queue.empty()) {
    const ModuleAsset& m = module(queue.front());
    queue.pop_front();
    for (const auto& p : m.ports) {
      if (!p.peer) continue;
      const std::string& next = port(*p.peer).owner;
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return {seen.begin(), seen.end()};
}

bool AssemblyGraph::is_held(std::string_view module_id) const {
  for (const auto& id : component(module_id)) {
    const ModuleAsset& m = module(id);
    if (is_grounded(m.kind)) return true;
    for (const auto& p : m.ports)
      if (p.fixture) return true;
  }
  return false;
}

AssemblyGraph couple(const AssemblyGraph& assembly, std::string_view port_a, std::string_view port_b) {
  const SiPort& a = assembly.port(port_a);
  const SiPort& b = assembly.port(port_b);
  require(a.owner != b.owner, ErrorCode::SelfCoupling,
          "ports '" + a.id + "' and '" + b.id + "' belong to the same module");
  require(a.state == CouplingState::Free, ErrorCode::PortBusy, "port '" + a.id + "' is not free");
  require(b.state == CouplingState::Free, ErrorCode::PortBusy, "port '" + b.id + "' is not free");
  AssemblyGraph out = assembly;
  SiPort& pa = out.mutable_port(port_a);
  SiPort& pb = out.mutable_port(port_b);
  pa.state = pb.state = CouplingState::Latched;
  pa.peer = pb.id;
  pb.peer = pa.id;
  return out;
}

AssemblyGraph anchor(const AssemblyGraph& assembly, std::string_view port, std::string_view fixture) {
  const SiPort& p = assembly.port(port);
  require(p.state == CouplingState::Free, ErrorCode::PortBusy, "port '" + p.id + "' is not free");
  require(!fixture.empty(), ErrorCode::InvalidArgument, "fixture id must not be empty");
  if (auto holder = assembly.port_at_fixture(fixture))
    fail(ErrorCode::FixtureOccupied, "fixture '" + std::string(fixture) + "' is held by port '" + *holder + "'");
  AssemblyGraph out = assembly;
  SiPort& q = out.mutable_port(port);
  q.state = CouplingState::Latched;
  q.fixture = std::string(fixture);
  return out;
}

AssemblyGraph advance_coupling(const AssemblyGraph& assembly, std::string_view port) {
  const SiPort& p = assembly.port(port);
  require(p.state != CouplingState::Free, ErrorCode::NotCoupled, "port '" + p.id + "' is free");
  require(p.state != CouplingState::FullCoupled, ErrorCode::AlreadyFull, "port '" + p.id + "' is fully coupled");
  const auto next = static_cast<CouplingState>(static_cast<int>(p.state) + 1);
  AssemblyGraph out = assembly;
  out.mutable_port(port).state = next;
  if (p.peer) out.mutable_port(*p.peer).state = next;
  return out;
}

AssemblyGraph decouple(const AssemblyGraph& assembly, std::string_view port) {
  const SiPort& p = assembly.port(port);
  require(p.state != CouplingState::Free, ErrorCode::NotCoupled, "port '" + p.id + "' is free");
  AssemblyGraph out = assembly;
  SiPort& q = out.mutable_port(port);
  if (q.peer) {
    SiPort& peer = out.mutable_port(*q.peer);
    peer.state = CouplingState::Free;
    peer.peer.reset();
  }
  q.state = CouplingState::Free;
  q.peer.reset();
  q.fixture.reset();
  for (const auto& m : assembly.modules())
    if (m.kind == ModuleKind::Mim && assembly.is_held(m.id) && !out.is_held(m.id))
      fail(ErrorCode::WouldDetachAssembly,
           "releasing port '" + p.id + "' would leave MIM '" + m.id + "' without structural support");
  return out;
}

const std::string& mim_port(const ModuleAsset& mim, MimPortRole role) {
  require(mim.kind == ModuleKind::Mim && mim.ports.size() == 3, ErrorCode::InvalidArgument,
          "module '" + mim.id + "' is not a MIM");
  return mim.ports[static_cast<std::size_t>(role)].id;
}

const ModuleAsset& the_mim(const AssemblyGraph& assembly) {
  const ModuleAsset* found = nullptr;
  int count = 0;
  for (const auto& m : assembly.modules())
    if (m.kind == ModuleKind::Mim) {
      found = &m;
      ++count;
    }
  require(count == 1, ErrorCode::Unrecognized,
          "assembly must contain exactly one MIM, found " + std::to_string(count));
  return *found;
}

std::optional<std::string> neighbor_module(const AssemblyGraph& assembly, std::string_view port) {
  const SiPort& p = assembly.port(port);
  if (!p.peer) return std::nullopt;
  return assembly.port(*p.peer).owner;
}

namespace {

// The end of a manipulator that is not attached to `via_port`.
const SiPort* far_end(const AssemblyGraph& assembly, const ModuleAsset& arm, std::string_view via_port) {
  for (const auto& p : arm.ports)
    if (!p.peer || *p.peer != via_port) return &assembly.port(p.id);
  return nullptr;
}

// The arm's far end is latched to a fixture or to a grounded module.
bool arm_is_fixed(const AssemblyGraph& assembly, const ModuleAsset& arm, std::string_view via_port) {
  const SiPort* end = far_end(assembly, arm, via_port);
  if (end == nullptr) return false;
  if (end->fixture) return true;
  return end->peer && is_grounded(assembly.owner_of(*end->peer).kind);
}

}  // namespace

Configuration validate_configuration(const AssemblyGraph& assembly) {
  const ModuleAsset& mim = the_mim(assembly);
  require(assembly.is_held(mim.id), ErrorCode::UnanchoredAssembly,
          "MIM '" + mim.id + "' is not held by any fixture or station module");

  struct Slot {
    const ModuleAsset* module = nullptr;
    std::string port;
  };
  Slot slots[3];
  for (int r = 0; r < 3; ++r) {
    slots[r].port = mim_port(mim, static_cast<MimPortRole>(r));
    if (auto n = neighbor_module(assembly, slots[r].port)) slots[r].module = &assembly.module(*n);
  }
  auto is_arm = [](const Slot& s) { return s.module && s.module->kind == ModuleKind::WalkingManipulator; };
  const Slot& left = slots[static_cast<int>(MimPortRole::Left)];
  const Slot& rear = slots[static_cast<int>(MimPortRole::Rear)];
  const Slot& right = slots[static_cast<int>(MimPortRole::Right)];

  std::optional<Configuration> base;
  const bool left_fixed = is_arm(left) && arm_is_fixed(assembly, *left.module, left.port);
  const bool rear_fixed = is_arm(rear) && arm_is_fixed(assembly, *rear.module, rear.port);
  if (is_arm(left) && is_arm(rear) && left.module != rear.module && (left_fixed || rear_fixed)) {
    base = Configuration::Walking;
  } else if (std::any_of(std::begin(slots), std::end(slots),
                         [](const Slot& s) { return s.module && s.module->kind == ModuleKind::LargeArm; })) {
    base = Configuration::LargeArmMounted;
  } else if (is_arm(left) != is_arm(rear) && (left_fixed || rear_fixed)) {
    base = Configuration::ExternallyMounted;
  }
  if (!base) fail(ErrorCode::Unrecognized, "assembly around MIM '" + mim.id + "' matches no known configuration");
  if (is_arm(right)) return Configuration::Maintenance;
  return *base;
}

PowerReport power_check(const AssemblyGraph& assembly, double bus_voltage_v, double limit_a) {
  require(std::isfinite(bus_voltage_v) && bus_voltage_v > 0.0, ErrorCode::InvalidArgument,
          "bus voltage must be > 0");
  require(std::isfinite(limit_a) && limit_a >= 0.0, ErrorCode::InvalidArgument, "current limit must be >= 0");
  PowerReport r;
  for (const auto& m : assembly.modules()) {
    r.total_power_w += m.power_draw_w;
    for (const auto& u : m.internal_units) r.total_power_w += u.watts;
  }
  r.bus_voltage_v = bus_voltage_v;
  r.limit_a = limit_a;
  r.total_current_a = r.total_power_w / bus_voltage_v;
  r.within_limit = r.total_current_a <= limit_a;
  return r;
}

RouteResult route_message(const AssemblyGraph& assembly, std::string_view from_module, std::string_view to_module,
                          std::string_view topic) {
  const std::string from = assembly.module(from_module).id;
  const std::string to = assembly.module(to_module).id;
  RouteResult result;
  result.topic = std::string(topic);

  std::map<std::string, std::vector<std::string>> links;
  for (const auto& c : assembly.couplings()) {
    if (c.state != CouplingState::FullCoupled) continue;
    const std::string& a = assembly.port(c.port_a).owner;
    const std::string& b = assembly.port(c.port_b).owner;
    links[a].push_back(b);
    links[b].push_back(a);
  }
  for (auto& [_, v] : links) std::sort(v.begin(), v.end());

  std::map<std::string, std::string> parent{{from, from}};
  std::deque<std::string> queue{from};
  while (!queue.empty() && !parent.contains(to)) {
    const std::string cur = queue.front();
    queue.pop_front();
    for (const auto& next : links[cur])
      if (parent.emplace(next, cur).second) queue.push_back(next);
  }
  if (!parent.contains(to)) return result;

  for (std::string at = to; at != from; at = parent[at]) result.path.push_back(at);
  result.path.push_back(from);
  std::reverse(result.path.begin(), result.path.end());
  result.delivered = true;
  result.hops = static_cast<int>(result.path.size()) - 1;
  return result;
}

namespace {

SiPort port_for(std::string port_id, const std::string& owner) {
  SiPort p;
  p.id = std::move(port_id);
  p.owner = owner;
  return p;
}

}  // namespace

ModuleAsset make_mim(std::string id, const MimPowerDefaults& power) {
  ModuleAsset m;
  m.kind = ModuleKind::Mim;
  m.ports = {port_for(id + ":left", id), port_for(id + ":rear", id), port_for(id + ":right", id)};
  static constexpr const char* kUnitNames[] = {"camera_array", "profilometer", "thermal_imager", "tilt_drive",
                                               "power_distribution"};
  for (int i = 0; i < power.unit_count; ++i) {
    std::string name = i < 5 ? kUnitNames[i] : "unit_" + std::to_string(i);
    m.internal_units.push_back({std::move(name), power.unit_w});
  }
  m.internal_units.push_back({"obc", power.obc_w});
  m.internal_units.push_back({"illumination", power.illumination_w});
  m.id = std::move(id);
  return m;
}

ModuleAsset make_walking_manipulator(std::string id, double power_draw_w) {
  ModuleAsset m;
  m.kind = ModuleKind::WalkingManipulator;
  m.ports = {port_for(id + ":a", id), port_for(id + ":b", id)};
  m.power_draw_w = power_draw_w;
  m.id = std::move(id);
  return m;
}

ModuleAsset make_single_port_module(std::string id, ModuleKind kind, double power_draw_w) {
  ModuleAsset m;
  m.kind = kind;
  m.ports = {port_for(id + ":si", id)};
  m.power_draw_w = power_draw_w;
  m.id = std::move(id);
  return m;
}

}  // namespace mim
