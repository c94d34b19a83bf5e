#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mim {

/// Coupling stages of a standard interconnect, in the only legal order:
/// mechanical latch, then power, then data.
enum class CouplingState { Free, Latched, PowerCoupled, FullCoupled };

std::string_view to_string(CouplingState state);
/// Accepts `free|latched|power|full`. Throws InvalidArgument.
CouplingState parse_coupling_state(std::string_view text);

struct SiPort {
  std::string id;
  std::string owner;
  CouplingState state = CouplingState::Free;
  std::optional<std::string> peer;     // coupled port of another module
  std::optional<std::string> fixture;  // structure fixture this port is latched to

  friend bool operator==(const SiPort&, const SiPort&) = default;
};

enum class ModuleKind { Mim, WalkingManipulator, Shuttle, LargeArm, Tool, OruModule };

std::string_view to_string(ModuleKind kind);
ModuleKind parse_module_kind(std::string_view text);

/// Shuttles and the large arm are part of the station: anything coupled to
/// them counts as held by the structure.
constexpr bool is_grounded(ModuleKind kind) {
  return kind == ModuleKind::Shuttle || kind == ModuleKind::LargeArm;
}

struct InternalUnit {
  std::string name;
  double watts = 0.0;

  friend bool operator==(const InternalUnit&, const InternalUnit&) = default;
};

struct ModuleAsset {
  std::string id;
  ModuleKind kind = ModuleKind::Mim;
  std::vector<SiPort> ports;
  double power_draw_w = 0.0;
  std::vector<InternalUnit> internal_units;

  friend bool operator==(const ModuleAsset&, const ModuleAsset&) = default;
};

struct Coupling {
  std::string port_a;
  std::string port_b;
  CouplingState state = CouplingState::Free;
};

struct Anchor {
  std::string port;
  std::string fixture;
  CouplingState state = CouplingState::Free;
};

/// MIM hardpoints. Left and rear carry the legs; right is reserved for the
/// tool-handling arm and never serves as an anchor while walking.
enum class MimPortRole { Left = 0, Rear = 1, Right = 2 };

/// Modules joined by interconnect couplings. Port state is the single source
/// of truth; couplings() and anchors() are views over it, so a coupling can
/// never disagree with its ports.
class AssemblyGraph {
 public:
  AssemblyGraph() = default;
  /// Modules must arrive uncoupled. Throws InvalidArgument on duplicate ids,
  /// wrong port counts (MIM: 3, walking manipulator: 2) or pre-set state.
  explicit AssemblyGraph(std::vector<ModuleAsset> modules);

  const std::vector<ModuleAsset>& modules() const { return modules_; }
  bool empty() const { return modules_.empty(); }

  /// Sorted by the lexicographically smaller port id.
  std::vector<Coupling> couplings() const;
  /// Sorted by port id.
  std::vector<Anchor> anchors() const;

  bool has_module(std::string_view id) const;
  bool has_port(std::string_view id) const;
  /// Throws UnknownModule.
  const ModuleAsset& module(std::string_view id) const;
  /// Throws UnknownPort.
  const SiPort& port(std::string_view id) const;
  const ModuleAsset& owner_of(std::string_view port_id) const;
  /// Port anchored at `fixture_id`, if any.
  std::optional<std::string> port_at_fixture(std::string_view fixture_id) const;

  /// Modules reachable from `module_id` through couplings in any non-free
  /// state, sorted by id.
  std::vector<std::string> component(std::string_view module_id) const;
  /// True when the component holds an anchor or a grounded module.
  bool is_held(std::string_view module_id) const;

  friend bool operator==(const AssemblyGraph&, const AssemblyGraph&) = default;

 private:
  friend AssemblyGraph couple(const AssemblyGraph&, std::string_view, std::string_view);
  friend AssemblyGraph anchor(const AssemblyGraph&, std::string_view, std::string_view);
  friend AssemblyGraph advance_coupling(const AssemblyGraph&, std::string_view);
  friend AssemblyGraph decouple(const AssemblyGraph&, std::string_view);

  SiPort& mutable_port(std::string_view id);

  std::vector<ModuleAsset> modules_;
};

/// Latch two free ports of different modules. Errors: UnknownPort, PortBusy, SelfCoupling.
AssemblyGraph couple(const AssemblyGraph& assembly, std::string_view port_a, std::string_view port_b);
/// Latch a free port onto a structure fixture. Errors: UnknownPort, PortBusy, FixtureOccupied.
AssemblyGraph anchor(const AssemblyGraph& assembly, std::string_view port, std::string_view fixture);
/// Latched -> PowerCoupled -> FullCoupled, mirrored on the peer.
/// Errors: UnknownPort, NotCoupled, AlreadyFull.
AssemblyGraph advance_coupling(const AssemblyGraph& assembly, std::string_view port);
/// Frees both ends. Refuses when a MIM that is held by the structure would
/// stop being held. Errors: UnknownPort, NotCoupled, WouldDetachAssembly.
AssemblyGraph decouple(const AssemblyGraph& assembly, std::string_view port);

enum class Configuration { Walking, ExternallyMounted, LargeArmMounted, Maintenance };
std::string_view to_string(Configuration c);

/// Port id of a MIM hardpoint (the MIM's ports are ordered left, rear, right).
const std::string& mim_port(const ModuleAsset& mim, MimPortRole role);
/// The single MIM of an assembly. Throws Unrecognized when there is not exactly one.
const ModuleAsset& the_mim(const AssemblyGraph& assembly);
/// Module coupled (any non-free state) to the given port, if any.
std::optional<std::string> neighbor_module(const AssemblyGraph& assembly, std::string_view port);

/// Errors: Unrecognized, UnanchoredAssembly.
Configuration validate_configuration(const AssemblyGraph& assembly);

struct PowerReport {
  double total_power_w = 0.0;
  double bus_voltage_v = 48.0;
  double total_current_a = 0.0;
  double limit_a = 14.0;
  bool within_limit = true;
};

inline constexpr double kArmBusVoltage = 48.0;
inline constexpr double kArmBusCurrentLimit = 14.0;

PowerReport power_check(const AssemblyGraph& assembly, double bus_voltage_v = kArmBusVoltage,
                        double limit_a = kArmBusCurrentLimit);

struct RouteResult {
  bool delivered = false;
  int hops = 0;
  std::vector<std::string> path;  // module ids, from..to
  std::string topic;
};

/// Shortest path over FullCoupled links only; ties resolved by module id.
/// Errors: UnknownModule.
RouteResult route_message(const AssemblyGraph& assembly, std::string_view from_module,
                          std::string_view to_module, std::string_view topic);

// Stock modules with the default electrical budget.
struct MimPowerDefaults {
  double unit_w = 5.0;  // sensor/actuator electronics, per unit
  int unit_count = 5;
  double obc_w = 25.0;
  double illumination_w = 20.0;
};

ModuleAsset make_mim(std::string id, const MimPowerDefaults& power = {});
ModuleAsset make_walking_manipulator(std::string id, double power_draw_w = 0.0);
/// Single-port module of the given kind.
ModuleAsset make_single_port_module(std::string id, ModuleKind kind, double power_draw_w = 0.0);

}  // namespace mim
