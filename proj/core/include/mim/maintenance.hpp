#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mim/geometry.hpp"
#include "mim/interconnect.hpp"
#include "mim/sensors.hpp"

namespace mim {

enum class ToolKind { Gripper, TorqueWrench };
std::string_view to_string(ToolKind kind);

// Tool envelopes, inclusive on both ends.
inline constexpr double kGripMinCm = 0.5;
inline constexpr double kGripMaxCm = 10.0;
inline constexpr double kTorqueMinNm = 2.7;
inline constexpr double kTorqueMaxNm = 30.0;

// Eye-to-hand gate: worksite inside this cone around the MIM boresight.
inline constexpr double kObservationHalfAngleDeg = 60.0;
inline constexpr double kObservationRangeM = 2.0;

struct Tool {
  std::string id;
  ToolKind kind = ToolKind::Gripper;

  friend bool operator==(const Tool&, const Tool&) = default;
};

struct Fastener {
  std::string id;
  Vec3 position = Vec3::Zero();
  bool fastened = true;
};

struct Observation {
  std::string kind;  // "eye_in_hand" or "eye_to_hand"
  std::string observer;
  double angle_deg = 0.0;
  double distance_m = 0.0;
};

struct MaintenanceEvent {
  std::string action;
  std::string arm;
  std::string subject;
  bool success = false;
  std::string outcome;
  std::vector<Observation> observations;
};

enum class GraspResult { Ok, TooSmall, TooLarge };
enum class TorqueResult { Ok, BelowMinimum, AboveMaximum };
std::string_view to_string(GraspResult r);
std::string_view to_string(TorqueResult r);

struct GraspOutcome {
  bool success = false;
  GraspResult result = GraspResult::Ok;
};

struct TorqueOutcome {
  bool success = false;
  TorqueResult result = TorqueResult::Ok;
  bool fastened = false;  // fastener state after the attempt
};

/// MIM maintenance state: the assembly, two lidded tool compartments, tools
/// held by arms, fasteners at the worksite and the action log. Operations
/// validate before mutating, so a throwing call leaves the cell unchanged.
class Workcell {
 public:
  static constexpr std::size_t kSlots = 2;

  /// Gripper in slot 0, torque wrench in slot 1, lid closed.
  Workcell(AssemblyGraph assembly, SensorHead mim_head, std::vector<Fastener> fasteners = {});

  const AssemblyGraph& assembly() const { return assembly_; }
  const SensorHead& mim_head() const { return head_; }
  const std::array<std::optional<Tool>, kSlots>& slots() const { return slots_; }
  const std::map<std::string, Tool>& held() const { return held_; }
  const std::vector<Fastener>& fasteners() const { return fasteners_; }
  const std::vector<MaintenanceEvent>& log() const { return log_; }
  bool lid_open() const { return lid_open_; }

  void set_lid(bool open);
  /// Errors: UnknownModule, NoArmOnToolPort, InvalidArgument (slot), LidClosed,
  /// EmptySlot, ArmOccupied.
  void retrieve_tool(std::string_view arm_id, std::size_t slot);
  /// Errors: UnknownModule, NoArmOnToolPort, InvalidArgument (slot), LidClosed,
  /// NothingHeld, SlotOccupied.
  void stow_tool(std::string_view arm_id, std::size_t slot);
  /// Errors: WrongTool, NotObserved.
  GraspOutcome grasp(std::string_view arm_id, double object_dim_cm, const Vec3& worksite);
  /// Errors: WrongTool, NotObserved, InvalidArgument (unknown fastener).
  TorqueOutcome apply_torque(std::string_view arm_id, std::string_view fastener_id, double torque_nm);

  /// Every tool of the initial inventory sits in exactly one place.
  bool tools_conserved() const;
  /// Same placement of tools, lid and fasteners (the log is ignored).
  bool same_state(const Workcell& other) const;

 private:
  void require_tool_arm(std::string_view arm_id) const;
  const Tool& held_tool(std::string_view arm_id, ToolKind kind) const;
  Observation observe(const Vec3& worksite) const;

  AssemblyGraph assembly_;
  SensorHead head_;
  std::array<std::optional<Tool>, kSlots> slots_;
  std::map<std::string, Tool> held_;
  std::vector<Fastener> fasteners_;
  std::vector<MaintenanceEvent> log_;
  std::vector<std::string> inventory_;
  bool lid_open_ = false;
};

}  // namespace mim
