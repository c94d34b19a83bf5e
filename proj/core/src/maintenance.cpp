#include "mim/maintenance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mim/error.hpp"

namespace mim {

std::string_view to_string(ToolKind kind) { return kind == ToolKind::Gripper ? "gripper" : "torque_wrench"; }

std::string_view to_string(GraspResult r) {
  switch (r) {
    case GraspResult::Ok: return "ok";
    case GraspResult::TooSmall: return "too_small";
    case GraspResult::TooLarge: return "too_large";
  }
  return "ok";
}

std::string_view to_string(TorqueResult r) {
  switch (r) {
    case TorqueResult::Ok: return "ok";
    case TorqueResult::BelowMinimum: return "below_minimum";
    case TorqueResult::AboveMaximum: return "above_maximum";
  }
  return "ok";
}

Workcell::Workcell(AssemblyGraph assembly, SensorHead mim_head, std::vector<Fastener> fasteners)
    : assembly_(std::move(assembly)), head_(std::move(mim_head)), fasteners_(std::move(fasteners)) {
  validate(head_);
  slots_[0] = Tool{"gripper", ToolKind::Gripper};
  slots_[1] = Tool{"torque_wrench", ToolKind::TorqueWrench};
  inventory_ = {"gripper", "torque_wrench"};
}

void Workcell::set_lid(bool open) {
  lid_open_ = open;
  log_.push_back({open ? "open_lid" : "close_lid", "", "", true, "ok", {}});
}

void Workcell::require_tool_arm(std::string_view arm_id) const {
  const ModuleAsset& arm = assembly_.module(arm_id);
  const ModuleAsset& mim = the_mim(assembly_);
  const SiPort& tool_port = assembly_.port(mim_port(mim, MimPortRole::Right));
  const bool attached = tool_port.peer && assembly_.port(*tool_port.peer).owner == arm.id &&
                        tool_port.state == CouplingState::FullCoupled;
  require(attached, ErrorCode::NoArmOnToolPort,
          "arm '" + arm.id + "' is not fully coupled to the tool port of MIM '" + mim.id + "'");
}

const Tool& Workcell::held_tool(std::string_view arm_id, ToolKind kind) const {
  auto it = held_.find(std::string(arm_id));
  require(it != held_.end() && it->second.kind == kind, ErrorCode::WrongTool,
          "arm '" + std::string(arm_id) + "' does not hold a " + std::string(to_string(kind)));
  return it->second;
}

Observation Workcell::observe(const Vec3& worksite) const {
  const Pose sensor = head_.sensor_pose();
  const Vec3 offset = worksite - sensor.position;
  Observation o;
  o.kind = "eye_to_hand";
  o.observer = "mim_sensor_head";
  o.distance_m = offset.norm();
  const double cosine = o.distance_m > 0 ? offset.dot(sensor.rotate(Vec3::UnitZ())) / o.distance_m : 1.0;
  o.angle_deg = std::acos(std::clamp(cosine, -1.0, 1.0)) * 180.0 / std::numbers::pi;
  require(o.angle_deg <= kObservationHalfAngleDeg && o.distance_m <= kObservationRangeM, ErrorCode::NotObserved,
          "worksite outside the MIM sensor cone");
  return o;
}

void Workcell::retrieve_tool(std::string_view arm_id, std::size_t slot) {
  require_tool_arm(arm_id);
  require(slot < kSlots, ErrorCode::InvalidArgument, "slot must be 0 or 1");
  require(lid_open_, ErrorCode::LidClosed, "tool compartment lid is closed");
  require(slots_[slot].has_value(), ErrorCode::EmptySlot, "slot " + std::to_string(slot) + " is empty");
  require(!held_.contains(std::string(arm_id)), ErrorCode::ArmOccupied,
          "arm '" + std::string(arm_id) + "' already holds a tool");
  Tool tool = *slots_[slot];
  slots_[slot].reset();
  log_.push_back({"retrieve_tool", std::string(arm_id), tool.id, true, "slot " + std::to_string(slot), {}});
  held_.emplace(std::string(arm_id), std::move(tool));
}

void Workcell::stow_tool(std::string_view arm_id, std::size_t slot) {
  require_tool_arm(arm_id);
  require(slot < kSlots, ErrorCode::InvalidArgument, "slot must be 0 or 1");
  require(lid_open_, ErrorCode::LidClosed, "tool compartment lid is closed");
  auto it = held_.find(std::string(arm_id));
  require(it != held_.end(), ErrorCode::NothingHeld, "arm '" + std::string(arm_id) + "' holds no tool");
  require(!slots_[slot].has_value(), ErrorCode::SlotOccupied, "slot " + std::to_string(slot) + " is occupied");
  log_.push_back({"stow_tool", std::string(arm_id), it->second.id, true, "slot " + std::to_string(slot), {}});
  slots_[slot] = std::move(it->second);
  held_.erase(it);
}

GraspOutcome Workcell::grasp(std::string_view arm_id, double object_dim_cm, const Vec3& worksite) {
  const Tool& tool = held_tool(arm_id, ToolKind::Gripper);
  require(std::isfinite(object_dim_cm), ErrorCode::InvalidArgument, "object size must be finite");
  const Observation seen = observe(worksite);
  GraspOutcome out;
  if (object_dim_cm < kGripMinCm)
    out.result = GraspResult::TooSmall;
  else if (object_dim_cm > kGripMaxCm)
    out.result = GraspResult::TooLarge;
  out.success = out.result == GraspResult::Ok;
  MaintenanceEvent e{"grasp", std::string(arm_id), tool.id, out.success, std::string(to_string(out.result)), {}};
  e.observations.push_back({"eye_in_hand", std::string(arm_id), 0.0, 0.0});
  e.observations.push_back(seen);
  log_.push_back(std::move(e));
  return out;
}

TorqueOutcome Workcell::apply_torque(std::string_view arm_id, std::string_view fastener_id, double torque_nm) {
  held_tool(arm_id, ToolKind::TorqueWrench);
  require(std::isfinite(torque_nm), ErrorCode::InvalidArgument, "torque must be finite");
  auto f = std::find_if(fasteners_.begin(), fasteners_.end(), [&](const Fastener& x) { return x.id == fastener_id; });
  require(f != fasteners_.end(), ErrorCode::InvalidArgument, "no fastener '" + std::string(fastener_id) + "'");
  const Observation seen = observe(f->position);
  TorqueOutcome out;
  if (torque_nm < kTorqueMinNm)
    out.result = TorqueResult::BelowMinimum;
  else if (torque_nm > kTorqueMaxNm)
    out.result = TorqueResult::AboveMaximum;
  out.success = out.result == TorqueResult::Ok;
  if (out.success) f->fastened = !f->fastened;
  out.fastened = f->fastened;
  MaintenanceEvent e{"apply_torque", std::string(arm_id), f->id, out.success, std::string(to_string(out.result)), {}};
  e.observations.push_back({"eye_in_hand", std::string(arm_id), 0.0, 0.0});
  e.observations.push_back(seen);
  log_.push_back(std::move(e));
  return out;
}

bool Workcell::tools_conserved() const {
  std::vector<std::string> seen;
  for (const auto& s : slots_)
    if (s) seen.push_back(s->id);
  for (const auto& [_, t] : held_) seen.push_back(t.id);
  std::sort(seen.begin(), seen.end());
  std::vector<std::string> expected = inventory_;
  std::sort(expected.begin(), expected.end());
  return seen == expected;
}

bool Workcell::same_state(const Workcell& other) const {
  auto fasteners_equal = [&] {
    return std::equal(fasteners_.begin(), fasteners_.end(), other.fasteners_.begin(), other.fasteners_.end(),
                      [](const Fastener& a, const Fastener& b) { return a.id == b.id && a.fastened == b.fastened; });
  };
  return assembly_ == other.assembly_ && slots_ == other.slots_ && held_ == other.held_ &&
         lid_open_ == other.lid_open_ && fasteners_equal();
}

}  // namespace mim
