#include "mim/error.hpp"

namespace mim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownPatch: return "UnknownPatch";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::UnknownPort: return "UnknownPort";
    case ErrorCode::PortBusy: return "PortBusy";
    case ErrorCode::SelfCoupling: return "SelfCoupling";
    case ErrorCode::NotCoupled: return "NotCoupled";
    case ErrorCode::AlreadyFull: return "AlreadyFull";
    case ErrorCode::FixtureOccupied: return "FixtureOccupied";
    case ErrorCode::WouldDetachAssembly: return "WouldDetachAssembly";
    case ErrorCode::Unrecognized: return "Unrecognized";
    case ErrorCode::UnanchoredAssembly: return "UnanchoredAssembly";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::IllegalStep: return "IllegalStep";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotInView: return "NotInView";
    case ErrorCode::NoReachableSurface: return "NoReachableSurface";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::NoArmOnToolPort: return "NoArmOnToolPort";
    case ErrorCode::EmptySlot: return "EmptySlot";
    case ErrorCode::LidClosed: return "LidClosed";
    case ErrorCode::NothingHeld: return "NothingHeld";
    case ErrorCode::SlotOccupied: return "SlotOccupied";
    case ErrorCode::ArmOccupied: return "ArmOccupied";
    case ErrorCode::WrongTool: return "WrongTool";
    case ErrorCode::NotObserved: return "NotObserved";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mim
