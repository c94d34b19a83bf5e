#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mim {

/// Failure categories raised by the simulator. Each operation documents the
/// subset it can produce.
enum class ErrorCode {
  InvalidArgument,
  // scene
  UnknownPatch,
  OutOfBounds,
  // interconnect
  UnknownModule,
  UnknownPort,
  PortBusy,
  SelfCoupling,
  NotCoupled,
  AlreadyFull,
  FixtureOccupied,
  WouldDetachAssembly,
  Unrecognized,
  UnanchoredAssembly,
  // locomotion
  UnknownFixture,
  InvalidStart,
  NoPath,
  IllegalStep,
  // sensors
  NonPositiveDistance,
  OutOfRange,
  NotInView,
  // inspection
  NoReachableSurface,
  EmptyCloud,
  // maintenance
  NoArmOnToolPort,
  EmptySlot,
  LidClosed,
  NothingHeld,
  SlotOccupied,
  ArmOccupied,
  WrongTool,
  NotObserved,
  // runner
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace mim
