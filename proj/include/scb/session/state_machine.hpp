#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "scb/session/types.hpp"

namespace scb::session {

enum class CommandKind { Open, Close, Set };

struct ActuatorCommand {
  CommandKind kind = CommandKind::Open;
  std::array<double, 5> angles{};  // degrees, SET only

  bool operator==(const ActuatorCommand&) const = default;
};

// Debounce state of the decoder-driven hand. `hand` is the commanded posture
// (open or closed); whether the actuator has finished moving is tracked by the
// session, not here.
struct MachineState {
  Hand hand = Hand::Open;
  int move_streak = 0;
  int rest_streak = 0;
};

struct Step {
  MachineState state;
  std::optional<ActuatorCommand> command;
};

// Accepted decisions extend their class's streak and clear the other; gated
// decisions leave both untouched. A streak of k on the opposite posture emits
// exactly one command. Streaks saturate at k. Throws InvalidArgument for k < 1.
Step step_state_machine(const MachineState& s, const GatedDecision& d, int k_debounce);

}  // namespace scb::session
