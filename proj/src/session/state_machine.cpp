#include "scb/session/state_machine.hpp"

#include <algorithm>

#include "scb/common/error.hpp"

namespace scb::session {

Step step_state_machine(const MachineState& s, const GatedDecision& d, int k_debounce) {
  if (k_debounce < 1) throw Error(Errc::InvalidArgument, "debounce count must be >= 1");
  Step out{s, std::nullopt};
  if (!d.accepted()) return out;
  MachineState& n = out.state;
  if (d.raw_label == 1) {
    n.move_streak = std::min(n.move_streak + 1, k_debounce);
    n.rest_streak = 0;
    if (n.move_streak >= k_debounce && n.hand == Hand::Open) {
      n.hand = Hand::Closed;
      out.command = ActuatorCommand{CommandKind::Close, {}};
    }
  } else {
    n.rest_streak = std::min(n.rest_streak + 1, k_debounce);
    n.move_streak = 0;
    if (n.rest_streak >= k_debounce && n.hand == Hand::Closed) {
      n.hand = Hand::Open;
      out.command = ActuatorCommand{CommandKind::Open, {}};
    }
  }
  return out;
}

}  // namespace scb::session
