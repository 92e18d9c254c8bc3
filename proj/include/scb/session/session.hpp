#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scb/session/actuator.hpp"
#include "scb/session/engine.hpp"
#include "scb/session/latency.hpp"
#include "scb/session/protocol.hpp"
#include "scb/session/state_machine.hpp"

namespace scb::session {

struct SessionConfig {
  EngineConfig engine;
  int k_debounce = 3;
  double passive_period_s = 4.0;  // one full close/open cycle
  double device_watts = kDefaultDeviceWatts;
  std::uint64_t seed = 7;         // cue order
};

struct CommandRecord {
  std::uint64_t seq = 0;
  CommandKind kind = CommandKind::Open;
  std::uint64_t sample = 0;  // stream position when emitted
  Mode mode = Mode::Active;
  std::optional<GatedDecision> decision;  // the decision that triggered it (active mode)
};

// Read-consistent view for the service.
struct Snapshot {
  Mode mode = Mode::Idle;
  Hand hand = Hand::Open;  // Moving while the actuator has a command in flight
  int move_streak = 0, rest_streak = 0;
  std::uint64_t seq = 0;   // last issued
  std::uint64_t samples = 0, decisions = 0, dropped_chunks = 0;
  double margin = 0.0, latency_ms = 0.0;
  Gate gate = Gate::Artifact;
  bool protocol_running = false;
  int trial = -1;  // current cue, -1 outside cues
};

struct ProtocolResult {
  std::vector<Cue> cues;
  std::vector<TrialRecord> ledger;
  ProtocolSummary summary;
};

// The decode loop's state. feed() runs on the consumer thread; mode and
// protocol requests and snapshots may come from any thread.
class Session {
 public:
  using Listener = std::function<void(const nlohmann::ordered_json&)>;

  Session(std::shared_ptr<const data::DecoderModel> model, const SessionConfig& cfg,
          std::unique_ptr<ActuatorLink> link = nullptr);

  // Receives cue, trial_result and summary messages on the feeding thread.
  void set_listener(Listener l);

  void set_mode(Mode m);
  // Switches to active mode. Cues start after everything already fed or
  // rendered by a live source. Throws InvalidArgument on a bad schedule or
  // when a protocol is running.
  void start_protocol(const ProtocolSchedule& s);
  // Aborts a running protocol; its partial ledger stays available.
  void stop();

  std::vector<GatedDecision> feed(const Eigen::MatrixXd& chunk, Clock::time_point arrival = Clock::now());
  void set_dropped(std::uint64_t chunks);

  Snapshot snapshot() const;
  bool protocol_running() const;
  std::optional<ProtocolResult> last_protocol() const;
  std::vector<CommandRecord> commands() const;
  std::vector<GatedDecision> decisions() const;
  LatencyStats latency() const;  // throws EmptyTrace

  std::shared_ptr<IntentSchedule> intent() const { return intent_; }
  Actuator& actuator() { return actuator_; }
  const SessionConfig& config() const { return cfg_; }

 private:
  struct Running {
    ProtocolResult result;
    std::size_t next_cue = 0;      // next cue to announce
    std::size_t next_final = 0;    // next cue to score
    std::vector<std::optional<Label>> first_command;
  };

  void emit_command(CommandKind kind, std::uint64_t sample, const std::optional<GatedDecision>& d);
  void advance_protocol(std::uint64_t now, std::vector<nlohmann::ordered_json>& out);
  void finish_protocol(bool aborted, std::vector<nlohmann::ordered_json>& out);

  SessionConfig cfg_;
  DecodeEngine engine_;
  Actuator actuator_;
  std::shared_ptr<IntentSchedule> intent_;

  mutable std::mutex mu_;
  Listener listener_;
  Mode mode_ = Mode::Idle;
  MachineState machine_;
  std::uint64_t seq_ = 0;
  std::uint64_t samples_ = 0;
  std::uint64_t passive_next_ = 0;
  std::uint64_t dropped_ = 0;
  std::optional<Running> running_;
  std::optional<ProtocolResult> last_;
  std::vector<GatedDecision> decisions_;
  std::vector<CommandRecord> commands_;
};

}  // namespace scb::session
