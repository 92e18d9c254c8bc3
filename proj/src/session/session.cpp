#include "scb/session/session.hpp"

#include <algorithm>
#include <cmath>

#include "scb/common/error.hpp"
#include "scb/session/messages.hpp"

namespace scb::session {

namespace {

std::unique_ptr<ActuatorLink> link_or_simulated(std::unique_ptr<ActuatorLink> link) {
  if (!link) return std::make_unique<SimulatedActuator>();
  return link;
}

}  // namespace

Session::Session(std::shared_ptr<const data::DecoderModel> model, const SessionConfig& cfg,
                 std::unique_ptr<ActuatorLink> link)
    : cfg_(cfg),
      engine_(std::move(model), cfg.engine),
      actuator_(link_or_simulated(std::move(link))),
      intent_(std::make_shared<IntentSchedule>()) {
  if (cfg_.k_debounce < 1) throw Error(Errc::InvalidArgument, "debounce count must be >= 1");
  if (!(cfg_.passive_period_s > 0.0)) throw Error(Errc::InvalidArgument, "passive period must be positive");
}

void Session::set_listener(Listener l) {
  std::lock_guard lock(mu_);
  listener_ = std::move(l);
}

void Session::set_mode(Mode m) {
  std::vector<Json> events;
  Listener listener;
  {
    std::lock_guard lock(mu_);
    if (m == mode_) return;
    if (running_ && m != Mode::Active) finish_protocol(true, events);
    mode_ = m;
    machine_.move_streak = machine_.rest_streak = 0;
    if (m == Mode::Passive) {
      const double half = 0.5 * cfg_.passive_period_s * engine_.model().config.band.fs;
      passive_next_ = samples_ + static_cast<std::uint64_t>(std::llround(half));
    }
    listener = listener_;
  }
  if (listener)
    for (const auto& e : events) listener(e);
}

void Session::start_protocol(const ProtocolSchedule& s) {
  s.validate();
  std::vector<Json> events;
  Listener listener;
  {
    std::lock_guard lock(mu_);
    if (running_) throw Error(Errc::InvalidArgument, "a protocol is already running");
    if (mode_ != Mode::Active) {
      mode_ = Mode::Active;
      machine_.move_streak = machine_.rest_streak = 0;
    }
    Running r;
    const std::uint64_t start = std::max(samples_, intent_->rendered());
    r.result.cues = make_cues(s, start, engine_.model().config.band.fs, cfg_.seed);
    r.result.summary.trials = s.trials;
    r.first_command.resize(r.result.cues.size());
    intent_->set(r.result.cues);
    running_ = std::move(r);
    if (s.trials == 0) finish_protocol(false, events);
    listener = listener_;
  }
  if (listener)
    for (const auto& e : events) listener(e);
}

void Session::stop() {
  std::vector<Json> events;
  Listener listener;
  {
    std::lock_guard lock(mu_);
    if (running_) finish_protocol(true, events);
    listener = listener_;
  }
  if (listener)
    for (const auto& e : events) listener(e);
}

void Session::set_dropped(std::uint64_t chunks) {
  std::lock_guard lock(mu_);
  dropped_ = chunks;
}

std::vector<GatedDecision> Session::feed(const Eigen::MatrixXd& chunk, Clock::time_point arrival) {
  auto decided = engine_.push_samples(chunk, arrival);
  std::vector<Json> events;
  Listener listener;
  {
    std::lock_guard lock(mu_);
    samples_ = engine_.samples();
    for (const auto& d : decided) {
      decisions_.push_back(d);
      if (mode_ != Mode::Active) continue;
      const Step step = step_state_machine(machine_, d, cfg_.k_debounce);
      machine_ = step.state;
      if (step.command) emit_command(step.command->kind, d.end_sample, d);
    }
    if (mode_ == Mode::Passive) {
      const auto half = static_cast<std::uint64_t>(
          std::max(1LL, std::llround(0.5 * cfg_.passive_period_s * engine_.model().config.band.fs)));
      while (passive_next_ <= samples_) {
        const CommandKind kind = machine_.hand == Hand::Open ? CommandKind::Close : CommandKind::Open;
        machine_.hand = kind == CommandKind::Close ? Hand::Closed : Hand::Open;
        emit_command(kind, passive_next_, std::nullopt);
        passive_next_ += half;
      }
    }
    advance_protocol(samples_, events);
    listener = listener_;
  }
  if (listener)
    for (const auto& e : events) listener(e);
  return decided;
}

void Session::emit_command(CommandKind kind, std::uint64_t sample, const std::optional<GatedDecision>& d) {
  ++seq_;
  actuator_.submit(ActuatorCommand{kind, {}}, seq_);
  commands_.push_back({seq_, kind, sample, mode_, d});
  if (!running_) return;
  auto& r = *running_;
  for (std::size_t i = r.next_final; i < r.result.cues.size(); ++i) {
    const Cue& c = r.result.cues[i];
    if (sample < c.start) break;
    if (sample < c.end && !r.first_command[i])
      r.first_command[i] = kind == CommandKind::Close ? Label::Move : Label::Rest;
  }
}

void Session::advance_protocol(std::uint64_t now, std::vector<Json>& out) {
  if (!running_) return;
  auto& r = *running_;
  const double fs = engine_.model().config.band.fs;
  while (r.next_cue < r.result.cues.size() && r.result.cues[r.next_cue].start <= now)
    out.push_back(cue_message(r.result.cues[r.next_cue++], fs));
  while (r.next_final < r.result.cues.size() && r.result.cues[r.next_final].end <= now) {
    const Cue& c = r.result.cues[r.next_final];
    TrialRecord rec;
    rec.trial = c.trial;
    rec.cued = c.label;
    rec.decoded = r.first_command[r.next_final].value_or(Label::Rest);
    rec.correct = rec.cued == rec.decoded;
    r.result.ledger.push_back(rec);
    out.push_back(trial_result_message(rec));
    ++r.next_final;
  }
  if (r.next_final == r.result.cues.size()) finish_protocol(false, out);
}

void Session::finish_protocol(bool aborted, std::vector<Json>& out) {
  auto& r = *running_;
  r.result.summary = summarize(r.result.ledger, static_cast<int>(r.result.cues.size()), aborted);
  std::optional<boost::EvalReport> report;
  if (!r.result.ledger.empty()) report = protocol_report(r.result.ledger);
  out.push_back(summary_message(r.result.summary, report));
  last_ = std::move(r.result);
  running_.reset();
  intent_->clear();
}

Snapshot Session::snapshot() const {
  std::lock_guard lock(mu_);
  Snapshot s;
  s.mode = mode_;
  s.hand = actuator_.busy() ? Hand::Moving : machine_.hand;
  s.move_streak = machine_.move_streak;
  s.rest_streak = machine_.rest_streak;
  s.seq = seq_;
  s.samples = samples_;
  s.decisions = decisions_.size();
  s.dropped_chunks = dropped_;
  if (!decisions_.empty()) {
    s.margin = decisions_.back().margin;
    s.gate = decisions_.back().gate;
    s.latency_ms = decisions_.back().latency_ms;
  }
  s.protocol_running = running_.has_value();
  if (running_)
    for (const auto& c : running_->result.cues)
      if (c.start <= samples_ && samples_ < c.end) s.trial = c.trial;
  return s;
}

bool Session::protocol_running() const {
  std::lock_guard lock(mu_);
  return running_.has_value();
}

std::optional<ProtocolResult> Session::last_protocol() const {
  std::lock_guard lock(mu_);
  return last_;
}

std::vector<CommandRecord> Session::commands() const {
  std::lock_guard lock(mu_);
  return commands_;
}

std::vector<GatedDecision> Session::decisions() const {
  std::lock_guard lock(mu_);
  return decisions_;
}

LatencyStats Session::latency() const {
  std::lock_guard lock(mu_);
  std::vector<double> ms, cpu;
  for (const auto& d : decisions_) {
    ms.push_back(d.latency_ms);
    cpu.push_back(d.cpu_s);
  }
  return measure(ms, cpu, cfg_.device_watts, peak_rss_bytes());
}

}  // namespace scb::session
