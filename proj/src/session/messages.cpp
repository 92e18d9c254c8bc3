#include "scb/session/messages.hpp"

#include "scb/common/error.hpp"

namespace scb::session {

Json hello_message(const Snapshot& s) {
  Json j;
  j["type"] = "hello";
  j["schema_version"] = kSchemaVersion;
  j["mode"] = mode_name(s.mode);
  j["hand"] = hand_name(s.hand);
  return j;
}

Json state_message(const Snapshot& s) {
  Json j;
  j["type"] = "state";
  j["hand"] = hand_name(s.hand);
  j["mode"] = mode_name(s.mode);
  j["margin"] = s.margin;
  j["gate"] = gate_name(s.gate);
  j["latency_ms"] = s.latency_ms;
  j["move_streak"] = s.move_streak;
  j["rest_streak"] = s.rest_streak;
  j["seq"] = s.seq;
  j["samples"] = s.samples;
  j["decisions"] = s.decisions;
  j["dropped"] = s.dropped_chunks;
  j["protocol"] = s.protocol_running ? "running" : "idle";
  j["trial"] = s.trial;
  return j;
}

Json cue_message(const Cue& c, double fs) {
  Json j;
  j["type"] = "cue";
  j["trial"] = c.trial;
  j["label"] = label_name(c.label);
  j["start_s"] = static_cast<double>(c.start) / fs;
  j["duration_s"] = static_cast<double>(c.end - c.start) / fs;
  return j;
}

Json trial_result_message(const TrialRecord& r) {
  Json j;
  j["type"] = "trial_result";
  j["trial"] = r.trial;
  j["cued"] = label_name(r.cued);
  j["decoded"] = label_name(r.decoded);
  j["correct"] = r.correct;
  return j;
}

Json summary_message(const ProtocolSummary& s, const std::optional<boost::EvalReport>& report) {
  Json j;
  j["type"] = "summary";
  j["trials"] = s.trials;
  j["completed"] = s.completed;
  j["aborted"] = s.aborted;
  j["accuracy"] = s.accuracy;
  j["tp_rate"] = s.tp_rate;
  j["fp_rate"] = s.fp_rate;
  j["report"] = report ? boost::to_json(*report) : Json(nullptr);
  return j;
}

Json error_message(const std::string& what) {
  Json j;
  j["type"] = "error";
  j["message"] = what;
  return j;
}

namespace {

double positive_number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw Error(Errc::InvalidArgument, std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

}  // namespace

ClientMessage parse_client_message(std::string_view text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::InvalidArgument, "message is not a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) throw Error(Errc::InvalidArgument, "message has no type");
  const auto type = j["type"].get<std::string>();
  ClientMessage m;
  if (type == "set_mode") {
    if (!j.contains("mode") || !j["mode"].is_string()) throw Error(Errc::InvalidArgument, "set_mode needs a mode");
    m.kind = ClientMessage::Kind::SetMode;
    m.mode = parse_mode(j["mode"].get<std::string>());
  } else if (type == "start_protocol") {
    m.kind = ClientMessage::Kind::StartProtocol;
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer()) throw Error(Errc::InvalidArgument, "'trials' must be an integer");
      m.schedule.trials = j["trials"].get<int>();
    }
    m.schedule.cue_s = positive_number(j, "cue_s", m.schedule.cue_s);
    m.schedule.rest_s = positive_number(j, "rest_s", m.schedule.rest_s);
    m.schedule.validate();
  } else if (type == "stop") {
    m.kind = ClientMessage::Kind::Stop;
  } else {
    throw Error(Errc::InvalidArgument, "unknown message type '" + type + "'");
  }
  return m;
}

}  // namespace scb::session
