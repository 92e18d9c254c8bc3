#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "scb/boost/evaluate.hpp"
#include "scb/session/protocol.hpp"
#include "scb/session/session.hpp"

namespace scb::session {

// Session service schema. Bump the minor version for additive changes and the
// major version for anything a client could misread.
constexpr const char* kSchemaVersion = "1.0";

using Json = nlohmann::ordered_json;

Json hello_message(const Snapshot& s);
Json state_message(const Snapshot& s);
Json cue_message(const Cue& c, double fs);
Json trial_result_message(const TrialRecord& r);
Json summary_message(const ProtocolSummary& s, const std::optional<boost::EvalReport>& report);
Json error_message(const std::string& what);

struct ClientMessage {
  enum class Kind { SetMode, StartProtocol, Stop } kind = Kind::Stop;
  Mode mode = Mode::Idle;
  ProtocolSchedule schedule;
};

// Throws InvalidArgument for malformed JSON, unknown types or bad fields.
ClientMessage parse_client_message(std::string_view text);

}  // namespace scb::session
