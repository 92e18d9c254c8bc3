#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace scb::session {

enum class Mode { Active, Passive, Idle };
enum class Hand { Open, Closed, Moving };
enum class Gate { Accepted, LowConfidence, Artifact };

const char* mode_name(Mode m);
const char* hand_name(Hand h);
const char* gate_name(Gate g);
Mode parse_mode(std::string_view s);  // throws InvalidArgument

struct GatedDecision {
  int raw_label = 0;  // 1 = move
  double margin = 0.0;
  Gate gate = Gate::Artifact;
  std::size_t start_sample = 0, end_sample = 0;  // window [start, end) in stream samples
  double start_s = 0.0, end_s = 0.0;
  double latency_ms = 0.0;  // last-sample arrival to emission
  double cpu_s = 0.0;       // decode-thread CPU time since the previous decision

  bool accepted() const { return gate == Gate::Accepted; }
};

}  // namespace scb::session
