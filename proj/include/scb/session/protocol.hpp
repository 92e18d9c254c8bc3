#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "scb/boost/evaluate.hpp"
#include "scb/dsp/recording.hpp"

namespace scb::session {

struct ProtocolSchedule {
  int trials = 15;
  double cue_s = 4.0;
  double rest_s = 3.0;

  void validate() const;  // InvalidArgument for negative trials or durations <= 0
};

struct Cue {
  int trial = 0;  // 0-based
  Label label = Label::Rest;
  std::uint64_t start = 0, end = 0;  // stream samples

  bool operator==(const Cue&) const = default;
};

// rest_s gap, then a cue of cue_s, per trial, starting at `start`. Labels are
// a seeded shuffle of ceil(n/2) move and floor(n/2) rest cues.
std::vector<Cue> make_cues(const ProtocolSchedule& s, std::uint64_t start, double fs, std::uint64_t seed);

struct TrialRecord {
  int trial = 0;
  Label cued = Label::Rest;
  Label decoded = Label::Rest;  // first debounced command in the cue window; none is rest
  bool correct = false;

  bool operator==(const TrialRecord&) const = default;
};

struct ProtocolSummary {
  int trials = 0, completed = 0;
  bool aborted = false;
  double accuracy = 0.0;
  double tp_rate = 0.0;  // move cues decoded as move
  double fp_rate = 0.0;  // rest cues decoded as move
};

ProtocolSummary summarize(const std::vector<TrialRecord>& ledger, int trials, bool aborted);

// Trial-level report over the ledger; throws EmptyInput when it is empty.
boost::EvalReport protocol_report(const std::vector<TrialRecord>& ledger);

// Movement intent per stream sample for live sources, shared between the
// session (writer) and the generator thread (reader).
class IntentSchedule {
 public:
  void set(std::vector<Cue> cues);
  void clear();
  Label at(std::uint64_t sample) const;
  // Highest sample a source has rendered so far; cues must start after it.
  void note_rendered(std::uint64_t sample);
  std::uint64_t rendered() const;

 private:
  mutable std::mutex mu_;
  std::vector<Cue> cues_;
  std::uint64_t rendered_ = 0;
};

}  // namespace scb::session
