#include "scb/session/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "scb/common/error.hpp"

namespace scb::session {

void ProtocolSchedule::validate() const {
  if (trials < 0) throw Error(Errc::InvalidArgument, "trial count must be non-negative");
  if (!(cue_s > 0.0) || !(rest_s > 0.0) || !std::isfinite(cue_s) || !std::isfinite(rest_s))
    throw Error(Errc::InvalidArgument, "cue and rest durations must be positive");
}

std::vector<Cue> make_cues(const ProtocolSchedule& s, std::uint64_t start, double fs, std::uint64_t seed) {
  s.validate();
  std::vector<Label> labels;
  for (int i = 0; i < s.trials; ++i) labels.push_back(i % 2 == 0 ? Label::Move : Label::Rest);
  std::mt19937_64 rng(seed);
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(labels[i - 1], labels[j]);
  }
  const auto cue = static_cast<std::uint64_t>(std::llround(s.cue_s * fs));
  const auto rest = static_cast<std::uint64_t>(std::llround(s.rest_s * fs));
  std::vector<Cue> out;
  std::uint64_t t = start;
  for (int i = 0; i < s.trials; ++i) {
    t += rest;
    out.push_back({i, labels[static_cast<std::size_t>(i)], t, t + cue});
    t += cue;
  }
  return out;
}

ProtocolSummary summarize(const std::vector<TrialRecord>& ledger, int trials, bool aborted) {
  ProtocolSummary s;
  s.trials = trials;
  s.completed = static_cast<int>(ledger.size());
  s.aborted = aborted;
  int correct = 0, moves = 0, rests = 0, tp = 0, fp = 0;
  for (const auto& r : ledger) {
    correct += r.correct;
    if (r.cued == Label::Move) {
      ++moves;
      tp += r.decoded == Label::Move;
    } else {
      ++rests;
      fp += r.decoded == Label::Move;
    }
  }
  if (!ledger.empty()) s.accuracy = static_cast<double>(correct) / static_cast<double>(ledger.size());
  if (moves > 0) s.tp_rate = static_cast<double>(tp) / moves;
  if (rests > 0) s.fp_rate = static_cast<double>(fp) / rests;
  return s;
}

boost::EvalReport protocol_report(const std::vector<TrialRecord>& ledger) {
  if (ledger.empty()) throw Error(Errc::EmptyInput, "no completed trials");
  std::vector<int> preds, labels, trials;
  for (const auto& r : ledger) {
    preds.push_back(r.decoded == Label::Move);
    labels.push_back(r.cued == Label::Move);
    trials.push_back(r.trial);
  }
  auto report = boost::evaluate(preds, labels, boost::Level::Trial, &trials);
  report.classifier = "adaboost";
  return report;
}

void IntentSchedule::set(std::vector<Cue> cues) {
  std::lock_guard lock(mu_);
  cues_ = std::move(cues);
}

void IntentSchedule::clear() {
  std::lock_guard lock(mu_);
  cues_.clear();
}

Label IntentSchedule::at(std::uint64_t sample) const {
  std::lock_guard lock(mu_);
  for (const auto& c : cues_)
    if (c.start <= sample && sample < c.end) return c.label;
  return Label::Rest;
}

void IntentSchedule::note_rendered(std::uint64_t sample) {
  std::lock_guard lock(mu_);
  rendered_ = std::max(rendered_, sample);
}

std::uint64_t IntentSchedule::rendered() const {
  std::lock_guard lock(mu_);
  return rendered_;
}

}  // namespace scb::session
