#include "scb/session/sources.hpp"

#include <algorithm>
#include <cmath>

#include "scb/data/pipeline.hpp"

namespace scb::session {

ReplaySource::ReplaySource(const Recording& rec) : rec_(data::conform_recording(rec)) {}

Eigen::MatrixXd ReplaySource::next(std::size_t max_frames) {
  const std::uint64_t n = std::min<std::uint64_t>(max_frames, rec_.n_samples() - pos_);
  Eigen::MatrixXd out = rec_.data.middleCols(static_cast<Eigen::Index>(pos_), static_cast<Eigen::Index>(n));
  pos_ += n;
  return out;
}

SynthLiveSource::SynthLiveSource(const data::SynthConfig& cfg, std::uint64_t seed,
                                 std::shared_ptr<IntentSchedule> intent, std::optional<double> duration_s)
    : synth_(cfg, seed), intent_(std::move(intent)) {
  if (!intent_) intent_ = std::make_shared<IntentSchedule>();
  if (duration_s) limit_ = static_cast<std::uint64_t>(std::llround(*duration_s * cfg.fs));
}

Eigen::MatrixXd SynthLiveSource::next(std::size_t max_frames) {
  std::uint64_t n = max_frames;
  if (limit_) n = std::min<std::uint64_t>(n, *limit_ - std::min(*limit_, synth_.position()));
  if (n > 0) intent_->note_rendered(synth_.position() + n);
  return synth_.render(static_cast<std::size_t>(n), [&](std::uint64_t t) { return intent_->at(t); });
}

}  // namespace scb::session
