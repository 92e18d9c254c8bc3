#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>

#include "scb/data/synthetic.hpp"
#include "scb/dsp/recording.hpp"
#include "scb/session/protocol.hpp"

namespace scb::session {

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  // Up to max_frames next frames [12 x k], decoder channel order at 250 Hz;
  // zero columns at end of stream.
  virtual Eigen::MatrixXd next(std::size_t max_frames) = 0;
  virtual std::uint64_t position() const = 0;
};

// Plays a recording back after conforming it to the decoder montage.
class ReplaySource : public SampleSource {
 public:
  explicit ReplaySource(const Recording& rec);
  Eigen::MatrixXd next(std::size_t max_frames) override;
  std::uint64_t position() const override { return pos_; }
  const Recording& recording() const { return rec_; }

 private:
  Recording rec_;
  std::uint64_t pos_ = 0;
};

// Live synthetic subject following the intent schedule; endless unless a
// duration is given.
class SynthLiveSource : public SampleSource {
 public:
  SynthLiveSource(const data::SynthConfig& cfg, std::uint64_t seed, std::shared_ptr<IntentSchedule> intent,
                  std::optional<double> duration_s = std::nullopt);
  Eigen::MatrixXd next(std::size_t max_frames) override;
  std::uint64_t position() const override { return synth_.position(); }

 private:
  data::LiveSynth synth_;
  std::shared_ptr<IntentSchedule> intent_;
  std::optional<std::uint64_t> limit_;
};

}  // namespace scb::session
