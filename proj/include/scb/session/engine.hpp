#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "scb/data/pipeline.hpp"
#include "scb/session/gate.hpp"
#include "scb/session/types.hpp"

namespace scb::session {

using Clock = std::chrono::steady_clock;

// Fixed-capacity ring of filtered frames.
class RingBuffer {
 public:
  RingBuffer(std::size_t channels, std::size_t capacity);

  void push(const double* frame);
  // Most recent n frames in time order, [channels x n]. Requires n <= size().
  void latest(std::size_t n, Eigen::MatrixXd& out) const;
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return static_cast<std::size_t>(buf_.cols()); }

 private:
  Eigen::MatrixXd buf_;
  std::size_t head_ = 0, size_ = 0;
};

struct EngineConfig {
  std::size_t stride = 125;
  GateConfig gate;
  data::Backend backend = data::Backend::Float;
};

// Streaming decoder: each frame goes through the shared FrameProcessor into
// the ring; every stride boundary after the first full window yields one
// gated decision. Artifact windows skip the encoder (label 0, margin 0).
class DecodeEngine {
 public:
  // `spatial` defaults to identity (no ICA on the live path).
  DecodeEngine(std::shared_ptr<const data::DecoderModel> model, const EngineConfig& cfg,
               const Eigen::MatrixXd& spatial = Eigen::MatrixXd());

  // chunk is [12 x k], k >= 1, in decoder channel order at 250 Hz.
  std::vector<GatedDecision> push_samples(const Eigen::MatrixXd& chunk, Clock::time_point arrival = Clock::now());

  void reset();
  std::uint64_t samples() const { return n_; }
  const EngineConfig& config() const { return cfg_; }
  const data::DecoderModel& model() const { return *model_; }

 private:
  std::shared_ptr<const data::DecoderModel> model_;
  EngineConfig cfg_;
  data::FrameProcessor proc_;
  RingBuffer ring_;
  Eigen::MatrixXd window_;
  std::vector<double> frame_out_;
  std::uint64_t n_ = 0;
  double pending_cpu_ = 0.0;
};

double thread_cpu_seconds();

}  // namespace scb::session
