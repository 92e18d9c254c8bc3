#include "scb/session/engine.hpp"

#include <ctime>

#include "scb/common/error.hpp"

namespace scb::session {

double thread_cpu_seconds() {
  timespec ts{};
  ::clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

RingBuffer::RingBuffer(std::size_t channels, std::size_t capacity)
    : buf_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(capacity))) {
  if (capacity == 0) throw Error(Errc::InvalidArgument, "ring capacity must be >= 1");
}

void RingBuffer::push(const double* frame) {
  buf_.col(static_cast<Eigen::Index>(head_)) = Eigen::Map<const Eigen::VectorXd>(frame, buf_.rows());
  head_ = (head_ + 1) % capacity();
  if (size_ < capacity()) ++size_;
}

void RingBuffer::latest(std::size_t n, Eigen::MatrixXd& out) const {
  if (n > size_) throw Error(Errc::InvalidArgument, "ring holds fewer frames than requested");
  out.resize(buf_.rows(), static_cast<Eigen::Index>(n));
  const std::size_t cap = capacity();
  const std::size_t first = (head_ + cap - n) % cap;
  const std::size_t tail = std::min(n, cap - first);
  out.leftCols(static_cast<Eigen::Index>(tail)) =
      buf_.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(tail));
  if (tail < n) out.rightCols(static_cast<Eigen::Index>(n - tail)) = buf_.leftCols(static_cast<Eigen::Index>(n - tail));
}

namespace {

Eigen::MatrixXd spatial_or_identity(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return Eigen::MatrixXd::Identity(kWindowChannels, kWindowChannels);
  if (m.rows() != static_cast<Eigen::Index>(kWindowChannels) || m.cols() != static_cast<Eigen::Index>(kWindowChannels))
    throw Error(Errc::InvalidArgument, "spatial matrix must be 12 x 12");
  return m;
}

}  // namespace

DecodeEngine::DecodeEngine(std::shared_ptr<const data::DecoderModel> model, const EngineConfig& cfg,
                           const Eigen::MatrixXd& spatial)
    : model_(std::move(model)),
      cfg_(cfg),
      proc_(spatial_or_identity(spatial), data::design_band(model_->config)),
      ring_(kWindowChannels, model_->config.window),
      frame_out_(kWindowChannels) {
  if (cfg_.stride == 0) throw Error(Errc::InvalidArgument, "stride must be >= 1");
  if ((cfg_.backend == data::Backend::Int8 || cfg_.backend == data::Backend::Fp16) &&
      (!model_->quantized || (model_->quantized->mode == cae::Precision::Int8) !=
                                 (cfg_.backend == data::Backend::Int8)))
    throw Error(Errc::InvalidArgument, std::string("model has no ") + data::backend_name(cfg_.backend) + " parameters");
}

void DecodeEngine::reset() {
  proc_.reset();
  ring_ = RingBuffer(kWindowChannels, model_->config.window);
  n_ = 0;
  pending_cpu_ = 0.0;
}

std::vector<GatedDecision> DecodeEngine::push_samples(const Eigen::MatrixXd& chunk, Clock::time_point arrival) {
  if (chunk.rows() != static_cast<Eigen::Index>(kWindowChannels))
    throw Error(Errc::InvalidArgument, "chunk must have 12 rows");
  if (chunk.cols() < 1) throw Error(Errc::InvalidArgument, "chunk must hold at least one frame");
  std::vector<GatedDecision> out;
  const std::size_t win = model_->config.window;
  const double fs = model_->config.band.fs;
  double cpu_mark = thread_cpu_seconds();
  for (Eigen::Index t = 0; t < chunk.cols(); ++t) {
    proc_.process(chunk.col(t).data(), frame_out_.data());
    ring_.push(frame_out_.data());
    ++n_;
    if (n_ < win || (n_ - win) % cfg_.stride != 0) continue;

    GatedDecision d;
    d.end_sample = static_cast<std::size_t>(n_);
    d.start_sample = d.end_sample - win;
    d.start_s = static_cast<double>(d.start_sample) / fs;
    d.end_s = static_cast<double>(d.end_sample) / fs;
    ring_.latest(win, window_);
    if (gate_window(window_, cfg_.gate) == Gate::Artifact) {
      d.gate = Gate::Artifact;
    } else {
      const auto p = model_->decide(window_, cfg_.backend);
      d.raw_label = p.label;
      d.margin = p.margin;
      d.gate = std::abs(p.margin) < cfg_.gate.theta ? Gate::LowConfidence : Gate::Accepted;
    }
    const double now_cpu = thread_cpu_seconds();
    d.cpu_s = pending_cpu_ + (now_cpu - cpu_mark);
    pending_cpu_ = 0.0;
    cpu_mark = now_cpu;
    d.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - arrival).count();
    out.push_back(d);
  }
  pending_cpu_ += thread_cpu_seconds() - cpu_mark;
  return out;
}

}  // namespace scb::session
