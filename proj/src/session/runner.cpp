#include "scb/session/runner.hpp"

#include "scb/common/error.hpp"

namespace scb::session {

StreamRunner::StreamRunner(Session& session, SampleSource& source, const StreamOptions& opts)
    : session_(session), source_(source), opts_(opts), queue_(opts.queue_capacity) {
  if (opts_.chunk_frames == 0) throw Error(Errc::InvalidArgument, "chunk size must be >= 1");
  consumer_ = std::thread([this] { consume(); });
  producer_ = std::thread([this] { produce(); });
}

StreamRunner::~StreamRunner() {
  request_stop();
  wait();
}

void StreamRunner::request_stop() {
  stop_ = true;
  queue_.close();
}

void StreamRunner::wait() {
  if (producer_.joinable()) producer_.join();
  if (consumer_.joinable()) consumer_.join();
}

void StreamRunner::produce() {
  const double fs = kDecoderRateHz;
  const auto t0 = Clock::now();
  while (!stop_) {
    Eigen::MatrixXd frames = source_.next(opts_.chunk_frames);
    if (frames.cols() == 0) break;
    if (opts_.max_speed) {
      if (!queue_.push_wait({std::move(frames), Clock::now()})) break;
      continue;
    }
    const auto due = t0 + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(static_cast<double>(source_.position()) / fs));
    std::this_thread::sleep_until(due);
    queue_.push({std::move(frames), Clock::now()});
  }
  queue_.close();
}

void StreamRunner::consume() {
  while (true) {
    auto chunk = queue_.pop(std::chrono::milliseconds(100));
    if (!chunk) {
      if (queue_.closed_and_empty()) break;
      continue;
    }
    session_.set_dropped(queue_.dropped());
    session_.feed(chunk->frames, opts_.max_speed ? Clock::now() : chunk->arrival);
  }
  consumer_done_ = true;
}

ProtocolResult run_trial_protocol(Session& session, SampleSource& source, const ProtocolSchedule& schedule,
                                  std::size_t chunk_frames) {
  if (chunk_frames == 0) throw Error(Errc::InvalidArgument, "chunk size must be >= 1");
  session.start_protocol(schedule);
  while (session.protocol_running()) {
    Eigen::MatrixXd frames = source.next(chunk_frames);
    if (frames.cols() == 0) {
      session.stop();
      break;
    }
    session.feed(frames);
  }
  return *session.last_protocol();
}

}  // namespace scb::session
