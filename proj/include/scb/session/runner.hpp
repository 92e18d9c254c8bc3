#pragma once

#include <atomic>
#include <cstdint>
#include <thread>

#include "scb/session/queue.hpp"
#include "scb/session/session.hpp"
#include "scb/session/sources.hpp"

namespace scb::session {

struct StreamOptions {
  std::size_t chunk_frames = 10;   // 40 ms at 250 Hz
  std::size_t queue_capacity = 64;
  // Paced sources release chunks on the wall clock and never wait on the
  // queue. At max speed the producer waits for room instead, and latency is
  // measured from dequeue since nothing really "arrives".
  bool max_speed = false;
};

// Producer thread (source) and consumer thread (session) joined by a bounded
// queue.
class StreamRunner {
 public:
  StreamRunner(Session& session, SampleSource& source, const StreamOptions& opts);
  ~StreamRunner();
  StreamRunner(const StreamRunner&) = delete;
  StreamRunner& operator=(const StreamRunner&) = delete;

  void request_stop();
  void wait();  // until the source is exhausted or stop was requested
  bool finished() const { return consumer_done_.load(); }
  std::uint64_t dropped() const { return queue_.dropped(); }

 private:
  struct Chunk {
    Eigen::MatrixXd frames;
    Clock::time_point arrival;
  };
  void produce();
  void consume();

  Session& session_;
  SampleSource& source_;
  StreamOptions opts_;
  BoundedQueue<Chunk> queue_;
  std::atomic<bool> stop_{false}, consumer_done_{false};
  std::thread producer_, consumer_;
};

// Synchronous protocol run, no threads: starts a protocol and feeds the
// session from the source until the protocol finishes. A source that ends
// early leaves an aborted result.
ProtocolResult run_trial_protocol(Session& session, SampleSource& source, const ProtocolSchedule& schedule,
                                  std::size_t chunk_frames = 25);

}  // namespace scb::session
