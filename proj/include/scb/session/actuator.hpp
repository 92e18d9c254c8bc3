#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "scb/session/state_machine.hpp"

namespace scb::session {

constexpr double kMaxFingerAngleDeg = 120.0;

// "OPEN <seq>\n", "CLOSE <seq>\n", "SET <seq> a1 a2 a3 a4 a5\n". Angles are
// written in shortest round-trip form. Throws AngleOutOfRange outside [0, 120].
std::string encode_command(const ActuatorCommand& cmd, std::uint64_t seq);

struct ParsedCommand {
  ActuatorCommand command;
  std::uint64_t seq = 0;
};
// Inverse of encode_command; throws InvalidArgument or AngleOutOfRange.
ParsedCommand parse_command(std::string_view line);

struct Ack {
  std::uint64_t seq = 0;
  bool ok = false;
  std::string code;  // ERR only

  bool operator==(const Ack&) const = default;
};
// "ACK <seq>" or "ERR <seq> <code>", optional trailing newline. Throws MalformedAck.
Ack parse_ack(std::string_view line);

// One request/reply exchange over a byte stream.
class ActuatorLink {
 public:
  virtual ~ActuatorLink() = default;
  virtual std::string exchange(const std::string& line) = 0;
};

// In-process endpoint: validates each line and answers after `delay`.
class SimulatedActuator : public ActuatorLink {
 public:
  explicit SimulatedActuator(std::chrono::microseconds delay = std::chrono::microseconds(0));
  std::string exchange(const std::string& line) override;

  std::vector<std::string> received() const;
  std::array<double, 5> posture() const;

 private:
  std::chrono::microseconds delay_;
  mutable std::mutex mu_;
  std::vector<std::string> received_;
  std::array<double, 5> posture_{};
};

// POSIX serial device in raw mode, 8N1. Throws Io on open, write or read
// failure and on reply timeout.
class SerialActuator : public ActuatorLink {
 public:
  SerialActuator(const std::string& device, int baud = 115200,
                 std::chrono::milliseconds timeout = std::chrono::milliseconds(500));
  ~SerialActuator() override;
  SerialActuator(const SerialActuator&) = delete;
  SerialActuator& operator=(const SerialActuator&) = delete;

  std::string exchange(const std::string& line) override;

 private:
  int fd_ = -1;
  std::chrono::milliseconds timeout_;
  std::string pending_;
};

struct ActuatorRecord {
  std::uint64_t seq = 0;
  std::string line;
  std::string reply;
  bool ok = false;
};

// Sole writer to the link. Commands queue without blocking the caller and are
// sent in order from a worker thread.
class Actuator {
 public:
  explicit Actuator(std::unique_ptr<ActuatorLink> link);
  ~Actuator();
  Actuator(const Actuator&) = delete;
  Actuator& operator=(const Actuator&) = delete;

  void submit(const ActuatorCommand& cmd, std::uint64_t seq);
  bool busy() const;
  void wait_idle();
  std::vector<ActuatorRecord> log() const;
  std::size_t errors() const;

 private:
  void run();

  std::unique_ptr<ActuatorLink> link_;
  mutable std::mutex mu_;
  std::condition_variable cv_, idle_cv_;
  std::deque<std::pair<std::uint64_t, std::string>> queue_;
  bool in_flight_ = false, stop_ = false;
  std::vector<ActuatorRecord> log_;
  std::size_t errors_ = 0;
  std::thread worker_;
};

}  // namespace scb::session
