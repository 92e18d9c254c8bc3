#include "scb/session/actuator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstring>

#include "scb/common/error.hpp"

namespace scb::session {

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t sp = line.find(' ', pos);
    const std::size_t end = sp == std::string_view::npos ? line.size() : sp;
    out.push_back(line.substr(pos, end - pos));
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  return out;
}

bool parse_u64(std::string_view s, std::uint64_t& v) {
  if (s.empty()) return false;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

void check_angle(double a) {
  if (!(a >= 0.0 && a <= kMaxFingerAngleDeg))
    throw Error(Errc::AngleOutOfRange, "finger angle must lie in [0, 120] degrees");
}

}  // namespace

std::string encode_command(const ActuatorCommand& cmd, std::uint64_t seq) {
  switch (cmd.kind) {
    case CommandKind::Open: return "OPEN " + std::to_string(seq) + "\n";
    case CommandKind::Close: return "CLOSE " + std::to_string(seq) + "\n";
    case CommandKind::Set: break;
  }
  std::string out = "SET " + std::to_string(seq);
  char buf[32];
  for (double a : cmd.angles) {
    check_angle(a);
    const auto r = std::to_chars(buf, buf + sizeof buf, a == 0.0 ? 0.0 : a);
    out += ' ';
    out.append(buf, r.ptr);
  }
  return out + "\n";
}

ParsedCommand parse_command(std::string_view line) {
  const auto tok = split_tokens(line);
  ParsedCommand out;
  auto bad = [&] { return Error(Errc::InvalidArgument, "malformed actuator command '" + std::string(line) + "'"); };
  if (tok.size() < 2 || !parse_u64(tok[1], out.seq)) throw bad();
  if (tok[0] == "OPEN" && tok.size() == 2) {
    out.command.kind = CommandKind::Open;
  } else if (tok[0] == "CLOSE" && tok.size() == 2) {
    out.command.kind = CommandKind::Close;
  } else if (tok[0] == "SET" && tok.size() == 7) {
    out.command.kind = CommandKind::Set;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto s = tok[2 + i];
      double a = 0.0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), a);
      if (s.empty() || ec != std::errc() || p != s.data() + s.size()) throw bad();
      check_angle(a);
      out.command.angles[i] = a;
    }
  } else {
    throw bad();
  }
  return out;
}

Ack parse_ack(std::string_view line) {
  const auto tok = split_tokens(line);
  Ack ack;
  auto bad = [&] { return Error(Errc::MalformedAck, "unrecognised reply '" + std::string(line) + "'"); };
  if (tok.size() < 2 || !parse_u64(tok[1], ack.seq)) throw bad();
  if (tok[0] == "ACK" && tok.size() == 2) {
    ack.ok = true;
  } else if (tok[0] == "ERR" && tok.size() == 3 && !tok[2].empty()) {
    ack.code = std::string(tok[2]);
  } else {
    throw bad();
  }
  return ack;
}

SimulatedActuator::SimulatedActuator(std::chrono::microseconds delay) : delay_(delay) {}

std::string SimulatedActuator::exchange(const std::string& line) {
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  std::lock_guard lock(mu_);
  received_.push_back(line);
  try {
    const auto cmd = parse_command(line);
    switch (cmd.command.kind) {
      case CommandKind::Open: posture_.fill(0.0); break;
      case CommandKind::Close: posture_.fill(kMaxFingerAngleDeg); break;
      case CommandKind::Set: posture_ = cmd.command.angles; break;
    }
    return "ACK " + std::to_string(cmd.seq) + "\n";
  } catch (const Error& e) {
    std::uint64_t seq = 0;
    const auto tok = split_tokens(line);
    if (tok.size() > 1) parse_u64(tok[1], seq);
    return "ERR " + std::to_string(seq) + (e.code() == Errc::AngleOutOfRange ? " RANGE\n" : " PARSE\n");
  }
}

std::vector<std::string> SimulatedActuator::received() const {
  std::lock_guard lock(mu_);
  return received_;
}

std::array<double, 5> SimulatedActuator::posture() const {
  std::lock_guard lock(mu_);
  return posture_;
}

namespace {

speed_t baud_constant(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    case 230400: return B230400;
    default: throw Error(Errc::InvalidArgument, "unsupported baud rate " + std::to_string(baud));
  }
}

}  // namespace

SerialActuator::SerialActuator(const std::string& device, int baud, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const speed_t speed = baud_constant(baud);
  fd_ = ::open(device.c_str(), O_RDWR | O_NOCTTY | O_CLOEXEC);
  if (fd_ < 0) throw Error(Errc::Io, "cannot open " + device + ": " + std::strerror(errno));
  termios tio{};
  if (::tcgetattr(fd_, &tio) == 0) {
    ::cfmakeraw(&tio);
    ::cfsetispeed(&tio, speed);
    ::cfsetospeed(&tio, speed);
    tio.c_cflag |= CLOCAL | CREAD;
    ::tcsetattr(fd_, TCSANOW, &tio);
  }
}

SerialActuator::~SerialActuator() {
  if (fd_ >= 0) ::close(fd_);
}

std::string SerialActuator::exchange(const std::string& line) {
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t w = ::write(fd_, line.data() + off, line.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::Io, std::string("serial write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(w);
  }
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = pending_.substr(0, nl + 1);
      pending_.erase(0, nl + 1);
      return reply;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Error(Errc::Io, "actuator reply timed out");
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0 && errno != EINTR) throw Error(Errc::Io, std::string("serial poll failed: ") + std::strerror(errno));
    if (r <= 0) continue;
    char buf[256];
    const ssize_t n = ::read(fd_, buf, sizeof buf);
    if (n < 0 && errno != EINTR && errno != EAGAIN)
      throw Error(Errc::Io, std::string("serial read failed: ") + std::strerror(errno));
    if (n == 0) throw Error(Errc::Io, "serial device closed");
    if (n > 0) pending_.append(buf, static_cast<std::size_t>(n));
  }
}

Actuator::Actuator(std::unique_ptr<ActuatorLink> link) : link_(std::move(link)), worker_([this] { run(); }) {}

Actuator::~Actuator() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void Actuator::submit(const ActuatorCommand& cmd, std::uint64_t seq) {
  std::string line = encode_command(cmd, seq);
  {
    std::lock_guard lock(mu_);
    queue_.emplace_back(seq, std::move(line));
  }
  cv_.notify_one();
}

bool Actuator::busy() const {
  std::lock_guard lock(mu_);
  return in_flight_ || !queue_.empty();
}

void Actuator::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return !in_flight_ && queue_.empty(); });
}

std::vector<ActuatorRecord> Actuator::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t Actuator::errors() const {
  std::lock_guard lock(mu_);
  return errors_;
}

void Actuator::run() {
  std::unique_lock lock(mu_);
  while (true) {
    cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
    if (queue_.empty()) return;
    auto [seq, line] = std::move(queue_.front());
    queue_.pop_front();
    in_flight_ = true;
    lock.unlock();
    ActuatorRecord rec{seq, line, {}, false};
    try {
      rec.reply = link_->exchange(line);
      const Ack ack = parse_ack(rec.reply);
      rec.ok = ack.ok && ack.seq == seq;
    } catch (const Error& e) {
      rec.reply = e.what();
    }
    lock.lock();
    if (!rec.ok) ++errors_;
    log_.push_back(std::move(rec));
    in_flight_ = false;
    if (queue_.empty()) idle_cv_.notify_all();
  }
}

}  // namespace scb::session
