#pragma once

#include <memory>
#include <string>

#include "scb/session/session.hpp"

namespace scb::session {

// WebSocket endpoint for the operator console. Each client gets a hello
// message, state messages at `state_hz`, and every session event; text
// frames from clients are parsed as set_mode / start_protocol / stop.
// Invalid client messages are answered with an error message.
class SessionServer {
 public:
  // port 0 picks a free port. Throws Io if the address cannot be bound.
  SessionServer(Session& session, const std::string& address, unsigned short port, double state_hz = 10.0);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;
  std::size_t clients() const;
  void stop();

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// "host:port" -> (host, port). Throws InvalidArgument.
std::pair<std::string, unsigned short> parse_endpoint(const std::string& s);

}  // namespace scb::session
