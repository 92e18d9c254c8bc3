#include "scb/session/gate.hpp"

#include <cmath>

#include "scb/common/error.hpp"

namespace scb::session {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Active: return "active";
    case Mode::Passive: return "passive";
    case Mode::Idle: return "idle";
  }
  return "idle";
}

const char* hand_name(Hand h) {
  switch (h) {
    case Hand::Open: return "open";
    case Hand::Closed: return "closed";
    case Hand::Moving: return "moving";
  }
  return "open";
}

const char* gate_name(Gate g) {
  switch (g) {
    case Gate::Accepted: return "accepted";
    case Gate::LowConfidence: return "low_confidence";
    case Gate::Artifact: return "artifact";
  }
  return "artifact";
}

Mode parse_mode(std::string_view s) {
  if (s == "active") return Mode::Active;
  if (s == "passive") return Mode::Passive;
  if (s == "idle") return Mode::Idle;
  throw Error(Errc::InvalidArgument, "unknown mode '" + std::string(s) + "'");
}

Gate gate_window(const Eigen::MatrixXd& window, const GateConfig& cfg) {
  for (Eigen::Index c = 0; c < window.rows(); ++c) {
    const auto row = window.row(c);
    if (!row.allFinite()) return Gate::Artifact;
    if (row.maxCoeff() - row.minCoeff() > cfg.amp_limit_uv) return Gate::Artifact;
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / static_cast<double>(row.size());
    if (var < cfg.flat_variance) return Gate::Artifact;
  }
  return Gate::Accepted;
}

Gate gate(const Eigen::MatrixXd& window, double margin, const GateConfig& cfg) {
  if (gate_window(window, cfg) == Gate::Artifact) return Gate::Artifact;
  return std::abs(margin) < cfg.theta ? Gate::LowConfidence : Gate::Accepted;
}

}  // namespace scb::session
