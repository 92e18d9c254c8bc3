#pragma once

#include <Eigen/Core>

#include "scb/session/types.hpp"

namespace scb::session {

struct GateConfig {
  double theta = 0.6;            // minimum |margin|
  double amp_limit_uv = 100.0;   // peak-to-peak per channel
  double flat_variance = 1e-3;   // uV^2
};

// Artifact when any channel exceeds the peak-to-peak limit or is flat;
// otherwise low confidence when |margin| < theta.
Gate gate_window(const Eigen::MatrixXd& window, const GateConfig& cfg);
Gate gate(const Eigen::MatrixXd& window, double margin, const GateConfig& cfg);

}  // namespace scb::session
