#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace scb::session {

constexpr double kDefaultDeviceWatts = 10.0;

struct LatencyStats {
  std::size_t n = 0;
  double mean_ms = 0.0, p95_ms = 0.0, max_ms = 0.0;
  double energy_j_per_decision = 0.0;
  std::size_t memory_peak_bytes = 0;
};

// Nearest-rank percentile, p in (0, 100]. Throws EmptyTrace.
double nearest_rank(std::vector<double> values, double p);

// Energy is mean CPU seconds per decision times `watts`. cpu_s may be empty
// (energy 0) or match latency_ms in length. Throws EmptyTrace.
LatencyStats measure(const std::vector<double>& latency_ms, const std::vector<double>& cpu_s = {},
                     double watts = kDefaultDeviceWatts, std::size_t memory_peak_bytes = 0);

// Peak resident set size of this process.
std::size_t peak_rss_bytes();

nlohmann::ordered_json to_json(const LatencyStats& s);

}  // namespace scb::session
