#include "scb/session/latency.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scb/common/error.hpp"

namespace scb::session {

double nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw Error(Errc::EmptyTrace, "no decisions recorded");
  if (!(p > 0.0 && p <= 100.0)) throw Error(Errc::InvalidArgument, "percentile must lie in (0, 100]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

LatencyStats measure(const std::vector<double>& latency_ms, const std::vector<double>& cpu_s, double watts,
                     std::size_t memory_peak_bytes) {
  if (latency_ms.empty()) throw Error(Errc::EmptyTrace, "no decisions recorded");
  if (!cpu_s.empty() && cpu_s.size() != latency_ms.size())
    throw Error(Errc::InvalidArgument, "one CPU time per decision required");
  LatencyStats s;
  s.n = latency_ms.size();
  s.mean_ms = std::accumulate(latency_ms.begin(), latency_ms.end(), 0.0) / static_cast<double>(s.n);
  s.p95_ms = nearest_rank(latency_ms, 95.0);
  s.max_ms = *std::max_element(latency_ms.begin(), latency_ms.end());
  if (!cpu_s.empty())
    s.energy_j_per_decision = watts * std::accumulate(cpu_s.begin(), cpu_s.end(), 0.0) / static_cast<double>(s.n);
  s.memory_peak_bytes = memory_peak_bytes;
  return s;
}

std::size_t peak_rss_bytes() {
  rusage ru{};
  ::getrusage(RUSAGE_SELF, &ru);
  return static_cast<std::size_t>(ru.ru_maxrss) * 1024;
}

nlohmann::ordered_json to_json(const LatencyStats& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["mean_ms"] = s.mean_ms;
  j["p95_ms"] = s.p95_ms;
  j["max_ms"] = s.max_ms;
  j["energy_j_per_decision"] = s.energy_j_per_decision;
  j["memory_peak_bytes"] = s.memory_peak_bytes;
  return j;
}

}  // namespace scb::session
