#pragma once

#include <span>
#include <vector>

namespace scb::dsp {

struct Ratio {
  long up = 1;
  long down = 1;
};

// Smallest up/down pair with up/down == to_hz/from_hz (to 1e-9 relative).
// Throws IrrationalRatio when the denominator would exceed 1000.
Ratio rational_ratio(double from_hz, double to_hz);

// Polyphase resampling with a Kaiser-windowed (60 dB) linear-phase anti-alias
// filter. Output length is floor(n * to_hz / from_hz).
std::vector<double> resample(std::span<const double> signal, double from_hz, double to_hz);

}  // namespace scb::dsp
