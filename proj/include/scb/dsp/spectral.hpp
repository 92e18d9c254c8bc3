#pragma once

#include <span>
#include <vector>

namespace scb::dsp {

struct Psd {
  std::vector<double> freqs;  // Hz, 0 .. fs/2
  std::vector<double> power;  // one-sided density, units^2 / Hz
  double bin_hz = 0.0;
};

// Welch estimate: Hann window, 50% overlap, mean-removed segments.
// A signal shorter than one segment is treated as a single zero-padded segment.
Psd welch(std::span<const double> signal, double fs, std::size_t segment_len);

// Integrated power over [lo_hz, hi_hz).
double band_power(const Psd& psd, double lo_hz, double hi_hz);

// Least-squares fit of a*sin + b*cos at a known frequency; returns amplitude
// and phase (radians) of the fitted sinusoid.
struct SineFit {
  double amplitude = 0.0;
  double phase = 0.0;
};
SineFit fit_sinusoid(std::span<const double> signal, double freq_hz, double fs);

}  // namespace scb::dsp
