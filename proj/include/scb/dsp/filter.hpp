#pragma once

#include <complex>
#include <span>
#include <vector>

namespace scb::dsp {

struct BandDesign {
  double low_hz = 8.0;
  double high_hz = 40.0;
  int order = 4;  // analog prototype order; the digital band-pass has 2*order poles
  double fs = 250.0;
};

// Transfer function b(z)/a(z) with a[0] == 1.
struct FilterCoeffs {
  std::vector<double> b;
  std::vector<double> a;
  BandDesign design;
  std::vector<std::complex<double>> poles;  // roots of a(z) as realized

  double max_pole_radius() const;
  // H(e^{j 2 pi f / fs}) evaluated directly from b and a.
  std::complex<double> response(double freq_hz) const;
  double gain_db(double freq_hz) const;
};

// Butterworth band-pass designed on the analog prototype and mapped with the
// bilinear transform (pre-warped band edges).
// Throws InvalidBand unless 0 < low < high < fs/2 and order in [2, 8] even;
// UnstableDesign if any pole of the realized a(z) has magnitude >= 1 - 1e-9.
FilterCoeffs design_bandpass(double low_hz, double high_hz, int order, double fs);

enum class FilterMode { Causal, ZeroPhase };

// Direct-form II transposed state for one channel. Processing sample by sample
// gives bit-identical results to processing the same samples in one block.
class CausalFilter {
 public:
  CausalFilter() = default;
  explicit CausalFilter(const FilterCoeffs& coeffs);

  double step(double x) {
    const std::size_t n = b_.size();
    const double y = b_[0] * x + z_[0];
    for (std::size_t i = 1; i + 1 < n; ++i) z_[i - 1] = b_[i] * x + z_[i] - a_[i] * y;
    z_[n - 2] = b_[n - 1] * x - a_[n - 1] * y;
    return y;
  }

  void process(std::span<const double> in, std::span<double> out);
  void reset();
  // Sets the internal state to the steady state for a constant input `x0`.
  void set_steady_state(double x0);

 private:
  std::vector<double> b_, a_, z_, zi_;
};

std::vector<double> apply_filter(const FilterCoeffs& coeffs, std::span<const double> signal,
                                 FilterMode mode);

// Steady-state initial conditions (state per unit step input), same layout as
// CausalFilter's internal state.
std::vector<double> steady_state_conditions(const FilterCoeffs& coeffs);

}  // namespace scb::dsp
