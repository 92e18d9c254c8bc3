#include "scb/dsp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "scb/common/error.hpp"

namespace scb::dsp {

namespace {

constexpr double kKaiserBeta = 5.653;  // 0.1102 * (60 - 8.7)
constexpr long kHalfLenPerPhase = 10;

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Low-pass prototype at the up-sampled rate, cutoff at the lower Nyquist,
// scaled by `up` to restore amplitude after zero insertion.
std::vector<double> design_antialias(long up, long down) {
  const long m = std::max(up, down);
  const long half = kHalfLenPerPhase * m;
  const long len = 2 * half + 1;
  const double cutoff = 1.0 / static_cast<double>(m);  // fraction of the up-sampled Nyquist
  std::vector<double> h(static_cast<std::size_t>(len));
  const double denom = bessel_i0(kKaiserBeta);
  double sum = 0.0;
  for (long i = 0; i < len; ++i) {
    const double t = static_cast<double>(i - half);
    const double x = cutoff * t;
    const double sinc = (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = t / static_cast<double>(half);
    const double w = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    h[static_cast<std::size_t>(i)] = cutoff * sinc * w;
    sum += h[static_cast<std::size_t>(i)];
  }
  for (auto& v : h) v *= static_cast<double>(up) / sum;
  return h;
}

}  // namespace

Ratio rational_ratio(double from_hz, double to_hz) {
  if (!(from_hz > 0.0) || !(to_hz > 0.0)) throw Error(Errc::InvalidArgument, "rates must be positive");
  const double target = to_hz / from_hz;
  for (long den = 1; den <= 1000; ++den) {
    const double num = std::round(target * static_cast<double>(den));
    if (num < 1.0) continue;
    if (std::abs(num / static_cast<double>(den) - target) <= 1e-9 * target) {
      const long n = static_cast<long>(num);
      const long g = std::gcd(n, den);
      return {n / g, den / g};
    }
  }
  throw Error(Errc::IrrationalRatio, "rate ratio denominator exceeds 1000");
}

std::vector<double> resample(std::span<const double> signal, double from_hz, double to_hz) {
  const Ratio r = rational_ratio(from_hz, to_hz);
  const long n = static_cast<long>(signal.size());
  const long n_out = (n * r.up) / r.down;
  std::vector<double> out(static_cast<std::size_t>(n_out), 0.0);
  if (r.up == 1 && r.down == 1) {
    std::copy(signal.begin(), signal.end(), out.begin());
    return out;
  }

  const auto h = design_antialias(r.up, r.down);
  const long half = static_cast<long>(h.size() / 2);
  // y[k] = sum_j x[j] * h[k*down - j*up + half] over the zero-stuffed input.
  for (long k = 0; k < n_out; ++k) {
    const long pos = k * r.down + half;  // index into the up-sampled stream, shifted for zero delay
    long j_hi = std::min(n - 1, pos / r.up);
    const long j_lo_num = pos - static_cast<long>(h.size()) + 1;
    long j_lo = j_lo_num <= 0 ? 0 : (j_lo_num + r.up - 1) / r.up;
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j) acc += signal[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(pos - j * r.up)];
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

}  // namespace scb::dsp
