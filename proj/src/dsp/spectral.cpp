#include "scb/dsp/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scb/common/error.hpp"

namespace scb::dsp {

Psd welch(std::span<const double> signal, double fs, std::size_t segment_len) {
  if (segment_len < 2) throw Error(Errc::InvalidArgument, "segment too short");
  if (signal.empty()) throw Error(Errc::EmptyInput, "empty signal");
  const std::size_t seg = segment_len;
  const std::size_t hop = seg / 2;
  const std::size_t n_bins = seg / 2 + 1;
  const double pi = std::numbers::pi;

  std::vector<double> window(seg);
  double wss = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(seg));
    wss += window[i] * window[i];
  }
  std::vector<double> cos_t(seg), sin_t(seg);
  for (std::size_t i = 0; i < seg; ++i) {
    cos_t[i] = std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(seg));
    sin_t[i] = std::sin(2.0 * pi * static_cast<double>(i) / static_cast<double>(seg));
  }

  Psd psd;
  psd.bin_hz = fs / static_cast<double>(seg);
  psd.power.assign(n_bins, 0.0);
  for (std::size_t k = 0; k < n_bins; ++k) psd.freqs.push_back(static_cast<double>(k) * psd.bin_hz);

  std::size_t n_segments = 0;
  std::vector<double> buf(seg);
  for (std::size_t start = 0; n_segments == 0 || start + seg <= signal.size(); start += hop) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t avail = std::min(seg, signal.size() - std::min(start, signal.size()));
    double mean = 0.0;
    for (std::size_t i = 0; i < avail; ++i) mean += signal[start + i];
    mean /= static_cast<double>(std::max<std::size_t>(avail, 1));
    for (std::size_t i = 0; i < avail; ++i) buf[i] = (signal[start + i] - mean) * window[i];
    for (std::size_t k = 0; k < n_bins; ++k) {
      double re = 0.0, im = 0.0;
      std::size_t idx = 0;
      for (std::size_t i = 0; i < seg; ++i) {
        re += buf[i] * cos_t[idx];
        im -= buf[i] * sin_t[idx];
        idx += k;
        if (idx >= seg) idx -= seg;
      }
      double p = (re * re + im * im) / (fs * wss);
      if (k != 0 && !(seg % 2 == 0 && k == seg / 2)) p *= 2.0;
      psd.power[k] += p;
    }
    ++n_segments;
    if (signal.size() < seg) break;
  }
  for (auto& p : psd.power) p /= static_cast<double>(n_segments);
  return psd;
}

double band_power(const Psd& psd, double lo_hz, double hi_hz) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psd.freqs.size(); ++k)
    if (psd.freqs[k] >= lo_hz && psd.freqs[k] < hi_hz) sum += psd.power[k];
  return sum * psd.bin_hz;
}

SineFit fit_sinusoid(std::span<const double> signal, double freq_hz, double fs) {
  const Eigen::Index n = static_cast<Eigen::Index>(signal.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs;
    design(i, 0) = std::sin(t);
    design(i, 1) = std::cos(t);
    design(i, 2) = 1.0;
    y(i) = signal[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);
  return {std::hypot(c(0), c(1)), std::atan2(c(1), c(0))};
}

}  // namespace scb::dsp
