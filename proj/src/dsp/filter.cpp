#include "scb/dsp/filter.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "scb/common/error.hpp"

namespace scb::dsp {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const auto& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * r;
    }
    c = std::move(next);
  }
  return c;
}

std::vector<cplx> realized_poles(const std::vector<double>& a) {
  const int m = static_cast<int>(a.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) comp(0, j) = -a[static_cast<std::size_t>(j + 1)] / a[0];
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<cplx> out;
  for (int i = 0; i < m; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Number of samples after which the slowest pole has decayed below 1e-12.
std::size_t decay_length(const FilterCoeffs& coeffs) {
  const double r = coeffs.max_pole_radius();
  if (r <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(r)));
}

}  // namespace

double FilterCoeffs::max_pole_radius() const {
  double r = 0.0;
  for (const auto& p : poles) r = std::max(r, std::abs(p));
  return r;
}

std::complex<double> FilterCoeffs::response(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / design.fs;
  const cplx zinv = std::polar(1.0, -w);
  cplx num = 0.0, den = 0.0, p = 1.0;
  for (std::size_t i = 0; i < std::max(b.size(), a.size()); ++i) {
    if (i < b.size()) num += b[i] * p;
    if (i < a.size()) den += a[i] * p;
    p *= zinv;
  }
  return num / den;
}

double FilterCoeffs::gain_db(double freq_hz) const {
  return 20.0 * std::log10(std::abs(response(freq_hz)));
}

FilterCoeffs design_bandpass(double low_hz, double high_hz, int order, double fs) {
  if (!(fs > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < fs / 2.0))
    throw Error(Errc::InvalidBand, "need 0 < low < high < fs/2");
  if (order < 2 || order > 8 || order % 2 != 0)
    throw Error(Errc::InvalidBand, "order must be even and in [2, 8]");

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * fs;
  const double w1 = fs2 * std::tan(pi * low_hz / fs);
  const double w2 = fs2 * std::tan(pi * high_hz / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  // Analog low-pass prototype poles on the left half of the unit circle.
  std::vector<cplx> proto;
  for (int k = 1; k <= order; ++k) {
    const double theta = pi * (2.0 * k + order - 1) / (2.0 * order);
    proto.push_back(std::polar(1.0, theta));
  }

  // Low-pass to band-pass: each prototype pole splits into a pair, and the
  // prototype gains `order` zeros at s = 0.
  std::vector<cplx> analog_poles;
  for (const auto& p : proto) {
    const cplx half = p * bw / 2.0;
    const cplx disc = std::sqrt(half * half - w0sq);
    analog_poles.push_back(half + disc);
    analog_poles.push_back(half - disc);
  }
  double gain = std::pow(bw, order);

  // Bilinear map. Zeros at s=0 land on z=1, zeros at infinity on z=-1.
  std::vector<cplx> zd, pd;
  cplx gnum = 1.0, gden = 1.0;
  for (int i = 0; i < order; ++i) {
    zd.emplace_back(1.0, 0.0);
    gnum *= fs2;
  }
  for (const auto& p : analog_poles) {
    pd.push_back((fs2 + p) / (fs2 - p));
    gden *= (fs2 - p);
  }
  for (int i = 0; i < order; ++i) zd.emplace_back(-1.0, 0.0);
  gain *= (gnum / gden).real();

  for (const auto& p : pd)
    if (!(std::abs(p) < 1.0)) throw Error(Errc::UnstableDesign, "pole on or outside unit circle");

  FilterCoeffs out;
  out.design = {low_hz, high_hz, order, fs};
  const auto bc = poly_from_roots(zd);
  const auto ac = poly_from_roots(pd);
  for (const auto& c : bc) out.b.push_back(gain * c.real());
  for (const auto& c : ac) out.a.push_back(c.real());

  for (double v : out.b)
    if (!std::isfinite(v)) throw Error(Errc::UnstableDesign, "non-finite coefficient");

  // The recursion runs on the expanded polynomial, whose roots can drift
  // outside the unit circle for high orders with a low band edge.
  out.poles = realized_poles(out.a);
  if (out.max_pole_radius() >= 1.0 - 1e-9)
    throw Error(Errc::UnstableDesign, "realized pole radius " + std::to_string(out.max_pole_radius()));
  return out;
}

CausalFilter::CausalFilter(const FilterCoeffs& coeffs)
    : b_(coeffs.b), a_(coeffs.a), z_(coeffs.b.size() - 1, 0.0), zi_(steady_state_conditions(coeffs)) {
  b_.resize(std::max(b_.size(), a_.size()), 0.0);
  a_.resize(b_.size(), 0.0);
  z_.assign(b_.size() - 1, 0.0);
}

void CausalFilter::process(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = step(in[i]);
}

void CausalFilter::reset() { std::fill(z_.begin(), z_.end(), 0.0); }

void CausalFilter::set_steady_state(double x0) {
  for (std::size_t i = 0; i < z_.size(); ++i) z_[i] = zi_[i] * x0;
}

std::vector<double> steady_state_conditions(const FilterCoeffs& coeffs) {
  // Solve (I - A) zi = B for the transposed direct form (companion matrix A).
  const std::size_t n = std::max(coeffs.a.size(), coeffs.b.size());
  std::vector<double> a(coeffs.a), b(coeffs.b);
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  const int m = static_cast<int>(n) - 1;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    lhs(i, 0) += a[i + 1];
    if (i + 1 < m) lhs(i, i + 1) -= 1.0;
    rhs(i) = b[i + 1] - a[i + 1] * b[0];
  }
  const Eigen::VectorXd zi = lhs.colPivHouseholderQr().solve(rhs);
  return {zi.data(), zi.data() + m};
}

std::vector<double> apply_filter(const FilterCoeffs& coeffs, std::span<const double> signal,
                                 FilterMode mode) {
  const std::size_t n = signal.size();
  if (mode == FilterMode::Causal) {
    std::vector<double> out(n);
    CausalFilter f(coeffs);
    f.process(signal, out);
    return out;
  }

  const std::size_t taps = std::max(coeffs.a.size(), coeffs.b.size());
  if (n <= 3 * taps) throw Error(Errc::TooShort, "zero-phase filtering needs more than 3x the filter length");

  // Odd extension long enough for the slowest pole to settle, so that edge
  // handling does not depend on the pass direction.
  const std::size_t pad = std::min(n - 1, std::max(3 * taps, decay_length(coeffs)));
  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * signal[0] - signal[pad - i];
  std::copy(signal.begin(), signal.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * signal[n - 1] - signal[n - 2 - i];

  CausalFilter f(coeffs);
  f.set_steady_state(ext.front());
  for (auto& v : ext) v = f.step(v);
  std::reverse(ext.begin(), ext.end());
  f.set_steady_state(ext.front());
  for (auto& v : ext) v = f.step(v);
  std::reverse(ext.begin(), ext.end());
  return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace scb::dsp
