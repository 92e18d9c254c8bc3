#include "scb/ica/ica.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "scb/common/error.hpp"
#include "scb/dsp/spectral.hpp"

namespace scb::ica {

namespace {

// W <- (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd gram = w * w.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
}

bool is_frontal(const std::string& name) {
  return name == "F7" || name == "F3" || name == "F4" || name == "F8";
}

}  // namespace

Eigen::MatrixXd UnmixingModel::channel_unmixing() const { return unmix * whitener; }

Eigen::MatrixXd UnmixingModel::sources(const Eigen::MatrixXd& x) const {
  return channel_unmixing() * (x.colwise() - mean);
}

WhitenResult whiten(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows(), n = x.cols();
  if (m == 0 || n < 10 * m) throw Error(Errc::InvalidArgument, "whitening needs at least 10 samples per channel");
  if (!x.allFinite()) throw Error(Errc::NonFinite, "input contains NaN/Inf");

  WhitenResult out;
  out.mean = x.rowwise().mean();
  const Eigen::MatrixXd xc = x.colwise() - out.mean;
  const Eigen::MatrixXd cov = (xc * xc.transpose()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double max_ev = ev.maxCoeff();
  if (!(max_ev > 0.0) || ev.minCoeff() < 1e-12 * max_ev)
    throw Error(Errc::RankDeficient, "covariance is (numerically) singular");
  const Eigen::MatrixXd& e = es.eigenvectors();
  out.whitener = e * ev.cwiseSqrt().cwiseInverse().asDiagonal() * e.transpose();
  out.dewhitener = e * ev.cwiseSqrt().asDiagonal() * e.transpose();
  out.z = out.whitener * xc;
  return out;
}

UnmixingModel fast_ica(const Eigen::MatrixXd& z, int k, double tol, int max_iter, std::uint64_t seed) {
  const Eigen::Index m = z.rows(), n = z.cols();
  if (k < 1 || k > m) throw Error(Errc::InvalidArgument, "component count must be in [1, channels]");
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd w(k, m);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = nd(rng);
  w = symmetric_decorrelation(w);

  UnmixingModel best;
  best.final_delta = std::numeric_limits<double>::infinity();
  const double inv_n = 1.0 / static_cast<double>(n);
  int it = 0;
  for (it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd y = w * z;  // [k x n]
    const Eigen::MatrixXd g = y.array().tanh().matrix();
    const Eigen::VectorXd g_prime_mean = (1.0 - g.array().square()).rowwise().sum().matrix() * inv_n;
    Eigen::MatrixXd w_new = (g * z.transpose()) * inv_n - g_prime_mean.asDiagonal() * w;
    w_new = symmetric_decorrelation(w_new);

    const Eigen::VectorXd dots = (w_new * w.transpose()).diagonal();
    const double delta = (1.0 - dots.array().abs()).abs().maxCoeff();
    w = w_new;
    if (delta < best.final_delta) {
      best.unmix = w;
      best.final_delta = delta;
      best.iterations = it;
    }
    if (delta < tol) {
      best.converged = true;
      break;
    }
  }
  if (!best.converged) best.iterations = std::min(it, max_iter);

  best.k = k;
  best.mean = Eigen::VectorXd::Zero(m);
  best.whitener = Eigen::MatrixXd::Identity(m, m);
  best.mixing = best.unmix.transpose();
  return best;
}

UnmixingModel fit(const Eigen::MatrixXd& x, const IcaOptions& opts) {
  const WhitenResult wr = whiten(x);
  UnmixingModel model = fast_ica(wr.z, opts.k, opts.tol, opts.max_iter, opts.seed);
  model.mean = wr.mean;
  model.whitener = wr.whitener;
  // Rows of unmix are orthonormal, so its pseudo-inverse in whitened space is
  // the transpose.
  model.mixing = wr.dewhitener * model.unmix.transpose();
  return model;
}

double excess_kurtosis(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double n = static_cast<double>(v.size());
  const double mu = v.mean();
  const Eigen::ArrayXd d = (v.array() - mu).transpose();
  const double m2 = d.square().sum() / n;
  const double m4 = d.square().square().sum() / n;
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2) - 3.0;
}

Verdict classify(const ComponentScore& s, const ScoreThresholds& t) {
  if (s.kurtosis > t.kurtosis) return Verdict::Artifact;
  if (s.low_freq_ratio > t.low_freq_ratio && s.spatial_frontal_ratio > t.frontal_ratio) return Verdict::Artifact;
  return Verdict::Neural;
}

std::vector<ComponentScore> score_components(const UnmixingModel& model, const Eigen::MatrixXd& x, double fs,
                                             const std::vector<std::string>& channels,
                                             const ScoreThresholds& thresholds) {
  if (static_cast<Eigen::Index>(channels.size()) != x.rows())
    throw Error(Errc::InvalidArgument, "channel list does not match data rows");
  const Eigen::MatrixXd s = model.sources(x);
  const std::size_t seg = std::min<std::size_t>(static_cast<std::size_t>(2.0 * fs), static_cast<std::size_t>(s.cols()));

  std::vector<ComponentScore> out;
  for (int i = 0; i < model.k; ++i) {
    ComponentScore sc;
    sc.index = i;
    sc.kurtosis = excess_kurtosis(s.row(i));

    const Eigen::RowVectorXd row = s.row(i);
    const auto psd = dsp::welch(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), fs, seg);
    const double total = dsp::band_power(psd, 0.0, fs);
    sc.low_freq_ratio = total > 0.0 ? std::clamp(dsp::band_power(psd, 0.0, thresholds.low_freq_hz) / total, 0.0, 1.0) : 0.0;

    double frontal = 0.0, all = 0.0;
    for (Eigen::Index c = 0; c < model.mixing.rows(); ++c) {
      const double w = std::abs(model.mixing(c, i));
      all += w;
      if (is_frontal(channels[static_cast<std::size_t>(c)])) frontal += w;
    }
    sc.spatial_frontal_ratio = all > 0.0 ? frontal / all : 0.0;
    sc.verdict = classify(sc, thresholds);
    out.push_back(sc);
  }
  return out;
}

Eigen::MatrixXd remove_components(const UnmixingModel& model, const Eigen::MatrixXd& x, const std::set<int>& rejected) {
  for (int r : rejected)
    if (r < 0 || r >= model.k) throw Error(Errc::BadIndex, "component index " + std::to_string(r));
  Eigen::MatrixXd s = model.sources(x);
  for (int r : rejected) s.row(r).setZero();
  return (model.mixing * s).colwise() + model.mean;
}

}  // namespace scb::ica
