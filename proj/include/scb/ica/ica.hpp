#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace scb::ica {

struct WhitenResult {
  Eigen::MatrixXd z;           // whitened data, rows zero-mean, covariance I
  Eigen::VectorXd mean;        // per-channel mean removed before whitening
  Eigen::MatrixXd whitener;    // [m x m], symmetric (ZCA) form
  Eigen::MatrixXd dewhitener;  // inverse of whitener
};

// Covariance uses the 1/n normalisation throughout this module.
// Throws RankDeficient if an eigenvalue falls below 1e-12 of the largest and
// InvalidArgument if fewer than 10 samples per channel are given.
WhitenResult whiten(const Eigen::MatrixXd& x);

struct UnmixingModel {
  Eigen::VectorXd mean;        // [m]
  Eigen::MatrixXd whitener;    // [m x m]
  Eigen::MatrixXd unmix;       // [k x m], orthonormal rows, acts on whitened data
  Eigen::MatrixXd mixing;      // [m x k], pseudo-inverse of unmix * whitener
  int k = 0;
  bool converged = false;
  int iterations = 0;
  double final_delta = 0.0;    // convergence measure of the returned iterate

  // Component time courses, [k x n].
  Eigen::MatrixXd sources(const Eigen::MatrixXd& x) const;
  // unmix * whitener, the full channel-space unmixing matrix.
  Eigen::MatrixXd channel_unmixing() const;
};

// Symmetric fixed-point ICA with the log-cosh (tanh) contrast on whitened data.
// The returned model carries zero mean and an identity whitener; compose with
// whiten() through fit(). When max_iter is reached the iterate with the
// smallest update is returned with converged == false.
UnmixingModel fast_ica(const Eigen::MatrixXd& z, int k, double tol, int max_iter, std::uint64_t seed);

struct IcaOptions {
  int k = 12;
  double tol = 1e-6;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

UnmixingModel fit(const Eigen::MatrixXd& x, const IcaOptions& opts);

enum class Verdict { Neural, Artifact };

struct ScoreThresholds {
  double kurtosis = 8.0;         // excess kurtosis above this: spiky muscle/cardiac source
  double low_freq_ratio = 0.6;   // with frontal weight: blink
  double frontal_ratio = 0.5;
  double low_freq_hz = 4.0;
};

struct ComponentScore {
  int index = 0;
  double kurtosis = 0.0;  // excess
  double low_freq_ratio = 0.0;
  double spatial_frontal_ratio = 0.0;
  Verdict verdict = Verdict::Neural;
};

// `channels` names the rows of x; F7/F3/F4/F8 count as frontal.
std::vector<ComponentScore> score_components(const UnmixingModel& model, const Eigen::MatrixXd& x, double fs,
                                             const std::vector<std::string>& channels,
                                             const ScoreThresholds& thresholds = {});

Verdict classify(const ComponentScore& score, const ScoreThresholds& thresholds);

// Zeroes the rejected components and maps back to channel space. Throws BadIndex.
Eigen::MatrixXd remove_components(const UnmixingModel& model, const Eigen::MatrixXd& x, const std::set<int>& rejected);

double excess_kurtosis(const Eigen::Ref<const Eigen::RowVectorXd>& v);

}  // namespace scb::ica
