#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

#include "scb/cae/params.hpp"

namespace scb::cae {

// Activations are [channels x batch*length], row-major, window b occupying
// columns [b*length, (b+1)*length).
template <typename T>
using Act = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Mode { Train, Infer };

template <typename T>
struct ForwardResult {
  Mat<T> latent;  // [latent_dim x B]
  Act<T> recon;   // same shape as the input
  Mat<T> logits;  // [2 x B]
};

struct LossParts {
  double total = 0.0;
  double recon_mse = 0.0;
  double class_ce = 0.0;
};

struct GradOptions {
  double lambda = 1.0;
  double weight_decay = 1e-4;
  double dropout = 0.25;  // latent dropout, train mode only
};

template <typename T>
struct GradResult {
  ParamSet<T> grad;
  LossParts loss;
  // Per encoder stage batch mean and unbiased variance, for the running-stat update.
  std::vector<Mat<T>> batch_mean, batch_var;
};

// Packs [channels x length] windows into one activation matrix.
template <typename T>
Act<T> pack_windows(const std::vector<Eigen::MatrixXf>& windows, const std::vector<std::size_t>& index);
template <typename T>
Act<T> pack_windows(const std::vector<Eigen::MatrixXf>& windows);

// Train mode needs batch >= 2 and uses batch statistics plus latent dropout
// (rng may be null when dropout == 0). Throws NonFinite on overflow.
template <typename T>
ForwardResult<T> forward(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode, std::mt19937_64* rng = nullptr,
                         double dropout = 0.0);

// total = MSE(recon, target) + lambda * mean CE(logits, labels).
template <typename T>
LossParts loss(const Act<T>& recon, const Act<T>& target, const Mat<T>& logits, const std::vector<int>& labels,
               double lambda);

// Train-mode forward and analytic backward. The gradient includes the
// weight-decay term wd * w on Weight tensors; loss.total does not include the
// penalty (see decay_penalty).
template <typename T>
GradResult<T> grad(const ParamSet<T>& p, const Act<T>& x, const Act<T>& target, const std::vector<int>& labels,
                   const GradOptions& opt, std::mt19937_64* rng);

// wd/2 * sum of squared Weight entries.
template <typename T>
double decay_penalty(const ParamSet<T>& p, double weight_decay);

// Latent of a single window in infer mode; runs the encoder only.
template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, 1> encode(const ParamSet<T>& p, const Eigen::MatrixXf& window);

// Which linear piece the network is on: leaky-ReLU signs and max-pool
// winners for every unit of a forward pass. Two parameter sets with equal
// patterns lie in the same smooth region of the loss.
template <typename T>
std::vector<std::uint8_t> activation_pattern(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode);

constexpr double kNormEps = 1e-5;

}  // namespace scb::cae
