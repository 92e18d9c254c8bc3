#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

#include "scb/cae/network.hpp"
#include "scb/cae/params.hpp"

namespace scb::cae {

struct AugmentConfig {
  double noise_scale = 0.05;      // noise std as a fraction of each channel's std
  double channel_dropout = 0.1;   // probability of zeroing a channel
};

struct TrainConfig {
  double lambda = 1.0;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  double dropout = 0.25;
  int batch_size = 64;
  int max_epochs = 200;
  int patience = 10;
  double bn_momentum = 0.1;
  AugmentConfig augment;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidArgument
};

// Windows already normalised with normalize_window; labels 0 = rest, 1 = move.
struct WindowSet {
  std::vector<Eigen::MatrixXf> windows;
  std::vector<int> labels;

  std::size_t size() const { return windows.size(); }
};

struct EpochRecord {
  int epoch = 0;            // 1-based
  double train_loss = 0.0;  // mean total loss over the epoch's batches
  double train_recon = 0.0; // mean reconstruction MSE over the epoch's batches
  double val_loss = 0.0;
  double val_accuracy = 0.0;  // aux head, infer mode
};

struct TrainResult {
  CaeParams params;  // snapshot with the lowest validation loss
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

// Per-channel z-score over the window; flat channels become zeros.
Eigen::MatrixXf normalize_window(const Eigen::MatrixXd& window);

// Adds N(0, (noise_scale * channel std)^2) per channel, then zeroes each
// channel independently with probability channel_dropout.
Eigen::MatrixXf augment(const Eigen::MatrixXf& window, std::mt19937_64& rng, const AugmentConfig& cfg);

// Throws Degenerate if either split is empty or single-class.
TrainResult train(const WindowSet& train_set, const WindowSet& val_set, const ArchDescriptor& arch,
                  const TrainConfig& cfg);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};
Evaluation evaluate_aux(const CaeParams& p, const WindowSet& set, double lambda);

// encode(normalize_window(raw)).
Eigen::VectorXf embed(const CaeParams& p, const Eigen::MatrixXd& raw_window);

}  // namespace scb::cae
