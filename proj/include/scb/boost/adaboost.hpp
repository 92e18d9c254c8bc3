#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "scb/boost/stump.hpp"

namespace scb::boost {

constexpr double kAlphaCap = 20.0;

struct StumpEnsemble {
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  int n_rounds = 0;            // requested rounds; stumps.size() may be smaller after an early exit
  std::uint64_t seed = 0;      // recorded for reports; the fit itself is deterministic
  std::vector<double> errors;  // weighted error of each accepted round
  std::vector<double> train_error;  // 0/1 training error of the prefix ensemble after each round
  std::vector<double> bound;        // prod 2 sqrt(err (1 - err)) after each round

  std::size_t size() const { return stumps.size(); }
  StumpEnsemble prefix(std::size_t rounds) const;
};

struct Prediction {
  int label = 0;        // 1 = move
  double margin = 0.0;  // in [-1, 1]
};

// Two-class SAMME: alpha = ln((1 - err) / err), misclassified weights scaled
// by e^alpha, then renormalised. Stops before a round with err >= 0.5 and
// after a round with err = 0 (alpha capped at kAlphaCap). Throws Degenerate
// when a class is missing.
// Called with the renormalised sample weights after each accepted round.
using RoundObserver = std::function<void(int round, const Eigen::VectorXd& weights)>;

StumpEnsemble train_adaboost(const Eigen::MatrixXd& x, const std::vector<int>& y, int rounds, std::uint64_t seed = 0,
                             const RoundObserver& on_round = {});

// Sign of sum alpha_t (2 h_t(x) - 1), margin normalised by sum alpha_t; a zero
// sum (including the empty ensemble) is rest.
Prediction predict(const StumpEnsemble& e, const Eigen::Ref<const Eigen::RowVectorXd>& x);
std::vector<int> predict_labels(const StumpEnsemble& e, const Eigen::MatrixXd& x);

// Rounds chosen from `grid` by cross-validated accuracy on the given data only.
// Folds are the distinct `groups` when there are at least two, otherwise five
// interleaved folds. Ties go to the smaller count.
int select_rounds(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<int>& groups,
                  const std::vector<int>& grid = {50, 100, 200, 400});

}  // namespace scb::boost
