#pragma once

#include <Eigen/Core>

#include <vector>

namespace scb::boost {

// Linear discriminant with covariance shrinkage towards avg-variance * I.
struct LdaModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double shrinkage = 0.0;
  Eigen::VectorXd mean0, mean1;

  double decision(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return x.dot(weights.transpose()) + bias; }
};

// Throws InvalidArgument for gamma outside [0, 1], Degenerate for a missing
// class, Singular if the shrunk pooled covariance cannot be inverted.
LdaModel train_lda(const Eigen::MatrixXd& x, const std::vector<int>& y, double shrinkage);
int predict_lda(const LdaModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);  // zero decision -> rest

// CART with Gini impurity; leaves predict the majority class, ties to rest.
struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  int left = -1, right = -1;  // x[feature] <= threshold goes left
  int label = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int max_depth = 0;
};

TreeModel train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, int max_depth = 4, int min_leaf = 5);
int predict_tree(const TreeModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x);

}  // namespace scb::boost
