#pragma once

#include <Eigen/Core>

#include <vector>

namespace scb::boost {

struct Projection {
  Eigen::MatrixXd coords;  // [n x 2]
  double silhouette = 0.0;
};

// PCA to two components (sign fixed so each axis' largest loading is
// positive) and the silhouette of the labels on that embedding. Needs >= 3 rows.
Projection project_latents_2d(const Eigen::MatrixXd& x, const std::vector<int>& labels);

// Mean silhouette coefficient with Euclidean distance; singletons score 0.
double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels);

}  // namespace scb::boost
