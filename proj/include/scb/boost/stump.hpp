#pragma once

#include <Eigen/Core>

#include <vector>

namespace scb::boost {

// h(x) = 1 if polarity * (x[feature] - threshold) > 0, else 0.
struct Stump {
  int feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    const double v = x(feature);
    return (polarity > 0 ? v > threshold : v < threshold) ? 1 : 0;
  }
  bool operator==(const Stump&) const = default;
};

struct StumpFit {
  Stump stump;
  double error = 0.0;  // weighted 0/1 error
};

// Candidates differing by less than this in weighted error count as tied;
// ties go to the lowest feature, then the lowest threshold, then polarity +1.
constexpr double kTieTolerance = 1e-12;

// Presorts every feature once so repeated fits (boosting rounds) only rescan.
class StumpSearch {
 public:
  explicit StumpSearch(const Eigen::MatrixXd& x);  // [n x d]

  // Exhaustive search over features x midpoints of sorted unique values x
  // polarities. Throws InvalidArgument on bad weights, Degenerate if all
  // labels are equal or no feature has two distinct values.
  StumpFit fit(const std::vector<int>& y, const Eigen::VectorXd& w) const;

 private:
  const Eigen::MatrixXd& x_;
  std::vector<std::vector<int>> order_;
};

StumpFit train_stump(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& w);

}  // namespace scb::boost
