#include "scb/boost/projection.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <map>

#include "scb/common/error.hpp"

namespace scb::boost {

Projection project_latents_2d(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (n < 3) throw Error(Errc::InvalidArgument, "projection needs at least 3 points");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error(Errc::InvalidArgument, "one label per point required");
  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::Index k = std::min<Eigen::Index>(2, std::min(n, d));

  Projection p;
  p.coords = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd axes(d, k);
  if (d <= n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xc.transpose() * xc);
    for (Eigen::Index j = 0; j < k; ++j) axes.col(j) = es.eigenvectors().col(d - 1 - j);
  } else {
    // Wide data: eigenvectors of the Gram matrix give the same components.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xc * xc.transpose());
    for (Eigen::Index j = 0; j < k; ++j) {
      Eigen::VectorXd v = xc.transpose() * es.eigenvectors().col(n - 1 - j);
      const double norm = v.norm();
      axes.col(j) = norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Zero(d);
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    axes.col(j).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, j) < 0.0) axes.col(j) *= -1.0;
  }
  p.coords.leftCols(k) = xc * axes;
  p.silhouette = silhouette(p.coords, labels);
  return p;
}

double silhouette(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  const Eigen::Index n = points.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error(Errc::InvalidArgument, "one label per point required");
  std::map<int, double> counts;
  for (int l : labels) counts[l] += 1.0;
  if (counts.size() < 2) return 0.0;

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::map<int, double> sum;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sum[labels[static_cast<std::size_t>(j)]] += (points.row(i) - points.row(j)).norm();
    const int own = labels[static_cast<std::size_t>(i)];
    if (counts[own] <= 1.0) continue;
    const double a = sum[own] / (counts[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [l, c] : counts)
      if (l != own) b = std::min(b, sum[l] / c);
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace scb::boost
