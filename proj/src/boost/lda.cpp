#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "scb/boost/baselines.hpp"
#include "scb/common/error.hpp"

namespace scb::boost {

LdaModel train_lda(const Eigen::MatrixXd& x, const std::vector<int>& y, double shrinkage) {
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw Error(Errc::InvalidArgument, "shrinkage must be in [0, 1]");
  const Eigen::Index n = x.rows(), d = x.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) throw Error(Errc::InvalidArgument, "one label per sample required");

  Eigen::VectorXd sum0 = Eigen::VectorXd::Zero(d), sum1 = Eigen::VectorXd::Zero(d);
  double n0 = 0.0, n1 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[static_cast<std::size_t>(i)] == 1) {
      sum1 += x.row(i).transpose();
      n1 += 1.0;
    } else {
      sum0 += x.row(i).transpose();
      n0 += 1.0;
    }
  }
  if (n0 == 0.0 || n1 == 0.0) throw Error(Errc::Degenerate, "both classes are required");

  LdaModel m;
  m.shrinkage = shrinkage;
  m.mean0 = sum0 / n0;
  m.mean1 = sum1 / n1;
  Eigen::MatrixXd centered(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    centered.row(i) = x.row(i) - (y[static_cast<std::size_t>(i)] == 1 ? m.mean1 : m.mean0).transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / std::max(1.0, static_cast<double>(n) - 2.0);
  const double nu = cov.trace() / static_cast<double>(d);
  cov = (1.0 - shrinkage) * cov + shrinkage * nu * Eigen::MatrixXd::Identity(d, d);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double max_ev = es.eigenvalues().maxCoeff();
  if (!(max_ev > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * max_ev)
    throw Error(Errc::Singular, "pooled covariance is singular; use shrinkage > 0");
  m.weights = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose() *
              (m.mean1 - m.mean0);
  m.bias = -0.5 * m.weights.dot(m.mean0 + m.mean1) + std::log(n1 / n0);
  return m;
}

int predict_lda(const LdaModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) { return m.decision(x) > 0.0 ? 1 : 0; }

}  // namespace scb::boost
