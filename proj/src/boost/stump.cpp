#include "scb/boost/stump.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scb/common/error.hpp"

namespace scb::boost {

StumpSearch::StumpSearch(const Eigen::MatrixXd& x) : x_(x) {
  if (x.rows() < 2) throw Error(Errc::InvalidArgument, "stump search needs at least 2 samples");
  if (!x.allFinite()) throw Error(Errc::NonFinite, "features contain NaN/Inf");
  order_.resize(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& o = order_[static_cast<std::size_t>(f)];
    o.resize(static_cast<std::size_t>(x.rows()));
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
  }
}

StumpFit StumpSearch::fit(const std::vector<int>& y, const Eigen::VectorXd& w) const {
  const Eigen::Index n = x_.rows();
  if (static_cast<Eigen::Index>(y.size()) != n || w.size() != n)
    throw Error(Errc::InvalidArgument, "labels and weights must match the sample count");
  if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > 1e-9)
    throw Error(Errc::InvalidArgument, "weights must be non-negative and sum to 1");
  double w1 = 0.0, w0 = 0.0;
  bool has0 = false, has1 = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[static_cast<std::size_t>(i)] == 1) {
      w1 += w(i);
      has1 = true;
    } else {
      w0 += w(i);
      has0 = true;
    }
  }
  if (!has0 || !has1) throw Error(Errc::Degenerate, "all labels are equal");

  StumpFit best;
  best.error = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t f = 0; f < order_.size(); ++f) {
    const auto& o = order_[f];
    double l1 = 0.0, l0 = 0.0;  // weight at or below the threshold, by class
    for (std::size_t k = 0; k + 1 < o.size(); ++k) {
      const int i = o[k];
      if (y[static_cast<std::size_t>(i)] == 1)
        l1 += w(i);
      else
        l0 += w(i);
      const double a = x_(i, static_cast<Eigen::Index>(f)), b = x_(o[k + 1], static_cast<Eigen::Index>(f));
      if (!(b > a)) continue;
      double thr = 0.5 * (a + b);
      if (!(thr < b)) thr = a;
      const double err_pos = l1 + (w0 - l0);  // predict 1 above
      const double err_neg = l0 + (w1 - l1);  // predict 1 below
      if (err_pos < best.error - kTieTolerance) {
        best = {{static_cast<int>(f), thr, 1}, err_pos};
        found = true;
      }
      if (err_neg < best.error - kTieTolerance) {
        best = {{static_cast<int>(f), thr, -1}, err_neg};
        found = true;
      }
    }
  }
  if (!found) throw Error(Errc::Degenerate, "no feature has two distinct values");
  best.error = std::clamp(best.error, 0.0, 1.0);
  return best;
}

StumpFit train_stump(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& w) {
  return StumpSearch(x).fit(y, w);
}

}  // namespace scb::boost
