#include <algorithm>
#include <numeric>

#include "scb/boost/baselines.hpp"
#include "scb/common/error.hpp"

namespace scb::boost {

namespace {

double gini(double n0, double n1) {
  const double n = n0 + n1;
  if (n <= 0.0) return 0.0;
  const double p = n1 / n;
  return 2.0 * p * (1.0 - p);
}

struct Builder {
  const Eigen::MatrixXd& x;
  const std::vector<int>& y;
  int max_depth, min_leaf;
  TreeModel model;

  int build(std::vector<int> idx, int depth) {
    double n1 = 0.0;
    for (int i : idx) n1 += y[static_cast<std::size_t>(i)];
    const double n0 = static_cast<double>(idx.size()) - n1;
    const int node = static_cast<int>(model.nodes.size());
    model.nodes.push_back({});
    model.nodes[static_cast<std::size_t>(node)].label = n1 > n0 ? 1 : 0;
    if (depth >= max_depth || n0 == 0.0 || n1 == 0.0 || static_cast<int>(idx.size()) < 2 * min_leaf) return node;

    const double parent = gini(n0, n1) * static_cast<double>(idx.size());
    double best = parent - 1e-12;
    int best_f = -1;
    double best_thr = 0.0;
    std::vector<int> sorted = idx;
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        (y[static_cast<std::size_t>(sorted[k])] == 1 ? l1 : l0) += 1.0;
        const double a = x(sorted[k], f), b = x(sorted[k + 1], f);
        const int left = static_cast<int>(k + 1), right = static_cast<int>(sorted.size()) - left;
        if (!(b > a) || left < min_leaf || right < min_leaf) continue;
        const double cost = gini(l0, l1) * left + gini(n0 - l0, n1 - l1) * right;
        if (cost < best) {
          best = cost;
          best_f = static_cast<int>(f);
          best_thr = 0.5 * (a + b) < b ? 0.5 * (a + b) : a;
        }
      }
    }
    if (best_f < 0) return node;

    std::vector<int> li, ri;
    for (int i : idx) (x(i, best_f) <= best_thr ? li : ri).push_back(i);
    const int l = build(std::move(li), depth + 1);
    const int r = build(std::move(ri), depth + 1);
    TreeNode& nd = model.nodes[static_cast<std::size_t>(node)];
    nd.feature = best_f;
    nd.threshold = best_thr;
    nd.left = l;
    nd.right = r;
    return node;
  }
};

}  // namespace

TreeModel train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, int max_depth, int min_leaf) {
  if (x.rows() == 0 || static_cast<Eigen::Index>(y.size()) != x.rows())
    throw Error(Errc::InvalidArgument, "one label per sample required");
  if (max_depth < 0 || min_leaf < 1) throw Error(Errc::InvalidArgument, "invalid tree limits");
  Builder b{x, y, max_depth, min_leaf, {}};
  b.model.max_depth = max_depth;
  std::vector<int> idx(static_cast<std::size_t>(x.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  b.build(std::move(idx), 0);
  return std::move(b.model);
}

int predict_tree(const TreeModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  int node = 0;
  while (m.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = m.nodes[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return m.nodes[static_cast<std::size_t>(node)].label;
}

}  // namespace scb::boost
