#include "scb/boost/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "scb/common/error.hpp"

namespace scb::boost {

StumpEnsemble StumpEnsemble::prefix(std::size_t rounds) const {
  StumpEnsemble e = *this;
  const std::size_t k = std::min(rounds, stumps.size());
  e.stumps.resize(k);
  e.alphas.resize(k);
  e.errors.resize(k);
  e.train_error.resize(k);
  e.bound.resize(k);
  e.n_rounds = static_cast<int>(rounds);
  return e;
}

StumpEnsemble train_adaboost(const Eigen::MatrixXd& x, const std::vector<int>& y, int rounds, std::uint64_t seed,
                             const RoundObserver& on_round) {
  if (rounds < 1) throw Error(Errc::InvalidArgument, "rounds must be positive");
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(y.size()) != n) throw Error(Errc::InvalidArgument, "one label per sample required");
  const StumpSearch search(x);

  StumpEnsemble e;
  e.n_rounds = rounds;
  e.seed = seed;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd score = Eigen::VectorXd::Zero(n);
  double bound = 1.0;

  for (int t = 0; t < rounds; ++t) {
    const StumpFit fit = search.fit(y, w);
    if (fit.error >= 0.5) break;
    const bool perfect = fit.error <= kTieTolerance;
    const double alpha = perfect ? kAlphaCap : std::min(kAlphaCap, std::log((1.0 - fit.error) / fit.error));

    e.stumps.push_back(fit.stump);
    e.alphas.push_back(alpha);
    e.errors.push_back(fit.error);
    bound *= perfect ? 0.0 : 2.0 * std::sqrt(fit.error * (1.0 - fit.error));
    e.bound.push_back(bound);

    std::size_t wrong = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int h = fit.stump.predict(x.row(i));
      score(i) += alpha * (2.0 * h - 1.0);
      if ((score(i) > 0.0 ? 1 : 0) != y[static_cast<std::size_t>(i)]) ++wrong;
      if (h != y[static_cast<std::size_t>(i)]) w(i) *= std::exp(alpha);
    }
    e.train_error.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    w /= w.sum();
    if (on_round) on_round(t, w);
    if (perfect) break;
  }
  return e;
}

Prediction predict(const StumpEnsemble& e, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  double s = 0.0, total = 0.0;
  for (std::size_t t = 0; t < e.stumps.size(); ++t) {
    s += e.alphas[t] * (2.0 * e.stumps[t].predict(x) - 1.0);
    total += e.alphas[t];
  }
  Prediction p;
  p.label = s > 0.0 ? 1 : 0;
  p.margin = total > 0.0 ? std::clamp(s / total, -1.0, 1.0) : 0.0;
  return p;
}

std::vector<int> predict_labels(const StumpEnsemble& e, const Eigen::MatrixXd& x) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(predict(e, x.row(i)).label);
  return out;
}

int select_rounds(const Eigen::MatrixXd& x, const std::vector<int>& y, const std::vector<int>& groups,
                  const std::vector<int>& grid) {
  if (grid.empty()) throw Error(Errc::InvalidArgument, "empty rounds grid");
  if (groups.size() != y.size()) throw Error(Errc::InvalidArgument, "one group per sample required");
  std::vector<int> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  const int max_rounds = sorted.back();

  std::vector<int> fold_of(y.size());
  const std::set<int> distinct(groups.begin(), groups.end());
  if (distinct.size() >= 2) {
    std::map<int, int> index;
    for (int g : distinct) index.emplace(g, static_cast<int>(index.size()));
    for (std::size_t i = 0; i < y.size(); ++i) fold_of[i] = index.at(groups[i]);
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) fold_of[i] = static_cast<int>(i % 5);
  }
  const int n_folds = *std::max_element(fold_of.begin(), fold_of.end()) + 1;

  std::vector<double> correct(sorted.size(), 0.0);
  double evaluated = 0.0;
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Eigen::Index> tr, te;
    for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
    if (te.empty() || tr.size() < 2) continue;
    std::vector<int> ytr;
    for (auto i : tr) ytr.push_back(y[static_cast<std::size_t>(i)]);
    if (std::count(ytr.begin(), ytr.end(), 1) == 0 || std::count(ytr.begin(), ytr.end(), 0) == 0) continue;
    const Eigen::MatrixXd xtr = x(tr, Eigen::all);
    const StumpEnsemble e = train_adaboost(xtr, ytr, max_rounds);

    for (auto i : te) {
      double s = 0.0;
      std::size_t g = 0;
      for (std::size_t t = 0; t <= e.size() && g < sorted.size(); ++t) {
        while (g < sorted.size() && static_cast<std::size_t>(sorted[g]) == t) {
          if ((s > 0.0 ? 1 : 0) == y[static_cast<std::size_t>(i)]) correct[g] += 1.0;
          ++g;
        }
        if (t < e.size()) s += e.alphas[t] * (2.0 * e.stumps[t].predict(x.row(i)) - 1.0);
      }
      // Grid values beyond an early exit see the full ensemble.
      for (; g < sorted.size(); ++g)
        if ((s > 0.0 ? 1 : 0) == y[static_cast<std::size_t>(i)]) correct[g] += 1.0;
    }
    evaluated += static_cast<double>(te.size());
  }
  if (evaluated == 0.0) throw Error(Errc::Degenerate, "no usable cross-validation fold");
  std::size_t best = 0;
  for (std::size_t g = 1; g < sorted.size(); ++g)
    if (correct[g] > correct[best]) best = g;
  return sorted[best];
}

}  // namespace scb::boost
