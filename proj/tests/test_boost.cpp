#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "scb/boost/adaboost.hpp"
#include "scb/boost/baselines.hpp"
#include "scb/boost/evaluate.hpp"
#include "scb/boost/folds.hpp"
#include "scb/boost/projection.hpp"
#include "scb/boost/stump.hpp"
#include "scb/common/error.hpp"
#include "support/ref_adaboost.hpp"

using namespace scb;
using namespace scb::boost;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> v) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double e : v) x(i++, 0) = e;
  return x;
}

Eigen::VectorXd uniform(Eigen::Index n) { return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)); }

template <class F>
void expect_errc(Errc code, F&& f) {
  try {
    f();
    FAIL("expected " << errc_name(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("stump on separable 1-D data") {
  const auto x = column({0, 1, 2, 3});
  const StumpFit fit = train_stump(x, {0, 0, 1, 1}, uniform(4));
  CHECK(fit.stump.feature == 0);
  CHECK(fit.stump.threshold == 1.5);
  CHECK(fit.stump.polarity == 1);
  CHECK(fit.error == 0.0);
}

TEST_CASE("stump follows a heavy mislabeled point") {
  const auto x = column({0, 1, 2, 3});
  const std::vector<int> y{0, 1, 0, 1};
  Eigen::VectorXd w(4);
  w << 0.1, 0.7, 0.1, 0.1;
  const StumpFit fit = train_stump(x, y, w);
  CHECK(fit.stump.predict(x.row(1)) == 1);
  CHECK(fit.error <= 0.3);

  const std::vector<double> wv(w.data(), w.data() + 4);
  const auto [ref, ref_err] = testing::ref_best_stump(x, y, wv);
  CHECK(fit.error == doctest::Approx(ref_err).epsilon(1e-12));
  CHECK(fit.stump.threshold == ref.threshold);
  CHECK(fit.stump.polarity == ref.polarity);
}

TEST_CASE("stump matches brute force on random weighted data") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXd x(25, 4);
    std::vector<int> y(25);
    std::vector<double> wv(25);
    for (Eigen::Index i = 0; i < 25; ++i) {
      for (Eigen::Index f = 0; f < 4; ++f) x(i, f) = level(rng);  // repeated values exercise ties
      y[static_cast<std::size_t>(i)] = u(rng) < 0.5 ? 0 : 1;
      wv[static_cast<std::size_t>(i)] = u(rng);
    }
    y[0] = 0;
    y[1] = 1;
    const double s = std::accumulate(wv.begin(), wv.end(), 0.0);
    for (auto& v : wv) v /= s;
    const Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(wv.data(), 25);
    const StumpFit fit = train_stump(x, y, w);
    const auto [ref, ref_err] = testing::ref_best_stump(x, y, wv);
    CHECK(fit.error == doctest::Approx(ref_err).epsilon(1e-12));
    CHECK(fit.stump.feature == ref.feature);
    CHECK(fit.stump.threshold == ref.threshold);
    CHECK(fit.stump.polarity == ref.polarity);
  }
}

TEST_CASE("stump rejects degenerate input") {
  const auto x = column({0, 1, 2, 3});
  expect_errc(Errc::Degenerate, [&] { train_stump(x, {1, 1, 1, 1}, uniform(4)); });
  expect_errc(Errc::Degenerate, [&] { train_stump(column({2, 2, 2, 2}), {0, 1, 0, 1}, uniform(4)); });
  expect_errc(Errc::InvalidArgument, [&] { train_stump(x, {0, 0, 1, 1}, Eigen::VectorXd::Constant(4, 0.5)); });
}

TEST_CASE("stump predictions are binary for any finite input") {
  const Stump s{0, 0.25, -1};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1e6);
  for (int i = 0; i < 1000; ++i) {
    Eigen::RowVectorXd x(1);
    x(0) = g(rng);
    const int p = s.predict(x);
    CHECK((p == 0 || p == 1));
  }
}

TEST_CASE("alpha for a round with error 0.2") {
  // Five points, one of which no single threshold can fit: first-round error 1/5.
  const auto x = column({0, 1, 2, 3, 4});
  const std::vector<int> y{0, 0, 1, 0, 1};
  Eigen::VectorXd seen;
  const StumpEnsemble e = train_adaboost(x, y, 1, 0, [&](int, const Eigen::VectorXd& w) { seen = w; });
  REQUIRE(e.size() == 1);
  CHECK(e.errors[0] == doctest::Approx(0.2));
  CHECK(e.alphas[0] == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(e.alphas[0] == doctest::Approx(1.3863).epsilon(1e-4));

  // Independent trace: one misclassified point weighted 0.2 * 4 against four
  // at 0.2, so after renormalisation it carries half the mass.
  int wrong = -1;
  for (int i = 0; i < 5; ++i)
    if (e.stumps[0].predict(x.row(i)) != y[static_cast<std::size_t>(i)]) wrong = i;
  REQUIRE(wrong >= 0);
  for (int i = 0; i < 5; ++i) CHECK(seen(i) == doctest::Approx(i == wrong ? 0.5 : 0.125).epsilon(1e-12));
}

TEST_CASE("separable set stops after one capped round") {
  Eigen::MatrixXd x(6, 2);
  x << 0, 5, 1, 4, 2, 3, 10, 2, 11, 1, 12, 0;
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const StumpEnsemble e = train_adaboost(x, y, 50);
  CHECK(e.size() == 1);
  CHECK(e.alphas[0] == kAlphaCap);
  CHECK(e.n_rounds == 50);
  CHECK(predict_labels(e, x) == y);
  CHECK(e.train_error.back() == 0.0);
}

TEST_CASE("adaboost requires both classes") {
  expect_errc(Errc::Degenerate, [] { train_adaboost(column({0, 1, 2}), {1, 1, 1}, 5); });
  expect_errc(Errc::InvalidArgument, [] { train_adaboost(column({0, 1, 2}), {0, 1, 1}, 0); });
}

TEST_CASE("adaboost equals the reference implementation") {
  Eigen::MatrixXd x, held;
  std::vector<int> y, held_y;
  testing::gaussian_two_class(200, 64, 8, 0.6, 11, x, y);
  testing::gaussian_two_class(100, 64, 8, 0.6, 12, held, held_y);
  const StumpEnsemble e = train_adaboost(x, y, 50);
  const testing::RefModel ref = testing::ref_adaboost(x, y, 50);

  REQUIRE(e.size() == ref.stumps.size());
  CHECK(e.size() == 50);
  for (std::size_t t = 0; t < e.size(); ++t) {
    CHECK(e.stumps[t].feature == ref.stumps[t].feature);
    CHECK(e.stumps[t].threshold == ref.stumps[t].threshold);
    CHECK(e.stumps[t].polarity == ref.stumps[t].polarity);
    CHECK(e.alphas[t] == doctest::Approx(ref.alphas[t]).epsilon(1e-9));
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(predict(e, x.row(i)).label == ref.predict(x.row(i)));
  for (Eigen::Index i = 0; i < held.rows(); ++i) CHECK(predict(e, held.row(i)).label == ref.predict(held.row(i)));
}

TEST_CASE("training error stays under a non-increasing bound and weights stay normalised") {
  Eigen::MatrixXd x;
  std::vector<int> y;
  testing::gaussian_two_class(150, 16, 4, 0.8, 5, x, y);
  double worst_sum = 0.0;
  const StumpEnsemble e = train_adaboost(x, y, 80, 0, [&](int, const Eigen::VectorXd& w) {
    worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    CHECK((w.array() >= 0.0).all());
  });
  CHECK(worst_sum <= 1e-12);
  REQUIRE(e.size() > 10);
  for (std::size_t t = 0; t < e.size(); ++t) {
    CHECK(std::isfinite(e.alphas[t]));
    CHECK(e.train_error[t] <= e.bound[t] + 1e-12);
    if (t > 0) CHECK(e.bound[t] <= e.bound[t - 1]);
  }
}

TEST_CASE("predict: single stump and tie") {
  StumpEnsemble one;
  one.stumps = {{0, 0.5, 1}};
  one.alphas = {0.7};
  Eigen::RowVectorXd x(1);
  x << 2.0;
  const Prediction p = predict(one, x);
  CHECK(p.label == 1);
  CHECK(p.margin == 1.0);

  StumpEnsemble two;
  two.stumps = {{0, 0.5, 1}, {0, 0.5, -1}};
  two.alphas = {1.1, 1.1};
  const Prediction q = predict(two, x);
  CHECK(q.label == 0);
  CHECK(q.margin == 0.0);

  CHECK(predict(StumpEnsemble{}, x).label == 0);
}

TEST_CASE("predicted labels are invariant to rescaling alphas") {
  Eigen::MatrixXd x;
  std::vector<int> y;
  testing::gaussian_two_class(120, 8, 3, 0.7, 9, x, y);
  const StumpEnsemble e = train_adaboost(x, y, 30);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    StumpEnsemble s = e;
    for (auto& a : s.alphas) a *= c;
    CHECK(predict_labels(s, x) == predict_labels(e, x));
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(predict(s, x.row(i)).margin == doctest::Approx(predict(e, x.row(i)).margin));
  }
}

TEST_CASE("prefix ensembles match retraining with fewer rounds") {
  Eigen::MatrixXd x;
  std::vector<int> y;
  testing::gaussian_two_class(100, 6, 2, 0.9, 21, x, y);
  const StumpEnsemble full = train_adaboost(x, y, 40);
  const StumpEnsemble short_run = train_adaboost(x, y, 15);
  const StumpEnsemble pre = full.prefix(15);
  CHECK(pre.stumps == short_run.stumps);
  CHECK(pre.alphas == short_run.alphas);
}

TEST_CASE("select_rounds picks from the grid and prefers fewer rounds on ties") {
  Eigen::MatrixXd x(40, 1);
  std::vector<int> y(40), groups(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i;
    y[static_cast<std::size_t>(i)] = i >= 20 ? 1 : 0;
    groups[static_cast<std::size_t>(i)] = i % 4;
  }
  // Separable: every grid value is perfect, so the smallest wins.
  CHECK(select_rounds(x, y, groups, {10, 5, 20}) == 5);

  Eigen::MatrixXd g;
  std::vector<int> gy;
  testing::gaussian_two_class(120, 10, 3, 0.8, 2, g, gy);
  const int t = select_rounds(g, gy, std::vector<int>(120, 0), {5, 25});
  CHECK((t == 5 || t == 25));
  expect_errc(Errc::InvalidArgument, [&] { select_rounds(g, gy, std::vector<int>(120, 0), {}); });
}

TEST_CASE("LDA boundary sits at zero for symmetric classes") {
  Eigen::MatrixXd x(8, 1);
  x << -1.5, -1.0, -0.5, -1.0, 0.5, 1.0, 1.5, 1.0;
  const std::vector<int> y{0, 0, 0, 0, 1, 1, 1, 1};
  const LdaModel m = train_lda(x, y, 0.0);
  Eigen::RowVectorXd p(1);
  p << 0.0;
  CHECK(m.decision(p) == doctest::Approx(0.0).epsilon(1e-12));
  p << 1e-6;
  CHECK(predict_lda(m, p) == 1);
  p << -1e-6;
  CHECK(predict_lda(m, p) == 0);
  p << 0.0;
  CHECK(predict_lda(m, p) == 0);
}

TEST_CASE("LDA with full shrinkage is nearest scaled mean") {
  Eigen::MatrixXd x;
  std::vector<int> y;
  testing::gaussian_two_class(80, 5, 5, 1.0, 4, x, y);
  const LdaModel m = train_lda(x, y, 1.0);
  // With an isotropic covariance the discriminant compares Euclidean
  // distances to the class means (equal priors here).
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd v = x.row(i).transpose();
    const int nearest = (v - m.mean1).squaredNorm() < (v - m.mean0).squaredNorm() ? 1 : 0;
    CHECK(predict_lda(m, x.row(i)) == nearest);
  }
}

TEST_CASE("LDA errors") {
  Eigen::MatrixXd x(4, 3);
  x << 1, 1, 0, 2, 2, 0, 3, 3, 0, 4, 4, 0;  // rank-deficient
  const std::vector<int> y{0, 0, 1, 1};
  expect_errc(Errc::Singular, [&] { train_lda(x, y, 0.0); });
  CHECK_NOTHROW(train_lda(x, y, 0.5));
  expect_errc(Errc::InvalidArgument, [&] { train_lda(x, y, 1.5); });
  expect_errc(Errc::Degenerate, [&] { train_lda(x, {1, 1, 1, 1}, 0.5); });
}

TEST_CASE("LDA on Gaussian data is competitive with AdaBoost") {
  Eigen::MatrixXd x, t;
  std::vector<int> y, ty;
  testing::gaussian_two_class(400, 64, 8, 0.6, 31, x, y);
  testing::gaussian_two_class(400, 64, 8, 0.6, 32, t, ty);
  const LdaModel lda = train_lda(x, y, 0.2);
  const StumpEnsemble ens = train_adaboost(x, y, 200);
  double lda_acc = 0.0, ada_acc = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    lda_acc += predict_lda(lda, t.row(i)) == ty[static_cast<std::size_t>(i)];
    ada_acc += predict(ens, t.row(i)).label == ty[static_cast<std::size_t>(i)];
  }
  lda_acc /= 400.0;
  ada_acc /= 400.0;
  MESSAGE("LDA " << lda_acc << " AdaBoost " << ada_acc);
  CHECK(lda_acc >= ada_acc - 0.05);
}

TEST_CASE("tree fits axis-aligned structure and respects limits") {
  Eigen::MatrixXd x(40, 2);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i % 10;
    x(i, 1) = i / 10;
    y[static_cast<std::size_t>(i)] = (i % 10 >= 5 && i / 10 >= 2) ? 1 : 0;
  }
  const TreeModel m = train_tree(x, y, 4, 5);
  for (int i = 0; i < 40; ++i) CHECK(predict_tree(m, x.row(i)) == y[static_cast<std::size_t>(i)]);

  const TreeModel stump = train_tree(x, y, 0, 5);
  CHECK(stump.nodes.size() == 1);
  CHECK(stump.nodes[0].label == 0);

  std::function<int(int)> depth = [&](int n) -> int {
    const auto& nd = m.nodes[static_cast<std::size_t>(n)];
    return nd.feature < 0 ? 0 : 1 + std::max(depth(nd.left), depth(nd.right));
  };
  CHECK(depth(0) <= 4);
}

TEST_CASE("evaluate: closed-form counts") {
  std::vector<int> preds, labels;
  auto add = [&](int p, int l, int k) {
    for (int i = 0; i < k; ++i) {
      preds.push_back(p);
      labels.push_back(l);
    }
  };
  add(1, 1, 43);
  add(1, 0, 7);
  add(0, 1, 7);
  add(0, 0, 43);
  const EvalReport r = evaluate(preds, labels, Level::Window);
  CHECK(r.confusion == Confusion{43, 7, 7, 43});
  CHECK(r.n == 100);
  CHECK(r.accuracy == doctest::Approx(0.86));
  CHECK(r.f1 == doctest::Approx(0.86));
  CHECK(r.macro_f1 == doctest::Approx(0.86));
  CHECK(r.ci95.lo <= r.accuracy);
  CHECK(r.ci95.hi >= r.accuracy);
  CHECK(r.f1_ci95.lo <= r.f1);
  CHECK(r.f1_ci95.hi >= r.f1);
  CHECK(r.macro_f1_ci95.lo <= r.macro_f1);
  CHECK(r.macro_f1_ci95.hi >= r.macro_f1);
}

TEST_CASE("Wilson interval matches the quadratic-root form") {
  const Interval ci = wilson_interval(86, 100);
  CHECK(ci.lo == doctest::Approx(0.778).epsilon(1e-3));
  CHECK(ci.hi == doctest::Approx(0.914).epsilon(1e-3));

  // The bounds are the roots p of (phat - p)^2 = z^2 p (1 - p) / n.
  const double z = 1.959963984540054;
  for (auto [k, n] : {std::pair{86, 100}, {3, 17}, {50, 50}, {0, 9}, {412, 1000}}) {
    const double phat = static_cast<double>(k) / n, c = z * z / n;
    const double a = 1.0 + c, b = -(2.0 * phat + c), cc = phat * phat;
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * cc));
    const Interval w = wilson_interval(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    CHECK(w.lo == doctest::Approx((-b - disc) / (2.0 * a)).epsilon(1e-12));
    CHECK(w.hi == doctest::Approx((-b + disc) / (2.0 * a)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate: perfect predictions and errors") {
  const std::vector<int> labels{0, 1, 1, 0, 1, 0, 0, 1};
  const EvalReport r = evaluate(labels, labels, Level::Window);
  CHECK(r.accuracy == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.ci95.hi == 1.0);

  const std::vector<int> rest(5, 0);
  CHECK(evaluate(rest, rest, Level::Window).macro_f1 == 1.0);

  expect_errc(Errc::EmptyInput, [] { evaluate({}, {}, Level::Window); });
  expect_errc(Errc::InvalidArgument, [] { evaluate({1}, {1, 0}, Level::Window); });
  expect_errc(Errc::InvalidArgument, [] { evaluate({1}, {1}, Level::Trial); });
}

TEST_CASE("evaluate is invariant to sample order") {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.5), agree(0.8);
  std::vector<int> preds(300), labels(300);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    labels[i] = coin(rng);
    preds[i] = agree(rng) ? labels[i] : 1 - labels[i];
  }
  const auto base = to_json(evaluate(preds, labels, Level::Window, nullptr, 5));
  for (int k = 0; k < 5; ++k) {
    std::vector<std::size_t> perm(preds.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> p2, l2;
    for (auto i : perm) {
      p2.push_back(preds[i]);
      l2.push_back(labels[i]);
    }
    CHECK(to_json(evaluate(p2, l2, Level::Window, nullptr, 5)) == base);
  }
}

TEST_CASE("trial-level votes") {
  // Trial 7: 2 of 3 move (move); trial 3: 1 of 2 move (tie -> rest); trial 5: rest.
  const std::vector<int> trial{7, 3, 7, 3, 7, 5, 5};
  const std::vector<int> preds{1, 1, 1, 0, 0, 0, 0};
  const std::vector<int> labels{1, 1, 1, 1, 1, 0, 0};
  const TrialVotes v = vote_trials(preds, labels, trial);
  CHECK(v.trial_ids == std::vector<int>{3, 5, 7});
  CHECK(v.preds == std::vector<int>{0, 0, 1});
  CHECK(v.labels == std::vector<int>{1, 0, 1});
  const EvalReport r = evaluate(preds, labels, Level::Trial, &trial);
  CHECK(r.n == 3);
  CHECK(r.confusion == Confusion{1, 0, 1, 1});
  CHECK(r.level == Level::Trial);
}

TEST_CASE("report JSON round trip") {
  EvalReport r = evaluate({1, 0, 1, 1, 0}, {1, 0, 0, 1, 1}, Level::Window, nullptr, 3, 200);
  r.classifier = "adaboost";
  r.folds.push_back({"S01", 5, 0.6, 0.66, 0.58});
  r.latency_ref = "latency.json";
  r.diagnostics["silhouette_latent"] = 0.25;
  const auto j = to_json(r);
  CHECK(j.begin().key() == "schema_version");
  const EvalReport back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back) == j);
  expect_errc(Errc::InvalidArgument, [] { report_from_json(nlohmann::json::parse(R"({"schema_version": 9})")); });
  expect_errc(Errc::InvalidArgument, [] { report_from_json(nlohmann::json::parse(R"({"schema_version": 1})")); });
}

TEST_CASE("LOSO folds") {
  const std::vector<std::string> subj{"B", "A", "C", "A", "B", "C", "C"};
  const auto folds = loso_folds(subj);
  REQUIRE(folds.size() == 3);
  CHECK(folds[0].held_out == "A");
  CHECK(folds[0].test == std::vector<std::size_t>{1, 3});
  CHECK(folds[2].test == std::vector<std::size_t>{2, 5, 6});
  expect_errc(Errc::SingleSubject, [] { loso_folds({"A", "A"}); });
  expect_errc(Errc::SingleSubject, [] { loso_folds({}); });
}

TEST_CASE("LOSO never leaks a held-out subject into training") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> ns(2, 8), len(2, 60);
    const int n_subj = ns(rng);
    std::uniform_int_distribution<int> pick(0, n_subj - 1);
    std::vector<std::string> subj(static_cast<std::size_t>(len(rng)));
    for (auto& s : subj) s = "S" + std::to_string(pick(rng));
    subj[0] = "S0";
    subj[1] = "S1";
    const auto folds = loso_folds(subj);
    CHECK(folds.size() == std::set<std::string>(subj.begin(), subj.end()).size());
    std::vector<int> tested(subj.size(), 0);
    for (const auto& f : folds) {
      std::set<std::string> tr, te;
      for (auto i : f.train) tr.insert(subj[i]);
      for (auto i : f.test) {
        te.insert(subj[i]);
        ++tested[i];
      }
      CHECK(te == std::set<std::string>{f.held_out});
      CHECK(tr.count(f.held_out) == 0);
      CHECK(f.train.size() + f.test.size() == subj.size());
    }
    CHECK(std::all_of(tested.begin(), tested.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("k-fold partitions the samples") {
  const auto folds = kfold(23, 5, 4);
  REQUIRE(folds.size() == 5);
  std::vector<int> seen(23, 0);
  for (const auto& f : folds) {
    CHECK(f.train.size() + f.test.size() == 23);
    for (auto i : f.test) ++seen[i];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  CHECK(kfold(23, 5, 4)[2].test == folds[2].test);
  expect_errc(Errc::InvalidArgument, [] { kfold(3, 5, 0); });
}

TEST_CASE("silhouette of well separated and identical clusters") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd x(60, 5);
  std::vector<int> y(60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    y[static_cast<std::size_t>(i)] = i < 30 ? 0 : 1;
    for (Eigen::Index f = 0; f < 5; ++f) x(i, f) = g(rng) + (i >= 30 && f == 0 ? 10.0 : 0.0);
  }
  const Projection p = project_latents_2d(x, y);
  CHECK(p.coords.rows() == 60);
  CHECK(p.coords.cols() == 2);
  CHECK(p.silhouette > 0.8);

  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(10, 3);
  std::vector<int> half(10);
  for (int i = 0; i < 10; ++i) half[static_cast<std::size_t>(i)] = i % 2;
  CHECK(project_latents_2d(same, half).silhouette <= 0.0);
  expect_errc(Errc::InvalidArgument, [] { project_latents_2d(Eigen::MatrixXd::Zero(2, 3), {0, 1}); });
}

TEST_CASE("silhouette agrees with a direct computation") {
  Eigen::MatrixXd pts(5, 1);
  pts << 0, 1, 5, 6, 7;
  const std::vector<int> lab{0, 0, 1, 1, 1};
  auto s = [](double a, double b) { return (b - a) / std::max(a, b); };
  const double expected = (s(1.0, 6.0) + s(1.0, 5.0) + s(1.5, 4.5) + s(1.0, 5.5) + s(1.5, 6.5)) / 5.0;
  CHECK(silhouette(pts, lab) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("PCA projection is deterministic and wide data uses the same axes") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd tall(40, 6);
  for (Eigen::Index i = 0; i < tall.size(); ++i) tall(i) = g(rng) * (1.0 + static_cast<double>(i % 6));
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) y[static_cast<std::size_t>(i)] = i % 2;
  const Projection a = project_latents_2d(tall, y);
  const Projection b = project_latents_2d(tall, y);
  CHECK(a.coords == b.coords);

  // Same points padded with zero columns past n: the Gram path must agree.
  Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(40, 60);
  wide.leftCols(6) = tall;
  const Projection w = project_latents_2d(wide, y);
  CHECK((w.coords - a.coords).cwiseAbs().maxCoeff() < 1e-8);
}
