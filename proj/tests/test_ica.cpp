#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "scb/common/error.hpp"
#include "scb/dsp/recording.hpp"
#include "scb/ica/ica.hpp"
#include "support/ica_fixture.hpp"

using namespace scb;
using namespace scb::ica;
using namespace scb::testing;

namespace {

double cov_identity_error(const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd c = (z * z.transpose()) / static_cast<double>(z.cols());
  return (c - Eigen::MatrixXd::Identity(z.rows(), z.rows())).norm();
}

}  // namespace

TEST_CASE("whiten: identity-covariance input is a fixed point") {
  const auto pre = whiten(random_matrix(12, 4000, 1));
  const auto again = whiten(pre.z);
  CHECK(cov_identity_error(again.z) < 1e-8);
  CHECK((again.whitener.cwiseAbs() - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-6);
  CHECK(again.z.rowwise().mean().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("whiten: channels with very different scales") {
  Eigen::MatrixXd x = random_matrix(12, 5000, 2);
  for (int r = 0; r < 12; ++r) x.row(r) *= (r + 1);
  x.array() += 50.0;
  const auto wr = whiten(x);
  CHECK(cov_identity_error(wr.z) < 1e-8);
  CHECK((wr.dewhitener * wr.whitener - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-10);
}

TEST_CASE("whiten: duplicated channel is rank deficient") {
  Eigen::MatrixXd x = random_matrix(12, 2000, 3);
  x.row(7) = x.row(2);
  try {
    whiten(x);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RankDeficient);
  }
  CHECK_THROWS_AS(whiten(random_matrix(12, 100, 4)), Error);
}

TEST_CASE("fast_ica: four mixed sources recovered (Amari < 0.05)") {
  const auto s = source_bank(4, 6000, 10);
  const auto a = random_matrix(12, 4, 11);
  const auto x = mixed_recording(s, a, 1e-3, 12);
  const auto model = fit(x, {.k = 4, .tol = 1e-7, .max_iter = 1000, .seed = 5});
  CHECK(model.converged);
  const double ai = amari_index(model.channel_unmixing() * a);
  CHECK(ai < 0.05);
}

TEST_CASE("fast_ica: independent unit sources give a signed permutation") {
  const auto s = source_bank(4, 8000, 20);
  const auto wr = whiten(s);
  const auto model = fast_ica(wr.z, 4, 1e-8, 1000, 9);
  CHECK(model.converged);
  for (Eigen::Index i = 0; i < 4; ++i) {
    int big = 0;
    for (Eigen::Index j = 0; j < 4; ++j) big += std::abs(model.unmix(i, j)) > 0.99 ? 1 : 0;
    CHECK(big == 1);
  }
}

TEST_CASE("fast_ica: iteration cap reports non-convergence") {
  const auto s = source_bank(8, 4000, 30);
  const auto x = mixed_recording(s, random_matrix(12, 8, 31), 1e-2, 32);
  const auto wr = whiten(x);
  const auto model = fast_ica(wr.z, 8, 1e-6, 5, 1);
  CHECK_FALSE(model.converged);
  CHECK(model.iterations == 5);
  CHECK(model.unmix.rows() == 8);
  CHECK(std::isfinite(model.final_delta));
}

TEST_CASE("fast_ica: deterministic per seed") {
  const auto s = source_bank(5, 3000, 40);
  const auto x = mixed_recording(s, random_matrix(12, 5, 41), 1e-3, 42);
  const auto m1 = fit(x, {.k = 5, .seed = 77});
  const auto m2 = fit(x, {.k = 5, .seed = 77});
  CHECK(m1.unmix == m2.unmix);
  CHECK(m1.mixing == m2.mixing);
  CHECK(m1.iterations == m2.iterations);
}

TEST_CASE("fast_ica: Amari < 0.1 on random mixtures in at least 9 of 10 seeds (k = 4..8)") {
  int good = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const int k = 4 + seed % 5;
    const auto s = source_bank(k, 6000, 100 + seed);
    const auto a = random_matrix(12, k, 200 + seed);
    const auto x = mixed_recording(s, a, 1e-3, 300 + seed);
    const auto model = fit(x, {.k = k, .tol = 1e-7, .max_iter = 1000, .seed = static_cast<std::uint64_t>(seed)});
    const double ai = amari_index(model.channel_unmixing() * a);
    MESSAGE("seed " << seed << " k " << k << " amari " << ai);
    if (ai < 0.1) ++good;
  }
  CHECK(good >= 9);
}

TEST_CASE("unmixing model: unit-variance, decorrelated components and a consistent mixing matrix") {
  const auto s = source_bank(6, 5000, 50);
  const auto x = mixed_recording(s, random_matrix(12, 6, 51), 0.05, 52);
  const auto model = fit(x, {.k = 12, .seed = 3});
  const auto comps = model.sources(x);
  const Eigen::MatrixXd c = (comps * comps.transpose()) / static_cast<double>(comps.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    CHECK(std::abs(c(i, i) - 1.0) < 1e-6);
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (i != j) CHECK(std::abs(c(i, j)) < 1e-3);
  }
  CHECK((model.channel_unmixing() * model.mixing - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("remove_components: round trips and edge cases") {
  const auto s = source_bank(6, 4000, 60);
  Eigen::MatrixXd x = mixed_recording(s, random_matrix(12, 6, 61), 0.05, 62);
  x.array() += 3.0;
  const auto full = fit(x, {.k = 12, .seed = 1});

  SUBCASE("nothing rejected reproduces the input") {
    const auto y = remove_components(full, x, {});
    CHECK(std::sqrt((y - x).squaredNorm() / static_cast<double>(x.size())) < 1e-6);
  }
  SUBCASE("reduced k reproduces the projection onto the retained subspace") {
    const auto part = fit(x, {.k = 6, .seed = 1});
    const auto y = remove_components(part, x, {});
    const Eigen::MatrixXd proj = part.mixing * part.channel_unmixing();
    const Eigen::MatrixXd expected = (proj * (x.colwise() - part.mean)).colwise() + part.mean;
    CHECK(std::sqrt((y - expected).squaredNorm() / static_cast<double>(x.size())) < 1e-6);
    CHECK((part.channel_unmixing() * part.mixing - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("everything rejected leaves the channel means") {
    std::set<int> all;
    for (int i = 0; i < 12; ++i) all.insert(i);
    const auto y = remove_components(full, x, all);
    const Eigen::VectorXd mean = x.rowwise().mean();
    CHECK(((y.colwise() - mean).cwiseAbs().maxCoeff()) < 1e-9);
  }
  SUBCASE("bad index") {
    CHECK_THROWS_AS(remove_components(full, x, {12}), Error);
    CHECK_THROWS_AS(remove_components(full, x, {-1}), Error);
  }
}

TEST_CASE("score_components and blink removal") {
  const double fs = 250.0;
  const Eigen::Index n = 250 * 60;
  const auto channels = dsp::decoder_channel_list();
  std::mt19937_64 rng(70);
  std::normal_distribution<double> nd(0.0, 1.0);

  // Clean "EEG": ten mixed Gaussian sources plus a broad 10 Hz rhythm, so that
  // with the blink there are as many sources as channels.
  Eigen::MatrixXd clean = random_matrix(12, 10, 71) * random_matrix(10, n, 72) * 5.0;
  Eigen::VectorXd broad = Eigen::VectorXd::Constant(12, 4.0);
  Eigen::RowVectorXd alpha(n);
  for (Eigen::Index t = 0; t < n; ++t) alpha(t) = std::sin(2.0 * kPi * 10.0 * static_cast<double>(t) / fs);
  clean += broad * alpha;

  // Blink: one positive 1 Hz half-wave bump per second, strongest at F7/F3/F4/F8.
  Eigen::RowVectorXd blink = Eigen::RowVectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double within = std::fmod(static_cast<double>(t), 3.0 * fs);
    if (within < 0.5 * fs) blink(t) = 80.0 * std::sin(kPi * within / (0.5 * fs));
  }
  Eigen::VectorXd blink_w = Eigen::VectorXd::Constant(12, 0.05);
  for (Eigen::Index c = 0; c < 12; ++c) {
    const auto& name = channels[static_cast<std::size_t>(c)];
    if (name == "F7" || name == "F3" || name == "F4" || name == "F8") blink_w(c) = 1.0;
  }
  const Eigen::MatrixXd x = clean + blink_w * blink;

  const auto model = fit(x, {.k = 12, .seed = 4});
  const auto scores = score_components(model, x, fs, channels);
  REQUIRE(scores.size() == 12);

  // The component most correlated with the blink waveform.
  const auto comps = model.sources(x);
  int blink_idx = 0, alpha_idx = 0;
  double best_b = 0.0, best_a = 0.0;
  for (int i = 0; i < 12; ++i) {
    const Eigen::RowVectorXd c = comps.row(i);
    const double cb = std::abs((c.array() * (blink.array() - blink.mean())).sum()) / (c.norm() * (blink.array() - blink.mean()).matrix().norm());
    const double ca = std::abs(c.dot(alpha)) / (c.norm() * alpha.norm());
    if (cb > best_b) { best_b = cb; blink_idx = i; }
    if (ca > best_a) { best_a = ca; alpha_idx = i; }
  }
  CHECK(best_b > 0.95);
  CHECK(scores[static_cast<std::size_t>(blink_idx)].verdict == Verdict::Artifact);
  CHECK(scores[static_cast<std::size_t>(alpha_idx)].verdict == Verdict::Neural);
  for (const auto& sc : scores) {
    CHECK(sc.low_freq_ratio >= 0.0);
    CHECK(sc.low_freq_ratio <= 1.0);
    CHECK(sc.spatial_frontal_ratio >= 0.0);
    CHECK(sc.spatial_frontal_ratio <= 1.0);
  }

  // The blink's DC offset lives in the channel means, not in a component.
  const Eigen::MatrixXd cleaned = remove_components(model, x, {blink_idx});
  const Eigen::MatrixXd diff = (cleaned - clean).colwise() - (cleaned - clean).rowwise().mean();
  const double err = std::sqrt(diff.squaredNorm() / static_cast<double>(x.size()));
  const double blink_rms = std::sqrt((blink_w * blink).squaredNorm() / static_cast<double>(x.size()));
  CHECK(err < 0.25 * blink_rms);
}

TEST_CASE("score rules on single components") {
  SUBCASE("gaussian noise has near-zero excess kurtosis") {
    std::mt19937_64 rng(80);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::RowVectorXd v(200000);
    for (auto& e : v) e = nd(rng);
    CHECK(std::abs(excess_kurtosis(v)) < 0.05);
    ComponentScore sc{0, excess_kurtosis(v), 0.1, 0.3, Verdict::Neural};
    CHECK(classify(sc, {}) == Verdict::Neural);
  }
  SUBCASE("pure sinusoid") {
    Eigen::RowVectorXd v(10000);
    for (Eigen::Index t = 0; t < v.size(); ++t) v(t) = std::sin(2.0 * kPi * 10.0 * static_cast<double>(t) / 250.0);
    CHECK(excess_kurtosis(v) == doctest::Approx(-1.5).epsilon(0.01));
  }
  SUBCASE("thresholds") {
    CHECK(classify({0, 9.0, 0.0, 0.0, Verdict::Neural}, {}) == Verdict::Artifact);
    CHECK(classify({0, 1.0, 0.7, 0.6, Verdict::Neural}, {}) == Verdict::Artifact);
    CHECK(classify({0, 1.0, 0.7, 0.4, Verdict::Neural}, {}) == Verdict::Neural);
    CHECK(classify({0, 1.0, 0.5, 0.9, Verdict::Neural}, {}) == Verdict::Neural);
  }
}
