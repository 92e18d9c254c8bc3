#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <cmath>
#include <random>

#include "scb/cae/half.hpp"
#include "scb/cae/model_file.hpp"
#include "scb/cae/network.hpp"
#include "scb/cae/quantize.hpp"
#include "scb/cae/params.hpp"
#include "scb/cae/train.hpp"
#include "scb/common/error.hpp"
#include "support/grad_oracle.hpp"

using namespace scb;
using namespace scb::cae;

namespace {

std::vector<Eigen::MatrixXf> random_windows(int n, std::uint64_t seed) { return testing::gaussian_windows(n, seed); }

// Two-class toy set: class 1 carries a 12 Hz burst on the first six channels.
WindowSet toy_set(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 6.283185307179586);
  WindowSet s;
  for (int i = 0; i < n; ++i) {
    const int y = i % 2;
    Eigen::MatrixXd w(12, 250);
    const double phase = ph(rng);
    for (int c = 0; c < 12; ++c)
      for (int t = 0; t < 250; ++t) {
        const double tone = std::sin(2.0 * 3.141592653589793 * (y == 1 && c < 6 ? 12.0 : 25.0) * t / 250.0 + phase);
        w(c, t) = 2.0 * tone + 0.5 * nd(rng);
      }
    s.windows.push_back(normalize_window(w));
    s.labels.push_back(y);
  }
  return s;
}

}  // namespace

TEST_CASE("arch: default shape chain") {
  const ArchDescriptor a;
  CHECK_NOTHROW(a.validate());
  CHECK(a.encoder_lengths() == std::vector<int>{250, 125, 62, 31});
  CHECK(a.flatten_dim() == 3968);
  CHECK(a.decoder_length() == 248);
}

TEST_CASE("arch: inconsistent descriptors are rejected") {
  ArchDescriptor a;
  a.kernel_sizes = {7, 4, 3};
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.aux_widths = {32, 2};
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.aux_widths = {64, 32, 3};
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.in_samples = 7;
  CHECK_THROWS_AS(a.validate(), Error);
  a = {};
  a.kernel_sizes = {7, 5};
  CHECK_THROWS_AS(a.validate(), Error);
}

TEST_CASE("init_params: shapes and determinism") {
  const CaeParams a = init_params({}, 42), b = init_params({}, 42), c = init_params({}, 43);
  CHECK(a.latent.w.rows() == 64);
  CHECK(a.latent.w.cols() == 3968);
  CHECK(a.aux.back().w.rows() == 2);
  CHECK(a.enc[0].w.rows() == 32);
  CHECK(a.enc[0].w.cols() == 12 * 7);
  CHECK(a.dec.back().w.rows() == 12);
  CHECK(a.norm[2].running_var.isOnes());
  CHECK(a.norm[1].running_mean.isZero());

  bool identical = true, differs = false;
  std::vector<const Mat<float>*> ta, tc;
  a.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) { ta.push_back(&m); });
  std::size_t i = 0;
  b.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) {
    identical = identical && std::memcmp(m.data(), ta[i]->data(), sizeof(float) * m.size()) == 0;
    ++i;
  });
  CHECK(identical);
  i = 0;
  c.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole r) {
    if (r == TensorRole::Weight) differs = differs || m != *ta[i];
    ++i;
  });
  CHECK(differs);

  // Fan-in bound.
  CHECK(a.latent.w.cwiseAbs().maxCoeff() <= 1.0f / std::sqrt(3968.0f));
  CHECK_NOTHROW(check_params(a));
}

TEST_CASE("check_params: non-finite and non-positive variance") {
  CaeParams p = init_params({}, 1);
  p.norm[0].running_var(3, 0) = 0.0f;
  CHECK_THROWS_AS(check_params(p), Error);
  p = init_params({}, 1);
  p.aux[0].b(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(check_params(p), Error);
}

TEST_CASE("forward: output shapes") {
  const CaeParams p = init_params({}, 3);
  const auto w = random_windows(3, 5);
  const Act<float> x = pack_windows<float>(w);
  const auto fw = forward<float>(p, x, 3, Mode::Infer);
  CHECK(fw.latent.rows() == 64);
  CHECK(fw.latent.cols() == 3);
  CHECK(fw.recon.rows() == 12);
  CHECK(fw.recon.cols() == 750);
  CHECK(fw.logits.rows() == 2);
  CHECK(fw.logits.cols() == 3);
  CHECK_THROWS_AS(forward<float>(p, pack_windows<float>(random_windows(1, 5)), 1, Mode::Train), Error);
}

TEST_CASE("forward: infer mode is deterministic") {
  const CaeParams p = init_params({}, 3);
  const Act<float> x = pack_windows<float>(random_windows(4, 6));
  const auto a = forward<float>(p, x, 4, Mode::Infer);
  const auto b = forward<float>(p, x, 4, Mode::Infer);
  CHECK(a.latent == b.latent);
  CHECK(a.recon == b.recon);
  CHECK(a.logits == b.logits);
}

TEST_CASE("forward: non-finite input") {
  const CaeParams p = init_params({}, 3);
  auto w = random_windows(2, 6);
  w[1](4, 9) = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(forward<float>(p, pack_windows<float>(w), 2, Mode::Infer), Error);
}

TEST_CASE("loss: closed forms") {
  Act<float> zeros = Act<float>::Zero(12, 250), ones = Act<float>::Ones(12, 250);
  Mat<float> logits(2, 1);
  logits << 0.0f, 0.0f;
  const LossParts a = loss<float>(ones, zeros, logits, {0}, 0.0);
  CHECK(a.recon_mse == 1.0);
  CHECK(a.total == a.recon_mse);
  CHECK(a.class_ce == doctest::Approx(std::log(2.0)));

  Mat<float> sat(2, 2);
  sat << 20.0f, -20.0f, -20.0f, 20.0f;
  Act<float> x = Act<float>::Random(12, 500);
  const LossParts b = loss<float>(x, x, sat, {0, 1}, 1.0);
  CHECK(b.recon_mse == 0.0);
  CHECK(b.total == doctest::Approx(std::log1p(std::exp(-40.0))).epsilon(1e-3));
  CHECK(b.total < 1e-16);
  CHECK(b.total >= 0.0);
}

TEST_CASE("grad: central finite differences on sampled coordinates") {
  const testing::GradCheck gc = testing::finite_difference_check(11, 25, 1e-4);
  for (const auto& smp : gc.samples) {
    INFO(smp.tensor << "[" << smp.index << "] analytic " << smp.analytic << " numeric " << smp.numeric);
    CHECK(smp.rel_error < 1e-4);
  }
  MESSAGE("worst relative error " << gc.worst << ", " << gc.redrawn << " coordinates redrawn at kinks");
  CHECK(gc.redrawn < 25);
}

TEST_CASE("grad: lambda = 0 leaves only weight decay on the aux head") {
  const CaeParams p = init_params({}, 5);
  const Act<float> x = pack_windows<float>(random_windows(4, 8));
  const GradOptions opt{0.0, 1e-3, 0.0};
  const auto g = grad<float>(p, x, x, {0, 1, 0, 1}, opt, nullptr);
  for (std::size_t j = 0; j < p.aux.size(); ++j) {
    CHECK(g.grad.aux[j].w == Mat<float>(1e-3f * p.aux[j].w));
    CHECK(g.grad.aux[j].b.isZero(0.0f));
  }
}

TEST_CASE("grad: duplicating every window leaves the mean-reduced gradient unchanged") {
  const ParamSet<double> p = init_params({}, 6).cast<double>();
  const auto w = random_windows(3, 9);
  std::vector<Eigen::MatrixXf> doubled = w;
  doubled.insert(doubled.end(), w.begin(), w.end());
  const GradOptions opt{1.0, 0.0, 0.0};
  const auto x1 = pack_windows<double>(w), x2 = pack_windows<double>(doubled);
  const auto g1 = grad<double>(p, x1, x1, {0, 1, 1}, opt, nullptr);
  const auto g2 = grad<double>(p, x2, x2, {0, 1, 1, 0, 1, 1}, opt, nullptr);
  std::vector<const Mat<double>*> t1;
  g1.grad.for_each_tensor([&](const std::string&, const Mat<double>& m, TensorRole) { t1.push_back(&m); });
  double worst = 0.0;
  std::size_t i = 0;
  g2.grad.for_each_tensor([&](const std::string&, const Mat<double>& m, TensorRole) {
    if (m.size() > 0) worst = std::max(worst, (*t1[i] - m).cwiseAbs().maxCoeff());
    ++i;
  });
  CHECK(worst < 1e-10);
  CHECK(g1.loss.total == doctest::Approx(g2.loss.total).epsilon(1e-12));
}

TEST_CASE("augment: identity, full dropout, noise level") {
  std::mt19937_64 rng(1);
  const auto w = random_windows(1, 2).front();
  CHECK(augment(w, rng, {0.0, 0.0}) == w);
  CHECK(augment(w, rng, {0.05, 1.0}).isZero(0.0f));
  const Eigen::MatrixXf before = w;
  (void)augment(w, rng, {0.5, 0.5});
  CHECK(w == before);

  // Channel stds differ so the per-channel scaling is visible.
  Eigen::MatrixXf scaled = w;
  for (Eigen::Index c = 0; c < scaled.rows(); ++c) scaled.row(c) *= static_cast<float>(c + 1);
  std::vector<double> sum(12, 0.0), sum2(12, 0.0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXf d = augment(scaled, rng, {0.05, 0.0}) - scaled;
    for (int c = 0; c < 12; ++c) {
      sum[c] += d.row(c).cast<double>().sum();
      sum2[c] += d.row(c).cast<double>().squaredNorm();
    }
  }
  for (int c = 0; c < 12; ++c) {
    const double cnt = static_cast<double>(n) * 250.0;
    const double sd = std::sqrt(sum2[c] / cnt - std::pow(sum[c] / cnt, 2));
    const Eigen::RowVectorXd row = scaled.row(c).cast<double>();
    const double ch_sd = std::sqrt((row.array() - row.mean()).square().mean());
    CHECK(sd == doctest::Approx(0.05 * ch_sd).epsilon(0.03));
  }
}

TEST_CASE("normalize_window: zero mean, unit std, flat channel") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Random(12, 250) * 40.0;
  w.row(3).setConstant(7.0);
  const Eigen::MatrixXf z = normalize_window(w);
  CHECK(z.row(3).isZero(0.0f));
  for (int c : {0, 5, 11}) {
    CHECK(std::abs(z.row(c).mean()) < 1e-5);
    CHECK(std::sqrt(z.row(c).array().square().mean()) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("encode: equals batch-of-one forward, pure, fast") {
  const CaeParams p = init_params({}, 21);
  const auto w = random_windows(1, 22);
  const auto fw = forward<float>(p, pack_windows<float>(w), 1, Mode::Infer);
  const Eigen::VectorXf z = encode<float>(p, w.front());
  CHECK(z.size() == 64);
  CHECK(std::memcmp(z.data(), fw.latent.data(), sizeof(float) * 64) == 0);

  const Eigen::MatrixXf zero = Eigen::MatrixXf::Zero(12, 250);
  const Eigen::VectorXf z0 = encode<float>(p, zero), z1 = encode<float>(p, zero);
  CHECK(z0.allFinite());
  CHECK(z0 == z1);

  const auto many = random_windows(1000, 23);
  const auto t0 = std::chrono::steady_clock::now();
  float sink = 0.0f;
  for (const auto& win : many) sink += encode<float>(p, win)(0);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / 1000.0;
  MESSAGE("mean encode time " << ms << " ms");
  CHECK(std::isfinite(sink));
  CHECK(ms < 10.0);
}

TEST_CASE("train: rejects single-class splits and bad configs") {
  WindowSet a = toy_set(8, 1), b = toy_set(4, 2);
  b.labels.assign(b.labels.size(), 1);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  CHECK_THROWS_AS(train(a, b, {}, cfg), Error);
  b = toy_set(4, 2);
  cfg.dropout = 1.5;
  CHECK_THROWS_AS(train(a, b, {}, cfg), Error);
}

TEST_CASE("train: separable data, early stopping, determinism") {
  const WindowSet tr = toy_set(256, 3), va = toy_set(64, 4);
  TrainConfig cfg;
  cfg.max_epochs = 12;
  cfg.patience = 3;
  cfg.seed = 5;
  const TrainResult r = train(tr, va, {}, cfg);
  REQUIRE(!r.history.empty());
  MESSAGE("epochs " << r.history.size() << " best " << r.best_epoch << " acc " << r.history.back().val_accuracy);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_accuracy >= 0.95);

  double best = 1e300;
  for (const auto& e : r.history) best = std::min(best, e.val_loss);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_loss == best);
  CHECK(evaluate_aux(r.params, va, cfg.lambda).loss == doctest::Approx(best).epsilon(1e-12));

  for (std::size_t i = 1; i < std::min<std::size_t>(5, r.history.size()); ++i)
    CHECK(r.history[i].train_recon <= r.history[i - 1].train_recon);

  const TrainResult r2 = train(tr, va, {}, cfg);
  REQUIRE(r2.history.size() == r.history.size());
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    CHECK(r2.history[i].train_loss == r.history[i].train_loss);
    CHECK(r2.history[i].val_loss == r.history[i].val_loss);
  }
}

TEST_CASE("train: patience 0 stops after the first non-improving epoch") {
  const WindowSet tr = toy_set(32, 5), va = toy_set(16, 6);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.patience = 0;
  cfg.learning_rate = 0.05;  // large steps make a non-improving epoch likely early
  const TrainResult r = train(tr, va, {}, cfg);
  REQUIRE(r.history.size() >= 2);
  const auto& h = r.history;
  double best = h.front().val_loss;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    CHECK(h[i].val_loss < best);
    best = h[i].val_loss;
  }
  if (static_cast<int>(h.size()) < cfg.max_epochs) CHECK(h.back().val_loss >= best);
}

TEST_CASE("half: every binary16 pattern survives a float round trip") {
  for (std::uint32_t h = 0; h < 0x10000u; ++h) {
    const float f = half_to_float(static_cast<std::uint16_t>(h));
    if (std::isnan(f)) {
      CHECK(std::isnan(half_to_float(float_to_half(f))));
      continue;
    }
    if (float_to_half(f) != h) FAIL_CHECK("pattern " << h);
  }
}

TEST_CASE("half: nearest representable value, ties to even") {
  // Oracle: scan the sorted finite non-negative halves for the nearest one.
  std::vector<double> grid;
  for (std::uint32_t h = 0; h < 0x7c00u; ++h) grid.push_back(half_to_float(static_cast<std::uint16_t>(h)));
  auto nearest = [&](double v) -> std::uint16_t {
    const double a = std::abs(v);
    if (a >= 65520.0) return 0x7c00u;  // rounds past the largest finite half
    auto it = std::lower_bound(grid.begin(), grid.end(), a);
    std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (hi == grid.size()) return 0x7bffu;
    if (hi == 0 || grid[hi] == a) return static_cast<std::uint16_t>(hi);
    const std::size_t lo = hi - 1;
    const double dl = a - grid[lo], dh = grid[hi] - a;
    if (dl < dh) return static_cast<std::uint16_t>(lo);
    if (dh < dl) return static_cast<std::uint16_t>(hi);
    return static_cast<std::uint16_t>(lo % 2 == 0 ? lo : hi);
  };
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ex(-30.0, 17.0);
  std::uniform_int_distribution<int> sg(0, 1);
  for (int i = 0; i < 200000; ++i) {
    const float f = static_cast<float>(std::exp2(ex(rng)) * (sg(rng) ? -1.0 : 1.0));
    const std::uint16_t want = static_cast<std::uint16_t>(nearest(f) | (f < 0 ? 0x8000u : 0u));
    if (float_to_half(f) != want) FAIL_CHECK(f);
  }
  // Exact midpoints between neighbours.
  for (std::uint32_t h = 0; h + 1 < 0x7c00u; h += 37) {
    const double mid = 0.5 * (grid[h] + grid[h + 1]);
    const float f = static_cast<float>(mid);
    if (static_cast<double>(f) != mid) continue;
    CHECK(float_to_half(f) == (h % 2 == 0 ? h : h + 1));
  }
  CHECK(float_to_half(1e6f) == 0x7c00u);
  CHECK(float_to_half(-1e6f) == 0xfc00u);
}

TEST_CASE("quantize: fp16 round trip error bound") {
  const CaeParams p = init_params({}, 31);
  const QuantizedParams q = quantize(p, {}, Precision::Fp16);
  std::vector<const Mat<float>*> orig;
  p.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) { orig.push_back(&m); });
  std::size_t i = 0;
  bool ok = true;
  q.widened.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) {
    const Mat<float>& w = *orig[i++];
    const Eigen::ArrayXXf bound = w.array().abs() * std::ldexp(1.0f, -10) + std::ldexp(1.0f, -24);
    ok = ok && ((m - w).array().abs() <= bound).all();
  });
  CHECK(ok);
  const Eigen::VectorXf z = forward_quantized(q, random_windows(1, 32).front());
  CHECK(z.size() == 64);
}

TEST_CASE("quantize: int8 weights within half a step, calibration size") {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> nd(0.0f, 0.3f);
  Mat<float> w(40, 17);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(rng);
  const QTensor t = quantize_symmetric(w);
  CHECK((t.dequantize() - w).cwiseAbs().maxCoeff() <= t.scale / 2 * (1.0f + 1e-6f));
  CHECK(t.q.cast<int>().cwiseAbs().maxCoeff() == 127);

  const CaeParams p = init_params({}, 33);
  CHECK_THROWS_AS(quantize(p, random_windows(127, 34), Precision::Int8), Error);
  try {
    (void)quantize(p, random_windows(10, 34), Precision::Int8);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CalibrationTooSmall);
  }

  const auto calib = random_windows(128, 35);
  const QuantizedParams q = quantize(p, calib, Precision::Int8);
  for (const auto& c : q.conv_w) CHECK(c.q.cast<int>().cwiseAbs().maxCoeff() <= 127);
  REQUIRE(q.act.size() == 4);
  for (const auto& a : q.act) {
    CHECK(a.min <= 0.0f);
    CHECK(a.quantize(a.max) <= 127);
    CHECK(std::abs((static_cast<float>(a.quantize(a.max)) - a.zero_point) * a.scale - a.max) <= a.scale / 2 * 1.001f);
  }

  double num = 0.0, den = 0.0;
  for (const auto& win : random_windows(20, 36)) {
    const Eigen::VectorXf zf = encode<float>(p, win), zq = forward_quantized(q, win);
    CHECK(zq.size() == 64);
    num += (zf - zq).squaredNorm();
    den += zf.squaredNorm();
  }
  MESSAGE("int8 latent relative error " << std::sqrt(num / den));
  CHECK(std::sqrt(num / den) < 0.1);
}

TEST_CASE("model file: bit-exact round trip") {
  const CaeParams p = init_params({}, 41);
  ModelFile m;
  m.arch = p.arch;
  append_params(m, p);
  m.tensors.push_back(NamedTensor::from_f64("extra.values", {0.1, -3.5e300, 5e-324}));
  const auto bytes = serialize(m);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SCBM");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  const ModelFile back = parse(bytes);
  CHECK(serialize(back) == bytes);
  CHECK(back.arch == p.arch);
  CHECK(back.at("extra.values").to_f64() == std::vector<double>{0.1, -3.5e300, 5e-324});

  const CaeParams q = params_from(back);
  std::vector<const Mat<float>*> a;
  p.for_each_tensor([&](const std::string&, const Mat<float>& t, TensorRole) { a.push_back(&t); });
  std::size_t i = 0;
  bool same = true;
  q.for_each_tensor([&](const std::string&, const Mat<float>& t, TensorRole) {
    same = same && t.size() == a[i]->size() && std::memcmp(t.data(), a[i]->data(), sizeof(float) * t.size()) == 0;
    ++i;
  });
  CHECK(same);
}

TEST_CASE("model file: quantized models round trip and decode identically") {
  const CaeParams p = init_params({}, 42);
  const auto calib = random_windows(128, 43);
  const auto probe = random_windows(1, 44).front();
  for (Precision mode : {Precision::Int8, Precision::Fp16}) {
    const QuantizedParams q = quantize(p, calib, mode);
    ModelFile m;
    m.arch = p.arch;
    append_quantized(m, q);
    const auto bytes = serialize(m);
    const ModelFile back = parse(bytes);
    CHECK(serialize(back) == bytes);
    const auto q2 = quantized_from(back);
    REQUIRE(q2.has_value());
    CHECK(q2->mode == mode);
    CHECK(forward_quantized(*q2, probe) == forward_quantized(q, probe));
  }
  ModelFile plain;
  plain.arch = p.arch;
  append_params(plain, p);
  CHECK_FALSE(quantized_from(plain).has_value());
}

TEST_CASE("model file: malformed input") {
  ModelFile m;
  m.arch = ArchDescriptor{};
  append_params(m, init_params({}, 1));
  auto bytes = serialize(m);

  auto code_of = [](const std::vector<std::uint8_t>& b) {
    try {
      (void)parse(b);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  auto bad = bytes;
  bad[0] = 'X';
  CHECK(code_of(bad) == Errc::BadMagic);
  CHECK(code_of({}) == Errc::BadMagic);
  auto cut = bytes;
  cut.resize(bytes.size() - 3);
  CHECK(code_of(cut) == Errc::TruncatedPayload);
  cut.resize(40);
  CHECK(code_of(cut) == Errc::TruncatedPayload);
  auto ver = bytes;
  ver[4] = 9;
  CHECK_THROWS_AS(parse(ver), Error);

  ModelFile missing = m;
  missing.tensors.pop_back();
  CHECK_THROWS_AS(params_from(missing), Error);

  const auto path = std::filesystem::temp_directory_path() / "scb_model_roundtrip.scbm";
  write_model_file(path, m);
  CHECK(serialize(read_model_file(path)) == bytes);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_model_file(path), Error);
}
