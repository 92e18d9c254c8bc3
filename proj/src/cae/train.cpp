#include "scb/cae/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scb/common/error.hpp"

namespace scb::cae {

namespace {

bool prob(double p) { return p >= 0.0 && p <= 1.0; }

void require_both_classes(const WindowSet& s, const char* what) {
  if (s.windows.size() != s.labels.size()) throw Error(Errc::InvalidArgument, std::string(what) + ": label count mismatch");
  bool seen[2] = {false, false};
  for (int y : s.labels) {
    if (y != 0 && y != 1) throw Error(Errc::InvalidArgument, std::string(what) + ": labels must be 0 or 1");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw Error(Errc::Degenerate, std::string(what) + " split is single-class or empty");
}

struct Adam {
  CaeParams m, v;
  long step = 0;
  double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  Adam(const CaeParams& p, double lr_) : m(zeros_like(p)), v(zeros_like(p)), lr(lr_) {}

  void update(CaeParams& p, const CaeParams& g) {
    ++step;
    const float c1 = static_cast<float>(1.0 - std::pow(b1, static_cast<double>(step)));
    const float c2 = static_cast<float>(1.0 - std::pow(b2, static_cast<double>(step)));
    std::vector<Mat<float>*> ps, gs_m, vs_m;
    std::vector<const Mat<float>*> gs;
    std::vector<TensorRole> roles;
    p.for_each_tensor([&](const std::string&, Mat<float>& t, TensorRole r) { ps.push_back(&t); roles.push_back(r); });
    g.for_each_tensor([&](const std::string&, const Mat<float>& t, TensorRole) { gs.push_back(&t); });
    m.for_each_tensor([&](const std::string&, Mat<float>& t, TensorRole) { gs_m.push_back(&t); });
    v.for_each_tensor([&](const std::string&, Mat<float>& t, TensorRole) { vs_m.push_back(&t); });
    const float fb1 = static_cast<float>(b1), fb2 = static_cast<float>(b2);
    const float flr = static_cast<float>(lr), feps = static_cast<float>(eps);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (roles[i] == TensorRole::NormStat) continue;
      Mat<float>& mi = *gs_m[i];
      Mat<float>& vi = *vs_m[i];
      const Mat<float>& gi = *gs[i];
      mi = fb1 * mi + (1.0f - fb1) * gi;
      vi = fb2 * vi + (1.0f - fb2) * gi.cwiseAbs2();
      ps[i]->array() -= flr * (mi.array() / c1) / ((vi.array() / c2).sqrt() + feps);
    }
  }
};

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error(Errc::InvalidArgument, "lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(Errc::InvalidArgument, "learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw Error(Errc::InvalidArgument, "weight decay must be >= 0");
  if (!prob(dropout) || dropout >= 1.0) throw Error(Errc::InvalidArgument, "dropout must be in [0, 1)");
  if (!prob(augment.channel_dropout)) throw Error(Errc::InvalidArgument, "channel dropout must be in [0, 1]");
  if (!(augment.noise_scale >= 0.0)) throw Error(Errc::InvalidArgument, "noise scale must be >= 0");
  if (batch_size < 2) throw Error(Errc::InvalidArgument, "batch size must be >= 2");
  if (max_epochs < 1) throw Error(Errc::InvalidArgument, "max_epochs must be >= 1");
  if (patience < 0) throw Error(Errc::InvalidArgument, "patience must be >= 0");
  if (!prob(bn_momentum)) throw Error(Errc::InvalidArgument, "bn momentum must be in [0, 1]");
}

Eigen::MatrixXf normalize_window(const Eigen::MatrixXd& window) {
  Eigen::MatrixXf out(window.rows(), window.cols());
  for (Eigen::Index c = 0; c < window.rows(); ++c) {
    const double mu = window.row(c).mean();
    const double sd = std::sqrt((window.row(c).array() - mu).square().mean());
    if (sd < 1e-12)
      out.row(c).setZero();
    else
      out.row(c) = ((window.row(c).array() - mu) / sd).cast<float>().matrix();
  }
  return out;
}

Eigen::MatrixXf augment(const Eigen::MatrixXf& window, std::mt19937_64& rng, const AugmentConfig& cfg) {
  Eigen::MatrixXf out = window;
  std::normal_distribution<float> nd(0.0f, 1.0f);
  std::bernoulli_distribution drop(cfg.channel_dropout);
  for (Eigen::Index c = 0; c < out.rows(); ++c) {
    if (cfg.noise_scale > 0.0) {
      const float mu = window.row(c).mean();
      const float sd = std::sqrt((window.row(c).array() - mu).square().mean());
      const float s = static_cast<float>(cfg.noise_scale) * sd;
      for (Eigen::Index t = 0; t < out.cols(); ++t) out(c, t) += s * nd(rng);
    }
    if (cfg.channel_dropout > 0.0 && drop(rng)) out.row(c).setZero();
  }
  return out;
}

Evaluation evaluate_aux(const CaeParams& p, const WindowSet& set, double lambda) {
  if (set.size() == 0) throw Error(Errc::EmptyInput, "empty evaluation set");
  constexpr std::size_t kChunk = 256;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < set.size(); start += kChunk) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(set.size(), start + kChunk); ++i) idx.push_back(i);
    const Act<float> x = pack_windows<float>(set.windows, idx);
    const auto fw = forward<float>(p, x, static_cast<int>(idx.size()), Mode::Infer);
    std::vector<int> y;
    for (std::size_t i : idx) y.push_back(set.labels[i]);
    loss_sum += loss<float>(fw.recon, x, fw.logits, y, lambda).total * static_cast<double>(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const int pred = fw.logits(1, static_cast<Eigen::Index>(b)) > fw.logits(0, static_cast<Eigen::Index>(b)) ? 1 : 0;
      if (pred == y[b]) ++correct;
    }
  }
  return {loss_sum / static_cast<double>(set.size()), static_cast<double>(correct) / static_cast<double>(set.size())};
}

TrainResult train(const WindowSet& train_set, const WindowSet& val_set, const ArchDescriptor& arch,
                  const TrainConfig& cfg) {
  cfg.validate();
  require_both_classes(train_set, "train");
  require_both_classes(val_set, "validation");

  std::mt19937_64 rng(cfg.seed);
  TrainResult out;
  CaeParams params = init_params(arch, cfg.seed);
  Adam opt(params, cfg.learning_rate);
  const GradOptions gopt{cfg.lambda, cfg.weight_decay, cfg.dropout};
  const float mom = static_cast<float>(cfg.bn_momentum);

  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<std::size_t, std::size_t>> batches;
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t s = 0; s < order.size(); s += bs) batches.emplace_back(s, std::min(order.size(), s + bs));
    // A trailing singleton cannot be batch-normalised; fold it into the previous batch.
    if (batches.size() > 1 && batches.back().second - batches.back().first < 2) {
      batches[batches.size() - 2].second = batches.back().second;
      batches.pop_back();
    }

    double loss_sum = 0.0, recon_sum = 0.0;
    for (const auto& [lo, hi] : batches) {
      std::vector<Eigen::MatrixXf> inputs;
      std::vector<std::size_t> idx;
      std::vector<int> y;
      for (std::size_t i = lo; i < hi; ++i) {
        inputs.push_back(augment(train_set.windows[order[i]], rng, cfg.augment));
        idx.push_back(order[i]);
        y.push_back(train_set.labels[order[i]]);
      }
      const Act<float> x = pack_windows<float>(inputs);
      const Act<float> target = pack_windows<float>(train_set.windows, idx);
      const GradResult<float> g = grad<float>(params, x, target, y, gopt, &rng);
      opt.update(params, g.grad);
      for (std::size_t i = 0; i < params.norm.size(); ++i) {
        params.norm[i].running_mean = (1.0f - mom) * params.norm[i].running_mean + mom * g.batch_mean[i];
        params.norm[i].running_var = (1.0f - mom) * params.norm[i].running_var + mom * g.batch_var[i];
      }
      loss_sum += g.loss.total * static_cast<double>(hi - lo);
      recon_sum += g.loss.recon_mse * static_cast<double>(hi - lo);
    }

    const Evaluation ev = evaluate_aux(params, val_set, cfg.lambda);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.train_recon = recon_sum / static_cast<double>(train_set.size());
    rec.val_loss = ev.loss;
    rec.val_accuracy = ev.accuracy;
    out.history.push_back(rec);

    if (ev.loss < best) {
      best = ev.loss;
      out.params = params;
      out.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= std::max(1, cfg.patience)) {
      break;
    }
  }
  return out;
}

Eigen::VectorXf embed(const CaeParams& p, const Eigen::MatrixXd& raw_window) {
  return encode<float>(p, normalize_window(raw_window));
}

}  // namespace scb::cae
