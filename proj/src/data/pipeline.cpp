#include "scb/data/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "scb/boost/folds.hpp"
#include "scb/boost/projection.hpp"
#include "scb/cae/network.hpp"
#include "scb/common/error.hpp"
#include "scb/data/synthetic.hpp"
#include "scb/dsp/resample.hpp"
#include "scb/ica/ica.hpp"

namespace scb::data {

namespace {

Eigen::MatrixXd latent_matrix(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                              Backend backend) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.config.arch.latent_dim);
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.latent(ds.windows[idx[i]], backend).cast<double>().transpose();
  return out;
}

std::vector<int> labels_of(const WindowDataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<int> y;
  y.reserve(idx.size());
  for (auto i : idx) y.push_back(ds.labels[i]);
  return y;
}

cae::WindowSet window_set(const WindowDataset& ds, const std::vector<std::size_t>& idx) {
  cae::WindowSet s;
  for (auto i : idx) {
    s.windows.push_back(cae::normalize_window(ds.windows[i]));
    s.labels.push_back(ds.labels[i]);
  }
  return s;
}

double accuracy_of(const std::vector<int>& preds, const std::vector<int>& labels) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) ok += preds[i] == labels[i];
  return preds.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(preds.size());
}

std::vector<double> u64_pair(std::uint64_t v) {
  return {static_cast<double>(v >> 32), static_cast<double>(v & 0xFFFFFFFFULL)};
}

std::uint64_t from_pair(const std::vector<double>& v) {
  if (v.size() != 2) throw Error(Errc::InvalidArgument, "malformed seed tensor");
  return (static_cast<std::uint64_t>(v[0]) << 32) | static_cast<std::uint64_t>(v[1]);
}

std::vector<double> f64(const cae::ModelFile& f, const std::string& name, std::size_t expect = 0) {
  auto v = f.at(name).to_f64();
  if (expect && v.size() != expect) throw Error(Errc::InvalidArgument, "tensor " + name + " has the wrong length");
  return v;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  train.max_epochs = 60;
  train.patience = 8;
}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(Errc::InvalidArgument, m); };
  if (band.fs != kDecoderRateHz) fail("the decoder runs at 250 Hz");
  if (!(ica_low_hz > 0.0 && ica_high_hz > ica_low_hz && ica_high_hz < band.fs / 2.0)) fail("bad ICA band");
  if (!(guard_s >= 0.0)) fail("guard must be non-negative");
  if (window != static_cast<std::size_t>(arch.in_samples)) fail("window length must match the encoder input");
  if (stride == 0) fail("stride must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) fail("validation fraction must lie in (0, 1)");
  if (rounds_grid.empty() || *std::min_element(rounds_grid.begin(), rounds_grid.end()) < 1) fail("bad rounds grid");
  arch.validate();
  train.validate();
  dsp::design_bandpass(band.low_hz, band.high_hz, band.order, band.fs);
}

Recording conform_recording(const Recording& raw) {
  raw.validate();
  Recording rec = dsp::select_channels(raw, dsp::decoder_channel_list());
  if (rec.sample_rate == kDecoderRateHz) return rec;
  const double ratio = kDecoderRateHz / rec.sample_rate;
  Recording out;
  out.channels = rec.channels;
  out.sample_rate = kDecoderRateHz;
  for (Eigen::Index c = 0; c < rec.data.rows(); ++c) {
    const Eigen::RowVectorXd row = rec.data.row(c);
    const auto y = dsp::resample(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                                 rec.sample_rate, kDecoderRateHz);
    if (c == 0) out.data.resize(rec.data.rows(), static_cast<Eigen::Index>(y.size()));
    out.data.row(c) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  }
  for (const auto& e : rec.events) {
    Event s{static_cast<std::size_t>(std::llround(static_cast<double>(e.start_sample) * ratio)),
            static_cast<std::size_t>(std::llround(static_cast<double>(e.end_sample) * ratio)), e.label};
    s.end_sample = std::min(s.end_sample, out.n_samples());
    if (s.end_sample > s.start_sample) out.events.push_back(s);
  }
  return out;
}

Eigen::MatrixXd ica_cleaning_matrix(const Recording& rec, const PipelineConfig& cfg, std::vector<int>* rejected) {
  const auto m = static_cast<Eigen::Index>(rec.n_channels());
  const auto coeffs = dsp::design_bandpass(cfg.ica_low_hz, cfg.ica_high_hz, 4, rec.sample_rate);
  Eigen::MatrixXd x(m, rec.data.cols());
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::RowVectorXd row = rec.data.row(c);
    const auto y = dsp::apply_filter(coeffs, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                                     dsp::FilterMode::ZeroPhase);
    x.row(c) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  }
  ica::IcaOptions opts;
  opts.k = static_cast<int>(m);
  opts.seed = cfg.seed;
  opts.max_iter = 200;
  opts.tol = 1e-5;
  const ica::UnmixingModel model = ica::fit(x, opts);
  const auto scores = ica::score_components(model, x, rec.sample_rate, rec.channels);
  std::vector<Eigen::Index> bad;
  for (const auto& s : scores)
    if (s.verdict == ica::Verdict::Artifact) bad.push_back(s.index);
  if (rejected) rejected->assign(bad.begin(), bad.end());
  Eigen::MatrixXd clean = Eigen::MatrixXd::Identity(m, m);
  if (!bad.empty()) {
    const Eigen::MatrixXd w = model.channel_unmixing();
    clean -= model.mixing(Eigen::all, bad) * w(bad, Eigen::all);
  }
  return clean;
}

FrameProcessor::FrameProcessor(const Eigen::MatrixXd& spatial, const dsp::FilterCoeffs& band)
    : spatial_(spatial), identity_(spatial.isIdentity(0.0)) {
  if (spatial.rows() != spatial.cols() || spatial.rows() == 0)
    throw Error(Errc::InvalidArgument, "spatial matrix must be square");
  filters_.assign(static_cast<std::size_t>(spatial.rows()), dsp::CausalFilter(band));
}

void FrameProcessor::process(const double* in, double* out) {
  const auto n = static_cast<Eigen::Index>(filters_.size());
  for (Eigen::Index c = 0; c < n; ++c) {
    double v = in[c];
    if (!identity_) {
      v = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) v += spatial_(c, j) * in[j];
    }
    out[c] = filters_[static_cast<std::size_t>(c)].step(v);
  }
}

void FrameProcessor::reset() {
  for (auto& f : filters_) f.reset();
}

dsp::FilterCoeffs design_band(const PipelineConfig& cfg) {
  return dsp::design_bandpass(cfg.band.low_hz, cfg.band.high_hz, cfg.band.order, cfg.band.fs);
}

Eigen::MatrixXd preprocess(const Recording& rec, const Eigen::MatrixXd& spatial, const PipelineConfig& cfg) {
  FrameProcessor fp(spatial, design_band(cfg));
  if (fp.channels() != rec.n_channels()) throw Error(Errc::InvalidArgument, "spatial matrix does not match channels");
  Eigen::MatrixXd out(rec.data.rows(), rec.data.cols());
  std::vector<double> frame(rec.n_channels()), y(rec.n_channels());
  for (Eigen::Index t = 0; t < rec.data.cols(); ++t) {
    for (Eigen::Index c = 0; c < rec.data.rows(); ++c) frame[static_cast<std::size_t>(c)] = rec.data(c, t);
    fp.process(frame.data(), y.data());
    for (Eigen::Index c = 0; c < rec.data.rows(); ++c) out(c, t) = y[static_cast<std::size_t>(c)];
  }
  return out;
}

PreparedRecording prepare_recording(const std::string& subject, const Recording& raw, const PipelineConfig& cfg) {
  PreparedRecording p;
  p.subject = subject;
  p.recording = conform_recording(raw);
  const auto m = static_cast<Eigen::Index>(p.recording.n_channels());
  p.spatial = cfg.ica ? ica_cleaning_matrix(p.recording, cfg, &p.rejected) : Eigen::MatrixXd::Identity(m, m);
  p.filtered = preprocess(p.recording, p.spatial, cfg);
  return p;
}

WindowDataset build_dataset(const std::vector<PreparedRecording>& recs, const PipelineConfig& cfg) {
  WindowDataset ds;
  int trial = 0;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    const auto& p = recs[r];
    std::vector<Event> intervals = extract_rest_epochs(p.recording, cfg.guard_s);
    for (const auto& e : p.recording.events)
      if (e.label == Label::Move) intervals.push_back(e);
    std::sort(intervals.begin(), intervals.end(),
              [](const Event& a, const Event& b) { return a.start_sample < b.start_sample; });

    struct Item {
      std::size_t start;
      int label, trial;
    };
    std::vector<Item> move, rest;
    for (const auto& e : intervals) {
      for (std::size_t s = e.start_sample; s + cfg.window <= e.end_sample; s += cfg.stride)
        (e.label == Label::Move ? move : rest).push_back({s, static_cast<int>(e.label), trial});
      ++trial;
    }
    if (rest.size() > move.size()) {
      std::mt19937_64 rng(derive_seed(cfg.seed, 0x5EED0000ULL + r));
      std::shuffle(rest.begin(), rest.end(), rng);
      rest.resize(move.size());
    }
    std::vector<Item> all = move;
    all.insert(all.end(), rest.begin(), rest.end());
    std::sort(all.begin(), all.end(), [](const Item& a, const Item& b) { return a.start < b.start; });
    for (const auto& it : all) {
      ds.windows.push_back(p.filtered.middleCols(static_cast<Eigen::Index>(it.start), static_cast<Eigen::Index>(cfg.window)));
      ds.labels.push_back(it.label);
      ds.trials.push_back(it.trial);
      ds.subjects.push_back(p.subject);
      ds.starts.push_back(it.start);
    }
  }
  return ds;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Float: return "float";
    case Backend::Int8: return "int8";
    case Backend::Fp16: return "fp16";
  }
  return "?";
}

Backend parse_backend(const std::string& s) {
  if (s == "float") return Backend::Float;
  if (s == "int8") return Backend::Int8;
  if (s == "fp16") return Backend::Fp16;
  throw Error(Errc::InvalidArgument, "unknown backend '" + s + "'");
}

Eigen::VectorXf DecoderModel::latent(const Eigen::MatrixXd& filtered_window, Backend backend) const {
  const Eigen::MatrixXf x = cae::normalize_window(filtered_window);
  if (backend == Backend::Float) return cae::encode(cae, x);
  const auto want = backend == Backend::Int8 ? cae::Precision::Int8 : cae::Precision::Fp16;
  if (!quantized || quantized->mode != want)
    throw Error(Errc::InvalidArgument, std::string("model has no ") + backend_name(backend) + " parameters");
  return cae::forward_quantized(*quantized, x);
}

boost::Prediction DecoderModel::decide(const Eigen::MatrixXd& filtered_window, Backend backend) const {
  const Eigen::RowVectorXd z = latent(filtered_window, backend).cast<double>().transpose();
  return boost::predict(ensemble, z);
}

DecoderModel fit_decoder(const WindowDataset& ds, const std::vector<std::size_t>& idx, const PipelineConfig& cfg,
                         std::uint64_t seed, FitInfo* info, const Progress& progress) {
  cfg.validate();
  if (idx.empty()) throw Error(Errc::EmptyInput, "no training windows");

  // Stratified split by trial so overlapping windows never straddle train/val.
  std::map<int, int> trial_label;
  for (auto i : idx) trial_label[ds.trials[i]] = ds.labels[i];
  std::vector<int> by_class[2];
  for (const auto& [t, l] : trial_label) by_class[l].push_back(t);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::set<int> val_trials;
  for (auto& ids : by_class) {
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto n_val = std::min(ids.size() > 1 ? ids.size() - 1 : std::size_t{0},
                                static_cast<std::size_t>(std::ceil(cfg.val_fraction * static_cast<double>(ids.size()))));
    val_trials.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  }
  FitInfo local;
  FitInfo& fi = info ? *info : local;
  fi = {};
  for (auto i : idx) (val_trials.count(ds.trials[i]) ? fi.val : fi.train).push_back(i);

  DecoderModel m;
  m.config = cfg;
  cae::TrainConfig tc = cfg.train;
  tc.seed = derive_seed(seed, 2);
  if (progress) progress("training encoder on " + std::to_string(fi.train.size()) + " windows");
  const cae::TrainResult tr = cae::train(window_set(ds, fi.train), window_set(ds, fi.val), cfg.arch, tc);
  m.cae = tr.params;
  fi.history = tr.history;
  fi.best_epoch = tr.best_epoch;

  const Eigen::MatrixXd z = latent_matrix(m, ds, fi.train, Backend::Float);
  const std::vector<int> y = labels_of(ds, fi.train);
  std::map<std::string, int> subject_index;
  std::vector<int> groups;
  for (auto i : fi.train) groups.push_back(subject_index.emplace(ds.subjects[i], static_cast<int>(subject_index.size())).first->second);
  fi.rounds = cfg.rounds_grid.size() == 1 ? cfg.rounds_grid[0] : boost::select_rounds(z, y, groups, cfg.rounds_grid);
  if (progress) progress("boosting " + std::to_string(fi.rounds) + " rounds");
  m.ensemble = boost::train_adaboost(z, y, fi.rounds, seed);
  return m;
}

std::vector<int> predict_windows(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                 Backend backend) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(m.decide(ds.windows[i], backend).label);
  return out;
}

boost::EvalReport evaluate_model(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                 boost::Level level, Backend backend) {
  const auto preds = predict_windows(m, ds, idx, backend);
  std::vector<int> trials;
  for (auto i : idx) trials.push_back(ds.trials[i]);
  auto r = boost::evaluate(preds, labels_of(ds, idx), level, &trials, m.config.seed);
  r.classifier = "adaboost";
  return r;
}

void separation(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx, double& latent,
                double& raw) {
  const std::vector<int> y = labels_of(ds, idx);
  latent = boost::project_latents_2d(latent_matrix(m, ds, idx, Backend::Float), y).silhouette;
  const auto len = static_cast<Eigen::Index>(ds.windows.front().size());
  Eigen::MatrixXd flat(static_cast<Eigen::Index>(idx.size()), len);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const Eigen::MatrixXf w = cae::normalize_window(ds.windows[idx[i]]);
    flat.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXf>(w.data(), len).cast<double>();
  }
  raw = boost::project_latents_2d(flat, y).silhouette;
}

LosoResult run_loso(const WindowDataset& ds, const PipelineConfig& cfg, const Progress& progress) {
  const auto folds = boost::loso_folds(ds.subjects);
  LosoResult res;
  std::vector<int> preds(ds.size(), 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    LosoFold fold;
    fold.subject = folds[f].held_out;
    fold.train = folds[f].train;
    fold.test = folds[f].test;
    if (progress) progress("fold " + std::to_string(f + 1) + "/" + std::to_string(folds.size()) + ": hold out " + fold.subject);
    fold.model = fit_decoder(ds, fold.train, cfg, derive_seed(cfg.seed, 1000 + f), nullptr, progress);
    fold.preds = predict_windows(fold.model, ds, fold.test);
    fold.accuracy = accuracy_of(fold.preds, labels_of(ds, fold.test));
    separation(fold.model, ds, fold.test, fold.latent_silhouette, fold.raw_silhouette);
    for (std::size_t k = 0; k < fold.test.size(); ++k) preds[fold.test[k]] = fold.preds[k];
    if (progress) progress("fold " + fold.subject + " accuracy " + std::to_string(fold.accuracy));
    res.folds.push_back(std::move(fold));
  }

  res.window = boost::evaluate(preds, ds.labels, boost::Level::Window, nullptr, cfg.seed);
  res.trial = boost::evaluate(preds, ds.labels, boost::Level::Trial, &ds.trials, cfg.seed);
  for (const auto& f : res.folds) {
    res.mean_fold_accuracy += f.accuracy;
    res.latent_silhouette += f.latent_silhouette;
    res.raw_silhouette += f.raw_silhouette;
    const auto y = labels_of(ds, f.test);
    const auto c = boost::confusion_of(f.preds, y);
    res.window.folds.push_back({f.subject, f.test.size(), f.accuracy, boost::class_f1(c, 1), boost::macro_f1(c)});

    std::vector<int> tmap;
    for (auto i : f.test) tmap.push_back(ds.trials[i]);
    const auto tv = boost::vote_trials(f.preds, y, tmap);
    const auto tc = boost::confusion_of(tv.preds, tv.labels);
    res.trial.folds.push_back({f.subject, tc.n(), static_cast<double>(tc.tp + tc.tn) / static_cast<double>(tc.n()),
                               boost::class_f1(tc, 1), boost::macro_f1(tc)});
  }
  const double k = static_cast<double>(res.folds.size());
  res.mean_fold_accuracy /= k;
  res.latent_silhouette /= k;
  res.raw_silhouette /= k;
  for (auto* r : {&res.window, &res.trial}) {
    r->classifier = "adaboost";
    r->diagnostics["mean_fold_accuracy"] = res.mean_fold_accuracy;
    r->diagnostics["silhouette_latent"] = res.latent_silhouette;
    r->diagnostics["silhouette_raw"] = res.raw_silhouette;
  }
  return res;
}

cae::QuantizedParams quantize_model(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                    cae::Precision precision, std::size_t max_windows) {
  std::vector<Eigen::MatrixXf> calib;
  const std::size_t n = std::min(idx.size(), max_windows);
  for (std::size_t k = 0; k < n; ++k) calib.push_back(cae::normalize_window(ds.windows[idx[k * idx.size() / n]]));
  return cae::quantize(m.cae, calib, precision);
}

double loso_accuracy(LosoResult& loso, const WindowDataset& ds, Backend backend) {
  double total = 0.0;
  for (auto& f : loso.folds) {
    if (backend != Backend::Float) {
      const auto p = backend == Backend::Int8 ? cae::Precision::Int8 : cae::Precision::Fp16;
      if (!f.model.quantized || f.model.quantized->mode != p) f.model.quantized = quantize_model(f.model, ds, f.train, p);
    }
    total += accuracy_of(predict_windows(f.model, ds, f.test, backend), labels_of(ds, f.test));
  }
  return total / static_cast<double>(loso.folds.size());
}

cae::ModelFile to_model_file(const DecoderModel& m) {
  cae::ModelFile f;
  f.arch = m.cae.arch;
  cae::append_params(f, m.cae);
  const auto& e = m.ensemble;
  std::vector<double> feat, thr, pol;
  for (const auto& s : e.stumps) {
    feat.push_back(s.feature);
    thr.push_back(s.threshold);
    pol.push_back(s.polarity);
  }
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.feature", feat));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.threshold", thr));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.polarity", pol));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.alpha", e.alphas));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.error", e.errors));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.train_error", e.train_error));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.bound", e.bound));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.n_rounds", {static_cast<double>(e.n_rounds)}));
  f.tensors.push_back(cae::NamedTensor::from_f64("boost.seed", u64_pair(e.seed)));

  const auto& c = m.config;
  const auto& t = c.train;
  f.tensors.push_back(cae::NamedTensor::from_f64(
      "pipeline.bandpass", {c.band.low_hz, c.band.high_hz, static_cast<double>(c.band.order), c.band.fs}));
  f.tensors.push_back(cae::NamedTensor::from_f64("pipeline.ica", {c.ica ? 1.0 : 0.0, c.ica_low_hz, c.ica_high_hz}));
  f.tensors.push_back(cae::NamedTensor::from_f64(
      "pipeline.windowing",
      {static_cast<double>(c.window), static_cast<double>(c.stride), c.guard_s, c.val_fraction}));
  f.tensors.push_back(cae::NamedTensor::from_f64("pipeline.rounds_grid",
                                                 std::vector<double>(c.rounds_grid.begin(), c.rounds_grid.end())));
  f.tensors.push_back(cae::NamedTensor::from_f64(
      "pipeline.train", {t.lambda, t.learning_rate, t.weight_decay, t.dropout, static_cast<double>(t.batch_size),
                         static_cast<double>(t.max_epochs), static_cast<double>(t.patience), t.bn_momentum,
                         t.augment.noise_scale, t.augment.channel_dropout}));
  f.tensors.push_back(cae::NamedTensor::from_f64("pipeline.seed", u64_pair(c.seed)));
  if (m.quantized) cae::append_quantized(f, *m.quantized);
  return f;
}

DecoderModel from_model_file(const cae::ModelFile& f) {
  DecoderModel m;
  m.cae = cae::params_from(f);
  auto& e = m.ensemble;
  const auto feat = f64(f, "boost.feature"), thr = f64(f, "boost.threshold"), pol = f64(f, "boost.polarity");
  e.alphas = f64(f, "boost.alpha");
  e.errors = f64(f, "boost.error");
  e.train_error = f64(f, "boost.train_error");
  e.bound = f64(f, "boost.bound");
  const std::size_t n = feat.size();
  if (thr.size() != n || pol.size() != n || e.alphas.size() != n || e.errors.size() != n || e.train_error.size() != n ||
      e.bound.size() != n)
    throw Error(Errc::InvalidArgument, "boost tensors disagree in length");
  for (std::size_t i = 0; i < n; ++i) {
    const int feature = static_cast<int>(feat[i]);
    if (feature < 0 || feature >= f.arch.latent_dim || (pol[i] != 1.0 && pol[i] != -1.0) || !std::isfinite(e.alphas[i]))
      throw Error(Errc::InvalidArgument, "malformed stump " + std::to_string(i));
    e.stumps.push_back({feature, thr[i], static_cast<int>(pol[i])});
  }
  e.n_rounds = static_cast<int>(f64(f, "boost.n_rounds", 1)[0]);
  e.seed = from_pair(f64(f, "boost.seed"));

  auto& c = m.config;
  c.arch = f.arch;
  const auto band = f64(f, "pipeline.bandpass", 4);
  c.band = {band[0], band[1], static_cast<int>(band[2]), band[3]};
  const auto ica = f64(f, "pipeline.ica", 3);
  c.ica = ica[0] != 0.0;
  c.ica_low_hz = ica[1];
  c.ica_high_hz = ica[2];
  const auto win = f64(f, "pipeline.windowing", 4);
  c.window = static_cast<std::size_t>(win[0]);
  c.stride = static_cast<std::size_t>(win[1]);
  c.guard_s = win[2];
  c.val_fraction = win[3];
  const auto grid = f64(f, "pipeline.rounds_grid");
  c.rounds_grid.assign(grid.begin(), grid.end());
  const auto t = f64(f, "pipeline.train", 10);
  c.train.lambda = t[0];
  c.train.learning_rate = t[1];
  c.train.weight_decay = t[2];
  c.train.dropout = t[3];
  c.train.batch_size = static_cast<int>(t[4]);
  c.train.max_epochs = static_cast<int>(t[5]);
  c.train.patience = static_cast<int>(t[6]);
  c.train.bn_momentum = t[7];
  c.train.augment.noise_scale = t[8];
  c.train.augment.channel_dropout = t[9];
  c.seed = from_pair(f64(f, "pipeline.seed"));
  c.validate();
  m.quantized = cae::quantized_from(f);
  return m;
}

void save_model(const std::filesystem::path& path, const DecoderModel& m) { cae::write_model_file(path, to_model_file(m)); }

DecoderModel load_model(const std::filesystem::path& path) { return from_model_file(cae::read_model_file(path)); }

}  // namespace scb::data
