#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scb/boost/adaboost.hpp"
#include "scb/boost/evaluate.hpp"
#include "scb/cae/arch.hpp"
#include "scb/cae/model_file.hpp"
#include "scb/cae/quantize.hpp"
#include "scb/cae/train.hpp"
#include "scb/data/rest_epochs.hpp"
#include "scb/dsp/filter.hpp"
#include "scb/dsp/recording.hpp"

namespace scb::data {

struct PipelineConfig {
  dsp::BandDesign band{8.0, 40.0, 4, kDecoderRateHz};
  bool ica = true;
  double ica_low_hz = 1.0;  // band used only to fit the unmixing
  double ica_high_hz = 45.0;
  double guard_s = kDefaultGuardSeconds;
  std::size_t window = kWindowSamples;
  std::size_t stride = 125;
  double val_fraction = 0.15;  // of training trials, for early stopping
  std::vector<int> rounds_grid{50, 100, 200, 400};
  cae::ArchDescriptor arch;
  cae::TrainConfig train;  // seed is replaced per fit
  std::uint64_t seed = 7;

  PipelineConfig();
  void validate() const;  // throws InvalidArgument
};

// Decoder channels in decoder order, resampled to 250 Hz with events rescaled.
Recording conform_recording(const Recording& raw);

// Channel-space matrix that removes the ICA components flagged as artifacts:
// I - A_r W_r. Identity when nothing is flagged. The unmixing is fitted on a
// zero-phase ica_low..ica_high copy of the recording.
Eigen::MatrixXd ica_cleaning_matrix(const Recording& rec, const PipelineConfig& cfg, std::vector<int>* rejected = nullptr);

// Per-frame front end shared by offline decoding and streaming: spatial
// cleaning followed by the causal band-pass, one frame at a time, so both
// paths produce bit-identical samples.
class FrameProcessor {
 public:
  FrameProcessor(const Eigen::MatrixXd& spatial, const dsp::FilterCoeffs& band);

  void process(const double* in, double* out);
  void reset();
  std::size_t channels() const { return filters_.size(); }

 private:
  Eigen::MatrixXd spatial_;
  bool identity_;
  std::vector<dsp::CausalFilter> filters_;
};

dsp::FilterCoeffs design_band(const PipelineConfig& cfg);

// Whole-recording run of FrameProcessor.
Eigen::MatrixXd preprocess(const Recording& rec, const Eigen::MatrixXd& spatial, const PipelineConfig& cfg);

struct PreparedRecording {
  std::string subject;
  Recording recording;      // conformed raw data with events
  Eigen::MatrixXd spatial;  // cleaning matrix
  std::vector<int> rejected;
  Eigen::MatrixXd filtered;  // [12 x n] after FrameProcessor
};

PreparedRecording prepare_recording(const std::string& subject, const Recording& raw, const PipelineConfig& cfg);

// Labelled windows lying wholly inside a move event or an extracted rest
// interval, stepped by cfg.stride from each interval start. Rest windows are
// subsampled per subject to the move count. Each interval is one trial.
struct WindowDataset {
  std::vector<Eigen::MatrixXd> windows;  // filtered [12 x 250]
  std::vector<int> labels;
  std::vector<int> trials;  // unique across the dataset
  std::vector<std::string> subjects;
  std::vector<std::size_t> starts;

  std::size_t size() const { return windows.size(); }
};

WindowDataset build_dataset(const std::vector<PreparedRecording>& recs, const PipelineConfig& cfg);

enum class Backend { Float, Int8, Fp16 };
const char* backend_name(Backend b);
Backend parse_backend(const std::string& s);  // "float" | "int8" | "fp16"

struct DecoderModel {
  PipelineConfig config;
  cae::CaeParams cae;
  boost::StumpEnsemble ensemble;
  std::optional<cae::QuantizedParams> quantized;

  // Normalise, encode with the chosen backend. Throws InvalidArgument if the
  // backend's quantized parameters are absent.
  Eigen::VectorXf latent(const Eigen::MatrixXd& filtered_window, Backend backend = Backend::Float) const;
  boost::Prediction decide(const Eigen::MatrixXd& filtered_window, Backend backend = Backend::Float) const;
};

struct FitInfo {
  std::vector<std::size_t> train, val;  // dataset indices
  std::vector<cae::EpochRecord> history;
  int best_epoch = 0;
  int rounds = 0;
};

using Progress = std::function<void(const std::string&)>;

// CAE on a trial-grouped train/val split of `idx`, then AdaBoost on the train
// split's latents with rounds chosen by subject-grouped cross-validation.
DecoderModel fit_decoder(const WindowDataset& ds, const std::vector<std::size_t>& idx, const PipelineConfig& cfg,
                         std::uint64_t seed, FitInfo* info = nullptr, const Progress& progress = {});

// Predictions over dataset indices.
std::vector<int> predict_windows(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                 Backend backend = Backend::Float);

boost::EvalReport evaluate_model(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                 boost::Level level, Backend backend = Backend::Float);

struct LosoFold {
  std::string subject;
  DecoderModel model;
  std::vector<std::size_t> train, test;
  std::vector<int> preds;
  double accuracy = 0.0;
  double latent_silhouette = 0.0, raw_silhouette = 0.0;
};

struct LosoResult {
  boost::EvalReport window, trial;  // pooled over folds; per-fold rows in .folds
  double mean_fold_accuracy = 0.0;
  double latent_silhouette = 0.0, raw_silhouette = 0.0;  // means over folds
  std::vector<LosoFold> folds;
};

// One decoder per held-out subject, trained on the others only.
LosoResult run_loso(const WindowDataset& ds, const PipelineConfig& cfg, const Progress& progress = {});

// Window-level accuracy of fold models with the given backend on their test
// subjects (quantizing from training windows when needed).
double loso_accuracy(LosoResult& loso, const WindowDataset& ds, Backend backend);

// Mean silhouette of PCA-projected test latents and of the flattened
// normalised windows.
void separation(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx, double& latent,
                double& raw);

// Quantize with up to `max_windows` normalised windows from idx.
cae::QuantizedParams quantize_model(const DecoderModel& m, const WindowDataset& ds, const std::vector<std::size_t>& idx,
                                    cae::Precision precision, std::size_t max_windows = 512);

cae::ModelFile to_model_file(const DecoderModel& m);
DecoderModel from_model_file(const cae::ModelFile& f);
void save_model(const std::filesystem::path& path, const DecoderModel& m);
DecoderModel load_model(const std::filesystem::path& path);

}  // namespace scb::data
