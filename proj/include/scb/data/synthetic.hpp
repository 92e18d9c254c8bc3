#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scb/dsp/recording.hpp"

namespace scb::data {

struct SynthConfig {
  int n_subjects = 5;
  int trials = 15;  // per subject
  double fs = 250.0;
  double move_s = 4.0;
  double rest_s = 6.0;        // gap after each move; the recording also opens with one
  double rest_jitter_s = 0.5;  // uniform +- jitter on each gap
  double mu_uv = 10.0;        // amplitude at full channel weight
  double mu_depth = 0.5;      // fraction of amplitude lost during move
  double beta_uv = 6.0;
  double beta_depth = 0.5;
  double noise_uv = 14.0;  // pink noise RMS over 0.5 Hz .. fs/2
  double blink_rate_per_min = 6.0;
  double blink_uv = 100.0;
  double subject_offset_spread = 0.2;  // rhythm gain drawn from 1 +- spread
  bool ers = false;                    // beta rebound for 1 s after each move
  double ers_gain = 0.5;
  std::uint64_t seed = 7;

  // Throws InvalidArgument: depths outside [0, 1], durations <= 1 s, fs != 250.
  void validate() const;
};

struct SyntheticSubject {
  std::string id;  // "S01", "S02", ...
  double rhythm_gain = 1.0;
  Recording recording;  // decoder channel order, move and rest events
};

std::vector<SyntheticSubject> generate_synthetic(const SynthConfig& cfg);

// Per-channel rhythm weight (sensorimotor sites highest) and blink weight
// (frontal sites highest), in decoder channel order.
double rhythm_weight(std::size_t channel);
double blink_weight(std::size_t channel);

// Fraction of the pink-noise power that falls in [lo_hz, hi_hz).
double pink_band_fraction(double lo_hz, double hi_hz, double fs);

// Frame-by-frame generator for one synthetic subject whose movement intent is
// supplied per sample, for live sessions. Same signal model as
// generate_synthetic; pink noise comes in 4096-sample blocks joined by a
// 1 s equal-power crossfade. Output is independent of how rendering is chunked.
class LiveSynth {
 public:
  LiveSynth(const SynthConfig& cfg, std::uint64_t seed);

  // Next n frames [12 x n]; intent(t) is the label of absolute sample t.
  Eigen::MatrixXd render(std::size_t n, const std::function<Label(std::uint64_t)>& intent);
  std::uint64_t position() const { return t_; }
  double rhythm_gain() const { return gain_; }

 private:
  struct Oscillator {
    double phase = 0.0, df = 0.0;
  };
  double noise_sample(std::size_t c);
  void next_noise_blocks();

  SynthConfig cfg_;
  double gain_ = 1.0;
  std::uint64_t t_ = 0;
  std::mt19937_64 rhythm_rng_, noise_rng_, blink_rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};  // caches between calls
  Oscillator mu_, beta_;
  double mu_off_[12] = {}, beta_off_[12] = {};
  std::vector<std::vector<double>> cur_, next_;
  std::size_t noise_i_ = 0;
  double next_blink_ = 0.0;  // seconds
  std::uint64_t blink_start_ = 0, blink_len_ = 0;
  double blink_amp_ = 0.0, blink_freq_ = 0.0;
  std::uint64_t since_move_ = ~std::uint64_t{0};  // samples since the last move sample
};

// splitmix64 finaliser used to derive independent per-subject streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scb::data
