#include "scb/data/synthetic.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "scb/common/error.hpp"

namespace scb::data {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPinkLowHz = 0.5;

// Indexed by decoder channel: F7 F3 FC5 T7 P7 O1 O2 P8 T8 FC6 F4 F8.
constexpr double kRhythmWeight[12] = {0.3, 0.8, 1.0, 0.4, 0.2, 0.1, 0.1, 0.2, 0.4, 1.0, 0.8, 0.3};
constexpr double kBlinkWeight[12] = {1.0, 0.8, 0.4, 0.15, 0.05, 0.02, 0.02, 0.05, 0.15, 0.4, 0.8, 1.0};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Gaussian 1/f noise shaped in the frequency domain, scaled to the requested RMS.
std::vector<double> pink_noise(std::size_t n, double fs, double rms, std::mt19937_64& rng) {
  std::vector<double> out(n, 0.0);
  if (rms == 0.0 || n == 0) return out;
  const std::size_t m = next_pow2(n);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::complex<double>> spec(m / 2 + 1);
  for (std::size_t k = 1; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(m);
    const double a = f >= kPinkLowHz ? 1.0 / std::sqrt(f) : 0.0;
    const double re = g(rng), im = g(rng);
    spec[k] = a * std::complex<double>(re, k + 1 == spec.size() ? 0.0 : im);
  }
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> full;
  fft.inv(full, spec, static_cast<Eigen::Index>(m));
  double ss = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += full[i];
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) ss += (full[i] - mean) * (full[i] - mean);
  const double scale = ss > 0.0 ? rms / std::sqrt(ss / static_cast<double>(n)) : 0.0;
  for (std::size_t i = 0; i < n; ++i) out[i] = (full[i] - mean) * scale;
  return out;
}

// Oscillation with a slowly wandering frequency (Ornstein-Uhlenbeck, 0.2 Hz sd).
std::vector<double> rhythm(std::size_t n, double f0, double fs, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const double tau = 0.5 * fs, sd = 0.2;
  const double a = std::exp(-1.0 / tau), b = sd * std::sqrt(1.0 - a * a);
  double phase = u(rng), df = 0.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = phase;
    df = a * df + b * g(rng);
    phase += kTwoPi * (f0 + df) / fs;
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(Errc::InvalidArgument, m); };
  if (n_subjects < 1 || trials < 0) fail("need at least one subject and a non-negative trial count");
  if (fs != 250.0) fail("synthetic data is generated at 250 Hz");
  if (!(move_s > 1.0) || !(rest_s > 1.0)) fail("move and rest durations must exceed 1 s");
  if (!(rest_jitter_s >= 0.0) || rest_s - rest_jitter_s <= 1.0) fail("rest jitter must keep gaps above 1 s");
  for (double d : {mu_depth, beta_depth})
    if (!(d >= 0.0 && d <= 1.0)) fail("ERD depths must lie in [0, 1]");
  for (double v : {mu_uv, beta_uv, noise_uv, blink_rate_per_min, blink_uv, subject_offset_spread, ers_gain})
    if (!(v >= 0.0) || !std::isfinite(v)) fail("amplitudes, rates and spreads must be finite and non-negative");
  if (subject_offset_spread >= 1.0) fail("subject offset spread must be below 1");
}

double rhythm_weight(std::size_t channel) { return kRhythmWeight[channel]; }
double blink_weight(std::size_t channel) { return kBlinkWeight[channel]; }

double pink_band_fraction(double lo_hz, double hi_hz, double fs) {
  const double top = fs / 2.0;
  lo_hz = std::clamp(lo_hz, kPinkLowHz, top);
  hi_hz = std::clamp(hi_hz, kPinkLowHz, top);
  return hi_hz > lo_hz ? std::log(hi_hz / lo_hz) / std::log(top / kPinkLowHz) : 0.0;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<SyntheticSubject> generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const auto move_len = static_cast<std::size_t>(std::llround(cfg.move_s * cfg.fs));
  std::vector<SyntheticSubject> out;
  for (int s = 0; s < cfg.n_subjects; ++s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SyntheticSubject subj;
    subj.id = (s + 1 < 10 ? "S0" : "S") + std::to_string(s + 1);
    subj.rhythm_gain = 1.0 + cfg.subject_offset_spread * (2.0 * u(rng) - 1.0);

    // Timeline: rest, then (move, rest) per trial.
    Recording& rec = subj.recording;
    rec.channels = dsp::decoder_channel_list();
    rec.sample_rate = cfg.fs;
    auto gap = [&] {
      return static_cast<std::size_t>(std::llround((cfg.rest_s + cfg.rest_jitter_s * (2.0 * u(rng) - 1.0)) * cfg.fs));
    };
    std::size_t t = gap();
    rec.events.push_back({0, t, Label::Rest});
    for (int k = 0; k < cfg.trials; ++k) {
      rec.events.push_back({t, t + move_len, Label::Move});
      t += move_len;
      const std::size_t g = gap();
      rec.events.push_back({t, t + g, Label::Rest});
      t += g;
    }
    const std::size_t n = t;

    std::vector<double> move(n, 0.0), after(n, 0.0);
    const auto ers_len = static_cast<std::size_t>(cfg.fs);
    for (const auto& e : rec.events) {
      if (e.label != Label::Move) continue;
      for (std::size_t i = e.start_sample; i < e.end_sample; ++i) move[i] = 1.0;
      for (std::size_t i = e.end_sample; i < std::min(n, e.end_sample + ers_len); ++i) after[i] = 1.0;
    }

    const auto mu_phase = rhythm(n, 10.0, cfg.fs, rng);
    const auto beta_phase = rhythm(n, 20.0, cfg.fs, rng);
    std::vector<double> blinks(n, 0.0);
    if (cfg.blink_rate_per_min > 0.0 && cfg.blink_uv > 0.0) {
      std::exponential_distribution<double> wait(cfg.blink_rate_per_min / 60.0);
      double at = wait(rng);
      while (true) {
        const auto start = static_cast<std::size_t>(at * cfg.fs);
        if (start >= n) break;
        const double freq = 0.5 + 1.5 * u(rng);
        const double amp = cfg.blink_uv * (0.8 + 0.4 * u(rng));
        const auto len = static_cast<std::size_t>(cfg.fs / freq);
        for (std::size_t i = 0; i < len && start + i < n; ++i)
          blinks[start + i] += amp * std::sin(kTwoPi * freq * static_cast<double>(i) / cfg.fs);
        at += static_cast<double>(len) / cfg.fs + wait(rng);
      }
    }

    rec.data.resize(12, static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < 12; ++c) {
      const double mu_off = 0.3 * (2.0 * u(rng) - 1.0), beta_off = 0.3 * (2.0 * u(rng) - 1.0);
      const auto noise = pink_noise(n, cfg.fs, cfg.noise_uv, rng);
      const double w = subj.rhythm_gain * kRhythmWeight[c];
      for (std::size_t i = 0; i < n; ++i) {
        const double mu_env = 1.0 - cfg.mu_depth * move[i];
        const double beta_env = (1.0 - cfg.beta_depth * move[i]) * (cfg.ers ? 1.0 + cfg.ers_gain * after[i] : 1.0);
        const double v = w * (cfg.mu_uv * mu_env * std::sin(mu_phase[i] + mu_off) +
                              cfg.beta_uv * beta_env * std::sin(beta_phase[i] + beta_off)) +
                         noise[i] + kBlinkWeight[c] * blinks[i];
        // Stored as f32 on disk; round here so files round-trip exactly.
        rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) = static_cast<float>(v);
      }
    }
    out.push_back(std::move(subj));
  }
  return out;
}

namespace {

constexpr std::size_t kLiveBlock = 4096;
constexpr std::size_t kLiveFade = 250;

}  // namespace

LiveSynth::LiveSynth(const SynthConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      rhythm_rng_(derive_seed(seed, 0)),
      noise_rng_(derive_seed(seed, 1)),
      blink_rng_(derive_seed(seed, 2)) {
  cfg_.validate();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  gain_ = 1.0 + cfg_.subject_offset_spread * (2.0 * u(rhythm_rng_) - 1.0);
  mu_.phase = kTwoPi * u(rhythm_rng_);
  beta_.phase = kTwoPi * u(rhythm_rng_);
  for (std::size_t c = 0; c < 12; ++c) {
    mu_off_[c] = 0.3 * (2.0 * u(rhythm_rng_) - 1.0);
    beta_off_[c] = 0.3 * (2.0 * u(rhythm_rng_) - 1.0);
  }
  cur_.resize(12);
  for (auto& b : cur_) b = pink_noise(kLiveBlock, cfg_.fs, cfg_.noise_uv, noise_rng_);
  if (cfg_.blink_rate_per_min > 0.0) next_blink_ = std::exponential_distribution<double>(cfg_.blink_rate_per_min / 60.0)(blink_rng_);
}

void LiveSynth::next_noise_blocks() {
  next_.resize(12);
  for (auto& b : next_) b = pink_noise(kLiveBlock, cfg_.fs, cfg_.noise_uv, noise_rng_);
}

double LiveSynth::noise_sample(std::size_t c) {
  const std::size_t fade_at = kLiveBlock - kLiveFade;
  if (noise_i_ < fade_at) return cur_[c][noise_i_];
  const double th = 0.5 * std::numbers::pi * (static_cast<double>(noise_i_ - fade_at) + 0.5) / kLiveFade;
  return std::cos(th) * cur_[c][noise_i_] + std::sin(th) * next_[c][noise_i_ - fade_at];
}

Eigen::MatrixXd LiveSynth::render(std::size_t n, const std::function<Label(std::uint64_t)>& intent) {
  Eigen::MatrixXd out(12, static_cast<Eigen::Index>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tau = 0.5 * cfg_.fs, sd = 0.2;
  const double a = std::exp(-1.0 / tau), b = sd * std::sqrt(1.0 - a * a);
  const auto ers_len = static_cast<std::uint64_t>(cfg_.fs);
  for (std::size_t k = 0; k < n; ++k, ++t_) {
    const bool move = intent(t_) == Label::Move;
    since_move_ = move ? 0 : (since_move_ == ~std::uint64_t{0} ? since_move_ : since_move_ + 1);
    const double after = !move && since_move_ >= 1 && since_move_ <= ers_len ? 1.0 : 0.0;

    if (cfg_.blink_rate_per_min > 0.0 && cfg_.blink_uv > 0.0 && t_ >= blink_start_ + blink_len_ &&
        static_cast<double>(t_) >= next_blink_ * cfg_.fs) {
      blink_start_ = t_;
      blink_freq_ = 0.5 + 1.5 * u(blink_rng_);
      blink_amp_ = cfg_.blink_uv * (0.8 + 0.4 * u(blink_rng_));
      blink_len_ = static_cast<std::uint64_t>(cfg_.fs / blink_freq_);
      next_blink_ = static_cast<double>(t_ + blink_len_) / cfg_.fs +
                    std::exponential_distribution<double>(cfg_.blink_rate_per_min / 60.0)(blink_rng_);
    }
    const double blink = t_ < blink_start_ + blink_len_ && blink_len_ > 0
                             ? blink_amp_ * std::sin(kTwoPi * blink_freq_ * static_cast<double>(t_ - blink_start_) / cfg_.fs)
                             : 0.0;

    if (noise_i_ == kLiveBlock - kLiveFade) next_noise_blocks();
    const double mu_env = 1.0 - cfg_.mu_depth * (move ? 1.0 : 0.0);
    const double beta_env =
        (1.0 - cfg_.beta_depth * (move ? 1.0 : 0.0)) * (cfg_.ers ? 1.0 + cfg_.ers_gain * after : 1.0);
    for (std::size_t c = 0; c < 12; ++c) {
      const double w = gain_ * kRhythmWeight[c];
      const double v = w * (cfg_.mu_uv * mu_env * std::sin(mu_.phase + mu_off_[c]) +
                            cfg_.beta_uv * beta_env * std::sin(beta_.phase + beta_off_[c])) +
                       noise_sample(c) + kBlinkWeight[c] * blink;
      out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = static_cast<float>(v);
    }
    if (++noise_i_ == kLiveBlock) {
      cur_.swap(next_);
      noise_i_ = kLiveFade;
    }
    for (auto [osc, f0] : {std::pair{&mu_, 10.0}, std::pair{&beta_, 20.0}}) {
      osc->df = a * osc->df + b * gauss_(rhythm_rng_);
      osc->phase += kTwoPi * (f0 + osc->df) / cfg_.fs;
    }
  }
  return out;
}

}  // namespace scb::data
