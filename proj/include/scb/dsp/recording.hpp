#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scb {

enum class Label : int { Rest = 0, Move = 1 };

std::string_view label_name(Label label);
Label parse_label(std::string_view text);  // throws InvalidArgument

struct Event {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;  // exclusive
  Label label = Label::Move;

  std::size_t length() const { return end_sample - start_sample; }
  bool operator==(const Event&) const = default;
};

// Electrodes present on both the lab cap and the 14-channel consumer headset,
// in the order the decoder expects them.
inline constexpr std::array<std::string_view, 12> kDecoderChannels = {
    "F7", "F3", "FC5", "T7", "P7", "O1", "O2", "P8", "T8", "FC6", "F4", "F8"};

inline constexpr std::size_t kWindowChannels = 12;
inline constexpr std::size_t kWindowSamples = 250;
inline constexpr double kDecoderRateHz = 250.0;

struct Recording {
  std::vector<std::string> channels;
  double sample_rate = kDecoderRateHz;
  Eigen::MatrixXd data;  // [n_channels x n_samples], microvolts
  std::vector<Event> events;

  std::size_t n_channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t n_samples() const { return static_cast<std::size_t>(data.cols()); }
  std::optional<std::size_t> channel_index(std::string_view name) const;

  // Throws InvalidArgument on duplicate names, bad events, or non-finite samples.
  void validate() const;
};

struct EpochWindow {
  Eigen::MatrixXd samples;  // [12 x 250]
  std::optional<Label> label;
  std::string recording_id;
  std::size_t start_sample = 0;
};

namespace dsp {

// Rows reordered/subset to `wanted`; throws MissingChannel(name).
Recording select_channels(const Recording& rec, const std::vector<std::string>& wanted);

std::vector<std::string> decoder_channel_list();

enum class WindowLabeling { EventMajority, Unlabeled };

// Label covering more than half of [start, start + len), if any.
std::optional<Label> majority_label(const std::vector<Event>& events, std::size_t start, std::size_t len);

std::size_t window_count(std::size_t n_samples, std::size_t window_len, std::size_t stride);

std::vector<EpochWindow> epoch_stream(const Recording& rec, std::size_t window_len, std::size_t stride,
                                      WindowLabeling labeling, const std::string& recording_id = {});

}  // namespace dsp
}  // namespace scb
