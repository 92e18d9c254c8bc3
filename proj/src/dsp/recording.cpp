#include "scb/dsp/recording.hpp"

#include <algorithm>
#include <set>

#include "scb/common/error.hpp"

namespace scb {

std::string_view label_name(Label label) { return label == Label::Move ? "move" : "rest"; }

Label parse_label(std::string_view text) {
  if (text == "move") return Label::Move;
  if (text == "rest") return Label::Rest;
  throw Error(Errc::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

std::optional<std::size_t> Recording::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == name) return i;
  return std::nullopt;
}

void Recording::validate() const {
  if (!(sample_rate > 0.0)) throw Error(Errc::InvalidArgument, "sample rate must be positive");
  if (channels.size() != n_channels()) throw Error(Errc::InvalidArgument, "channel table does not match data rows");
  std::set<std::string> seen;
  for (const auto& c : channels)
    if (!seen.insert(c).second) throw Error(Errc::InvalidArgument, "duplicate channel " + c);
  for (const auto& e : events)
    if (e.start_sample >= e.end_sample || e.end_sample > n_samples())
      throw Error(Errc::InvalidArgument, "event interval outside recording");
  if (!data.allFinite()) throw Error(Errc::NonFinite, "recording contains NaN/Inf");
}

namespace dsp {

Recording select_channels(const Recording& rec, const std::vector<std::string>& wanted) {
  Recording out;
  out.channels = wanted;
  out.sample_rate = rec.sample_rate;
  out.events = rec.events;
  out.data.resize(static_cast<Eigen::Index>(wanted.size()), rec.data.cols());
  for (std::size_t i = 0; i < wanted.size(); ++i) {
    const auto idx = rec.channel_index(wanted[i]);
    if (!idx) throw Error(Errc::MissingChannel, wanted[i]);
    out.data.row(static_cast<Eigen::Index>(i)) = rec.data.row(static_cast<Eigen::Index>(*idx));
  }
  return out;
}

std::vector<std::string> decoder_channel_list() {
  return {kDecoderChannels.begin(), kDecoderChannels.end()};
}

std::optional<Label> majority_label(const std::vector<Event>& events, std::size_t start, std::size_t len) {
  std::size_t cover[2] = {0, 0};
  const std::size_t end = start + len;
  for (const auto& e : events) {
    const std::size_t lo = std::max(start, e.start_sample);
    const std::size_t hi = std::min(end, e.end_sample);
    if (hi > lo) cover[static_cast<int>(e.label)] += hi - lo;
  }
  const std::size_t move = cover[1];
  const std::size_t rest = len - std::min(len, move);
  // Samples not covered by a move event count as rest when no rest events are
  // listed explicitly; explicit rest events are used otherwise.
  const bool explicit_rest = std::any_of(events.begin(), events.end(), [](const Event& e) { return e.label == Label::Rest; });
  const std::size_t rest_count = explicit_rest ? cover[0] : rest;
  if (2 * move > len) return Label::Move;
  if (2 * rest_count > len) return Label::Rest;
  return std::nullopt;
}

std::size_t window_count(std::size_t n_samples, std::size_t window_len, std::size_t stride) {
  if (stride == 0 || window_len == 0 || n_samples < window_len) return 0;
  return (n_samples - window_len) / stride + 1;
}

std::vector<EpochWindow> epoch_stream(const Recording& rec, std::size_t window_len, std::size_t stride,
                                      WindowLabeling labeling, const std::string& recording_id) {
  if (stride == 0) throw Error(Errc::InvalidArgument, "stride must be >= 1");
  const std::size_t count = window_count(rec.n_samples(), window_len, stride);
  std::vector<EpochWindow> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * stride;
    EpochWindow win;
    win.samples = rec.data.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(window_len));
    win.recording_id = recording_id;
    win.start_sample = start;
    if (labeling == WindowLabeling::EventMajority) win.label = majority_label(rec.events, start, window_len);
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace dsp
}  // namespace scb
