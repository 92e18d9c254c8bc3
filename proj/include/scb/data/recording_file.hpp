#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scb/dsp/recording.hpp"

namespace scb::data {

// EEG1 layout (little endian):
//   "EEG1" | u16 version | u16 n_channels | f32 sample_rate_hz | u64 n_samples
//   | n_channels x (u8 length, ASCII name) | f32 payload, time-major frames.
// Samples are stored as f32, so a round trip is exact for f32-representable data.
constexpr std::uint16_t kRecordingVersion = 1;

std::vector<std::uint8_t> serialize_recording(const Recording& rec);
// Events are not part of the binary file and come back empty.
Recording parse_recording(const std::vector<std::uint8_t>& bytes);

// "start_sample,end_sample,label" per line; a header line with those names is
// written and accepted. Throws BadEventRow naming the 1-based line.
std::string format_events(const std::vector<Event>& events);
std::vector<Event> parse_events(std::string_view text);

// Events go to the sibling "<stem>.events.csv".
std::filesystem::path events_path(const std::filesystem::path& recording);

void write_recording(const std::filesystem::path& path, const Recording& rec);
// Reads the sibling event file when it exists.
Recording read_recording(const std::filesystem::path& path);

// Every "*.eeg" file in `dir`, sorted by name; the file stem is the subject id.
struct NamedRecording {
  std::string subject;
  Recording recording;
};
std::vector<NamedRecording> read_dataset(const std::filesystem::path& dir);

}  // namespace scb::data
