#include "scb/data/recording_file.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "scb/common/error.hpp"

namespace scb::data {

namespace {

static_assert(std::endian::native == std::endian::little, "EEG1 writer assumes a little-endian host");

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n) throw Error(Errc::TruncatedPayload, std::string("file ends inside ") + what);
  }

  std::size_t remaining() const { return b_.size() - pos_; }
  const std::uint8_t* here() const { return b_.data() + pos_; }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

std::size_t parse_index(std::string_view field, std::size_t line) {
  std::size_t v = 0;
  const auto* end = field.data() + field.size();
  const auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end || field.empty())
    throw Error(Errc::BadEventRow, "line " + std::to_string(line) + ": bad sample index '" + std::string(field) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::uint8_t> serialize_recording(const Recording& rec) {
  if (rec.channels.size() != rec.n_channels()) throw Error(Errc::InvalidArgument, "channel table does not match data rows");
  if (rec.n_channels() > 0xFFFF) throw Error(Errc::InvalidArgument, "too many channels");
  std::vector<std::uint8_t> out;
  out.reserve(24 + rec.n_channels() * (rec.n_samples() * 4 + 8));
  out.insert(out.end(), {'E', 'E', 'G', '1'});
  put<std::uint16_t>(out, kRecordingVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(rec.n_channels()));
  put<float>(out, static_cast<float>(rec.sample_rate));
  put<std::uint64_t>(out, rec.n_samples());
  for (const auto& name : rec.channels) {
    if (name.size() > 255) throw Error(Errc::InvalidArgument, "channel name longer than 255 bytes");
    out.push_back(static_cast<std::uint8_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
  }
  for (Eigen::Index t = 0; t < rec.data.cols(); ++t)
    for (Eigen::Index c = 0; c < rec.data.rows(); ++c) put<float>(out, static_cast<float>(rec.data(c, t)));
  return out;
}

Recording parse_recording(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.str(std::min<std::size_t>(4, bytes.size()), "magic") != "EEG1") throw Error(Errc::BadMagic, "not an EEG1 file");
  const auto version = r.get<std::uint16_t>("header");
  if (version != kRecordingVersion)
    throw Error(Errc::InvalidArgument, "unsupported EEG1 version " + std::to_string(version));
  const auto n_ch = r.get<std::uint16_t>("header");
  const auto fs = r.get<float>("header");
  const auto n = r.get<std::uint64_t>("header");
  Recording rec;
  rec.sample_rate = fs;
  for (std::uint16_t c = 0; c < n_ch; ++c) {
    const auto len = r.get<std::uint8_t>("channel table");
    rec.channels.push_back(r.str(len, "channel table"));
  }
  const std::uint64_t frame = static_cast<std::uint64_t>(n_ch) * 4;
  if (frame > 0 && n > r.remaining() / frame) throw Error(Errc::TruncatedPayload, "payload shorter than header declares");
  if (r.remaining() != frame * n) throw Error(Errc::InvalidArgument, "trailing bytes after payload");
  rec.data.resize(n_ch, static_cast<Eigen::Index>(n));
  const std::uint8_t* p = r.here();
  for (Eigen::Index t = 0; t < rec.data.cols(); ++t)
    for (Eigen::Index c = 0; c < n_ch; ++c) {
      float v;
      std::memcpy(&v, p, 4);
      p += 4;
      rec.data(c, t) = v;
    }
  return rec;
}

std::string format_events(const std::vector<Event>& events) {
  std::string out = "start_sample,end_sample,label\n";
  for (const auto& e : events)
    out += std::to_string(e.start_sample) + "," + std::to_string(e.end_sample) + "," + std::string(label_name(e.label)) + "\n";
  return out;
}

std::vector<Event> parse_events(std::string_view text) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line == "start_sample,end_sample,label") continue;
    const std::size_t c1 = line.find(','), c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw Error(Errc::BadEventRow, "line " + std::to_string(line_no) + ": expected 3 fields");
    Event e;
    e.start_sample = parse_index(trim(line.substr(0, c1)), line_no);
    e.end_sample = parse_index(trim(line.substr(c1 + 1, c2 - c1 - 1)), line_no);
    const std::string_view label = trim(line.substr(c2 + 1));
    if (label != "move" && label != "rest")
      throw Error(Errc::BadEventRow, "line " + std::to_string(line_no) + ": unknown label '" + std::string(label) + "'");
    e.label = parse_label(label);
    if (e.start_sample >= e.end_sample)
      throw Error(Errc::BadEventRow, "line " + std::to_string(line_no) + ": start must be before end");
    events.push_back(e);
  }
  return events;
}

std::filesystem::path events_path(const std::filesystem::path& recording) {
  std::filesystem::path p = recording;
  p.replace_extension();
  p += ".events.csv";
  return p;
}

void write_recording(const std::filesystem::path& path, const Recording& rec) {
  const auto bytes = serialize_recording(rec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream ev(events_path(path));
  ev << format_events(rec.events);
  if (!f || !ev) throw Error(Errc::Io, "write failed for " + path.string());
}

Recording read_recording(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Recording rec = parse_recording(bytes);
  const auto ev = events_path(path);
  if (std::filesystem::exists(ev)) {
    std::ifstream e(ev);
    std::stringstream ss;
    ss << e.rdbuf();
    rec.events = parse_events(ss.str());
    for (const auto& x : rec.events)
      if (x.end_sample > rec.n_samples())
        throw Error(Errc::BadEventRow, "event [" + std::to_string(x.start_sample) + "," + std::to_string(x.end_sample) +
                                           ") extends past the recording");
  }
  return rec;
}

std::vector<NamedRecording> read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::Io, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".eeg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(Errc::EmptyInput, "no .eeg recordings in " + dir.string());
  std::vector<NamedRecording> out;
  for (const auto& f : files) out.push_back({f.stem().string(), read_recording(f)});
  return out;
}

}  // namespace scb::data
