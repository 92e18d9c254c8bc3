#include "scb/data/rest_epochs.hpp"

#include <algorithm>
#include <cmath>

#include "scb/common/error.hpp"

namespace scb::data {

std::vector<Event> extract_rest_epochs(const Recording& rec, double guard_s) {
  if (!(guard_s >= 0.0)) throw Error(Errc::InvalidArgument, "guard must be non-negative");
  std::vector<Event> moves;
  for (const auto& e : rec.events)
    if (e.label == Label::Move) moves.push_back(e);
  std::sort(moves.begin(), moves.end(), [](const Event& a, const Event& b) { return a.start_sample < b.start_sample; });
  for (std::size_t i = 1; i < moves.size(); ++i)
    if (moves[i].start_sample < moves[i - 1].end_sample) throw Error(Errc::InvalidArgument, "move events overlap");

  const auto guard = static_cast<std::size_t>(std::llround(guard_s * rec.sample_rate));
  const auto min_len = static_cast<std::size_t>(std::llround(rec.sample_rate));
  std::vector<Event> out;
  auto add_gap = [&](std::size_t lo, std::size_t hi) {
    if (hi < 2 * guard || hi - 2 * guard < lo) return;
    const std::size_t a = lo + guard, b = hi - guard;
    if (b - a >= min_len) out.push_back({a, b, Label::Rest});
  };
  std::size_t cursor = 0;
  for (const auto& m : moves) {
    add_gap(cursor, m.start_sample);
    cursor = m.end_sample;
  }
  add_gap(cursor, rec.n_samples());
  return out;
}

}  // namespace scb::data
