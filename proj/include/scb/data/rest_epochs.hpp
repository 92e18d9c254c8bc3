#pragma once

#include <vector>

#include "scb/dsp/recording.hpp"

namespace scb::data {

constexpr double kDefaultGuardSeconds = 1.0;

// Rest intervals are the gaps around move events (the recording edges count
// as boundaries), shrunk by the guard on both sides; gaps left shorter than
// one second are dropped. Events need not be sorted but must not overlap.
std::vector<Event> extract_rest_epochs(const Recording& rec, double guard_s = kDefaultGuardSeconds);

}  // namespace scb::data
