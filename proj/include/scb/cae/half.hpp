#pragma once

#include <cstdint>

namespace scb::cae {

// IEEE 754 binary16, round to nearest even. Overflow gives +-inf, NaN stays NaN.
std::uint16_t float_to_half(float f);
float half_to_float(std::uint16_t h);

inline float round_to_half(float f) { return half_to_float(float_to_half(f)); }

}  // namespace scb::cae
