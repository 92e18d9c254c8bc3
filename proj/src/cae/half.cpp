#include "scb/cae/half.hpp"

#include <bit>
#include <cmath>

namespace scb::cae {

namespace {

// Shift right by s with round-to-nearest-even on the discarded bits.
std::uint32_t shift_rne(std::uint32_t m, int s) {
  const std::uint32_t q = m >> s;
  const std::uint32_t rem = m & ((1u << s) - 1u);
  const std::uint32_t half = 1u << (s - 1);
  return q + ((rem > half || (rem == half && (q & 1u))) ? 1u : 0u);
}

}  // namespace

std::uint16_t float_to_half(float f) {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const std::uint16_t sign = static_cast<std::uint16_t>((x >> 16) & 0x8000u);
  const std::uint32_t absx = x & 0x7fffffffu;
  const int e = static_cast<int>(absx >> 23);
  const std::uint32_t mant = absx & 0x7fffffu;

  if (e == 255) return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? 0x200u | (mant >> 13) : 0u));
  if (e >= 143) return static_cast<std::uint16_t>(sign | 0x7c00u);
  if (e >= 113) {
    // Carry out of the mantissa bumps the exponent, up to inf; both are correct encodings.
    const std::uint32_t bits = (static_cast<std::uint32_t>(e - 112) << 23) | mant;
    return static_cast<std::uint16_t>(sign | shift_rne(bits, 13));
  }
  if (e < 102) return sign;  // below half the smallest subnormal
  // Half subnormal: value / 2^-24 = (mant | 1<<23) * 2^(e - 126).
  return static_cast<std::uint16_t>(sign | shift_rne(mant | 0x800000u, 126 - e));
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  const std::uint32_t e = (h >> 10) & 0x1fu;
  const std::uint32_t mant = h & 0x3ffu;
  if (e == 0) {
    const float v = std::ldexp(static_cast<float>(mant), -24);
    return sign ? -v : v;
  }
  if (e == 31) return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
  return std::bit_cast<float>(sign | ((e + 112u) << 23) | (mant << 13));
}

}  // namespace scb::cae
