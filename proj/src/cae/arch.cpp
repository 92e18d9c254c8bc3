#include "scb/cae/arch.hpp"

#include <string>

#include "scb/common/error.hpp"

namespace scb::cae {

void ArchDescriptor::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidArgument, "architecture: " + why); };
  if (conv_filters.empty()) fail("no convolution stages");
  if (conv_filters.size() != kernel_sizes.size()) fail("filter and kernel lists differ in length");
  for (int f : conv_filters)
    if (f < 1) fail("filter count must be positive");
  for (int k : kernel_sizes)
    if (k < 1 || k % 2 == 0) fail("kernel sizes must be odd");
  if (pool < 2) fail("pool factor must be >= 2");
  if (!(leaky_slope >= 0.0f && leaky_slope < 1.0f)) fail("leaky slope must be in [0, 1)");
  if (latent_dim < 1) fail("latent_dim must be positive");
  if (in_channels < 1 || in_samples < 1) fail("input shape must be positive");
  int len = in_samples;
  for (std::size_t i = 0; i < conv_filters.size(); ++i) {
    len /= pool;
    if (len < 1) fail("pooled length reaches zero");
  }
  if (aux_widths.size() < 2) fail("aux head needs at least input and output widths");
  if (aux_widths.front() != latent_dim) fail("aux head must start at latent_dim");
  if (aux_widths.back() != 2) fail("aux head must end in two classes");
  for (int w : aux_widths)
    if (w < 1) fail("aux widths must be positive");
  if (decoder_length() > in_samples) fail("decoder overshoots the input length");
}

std::vector<int> ArchDescriptor::encoder_lengths() const {
  std::vector<int> out{in_samples};
  for (std::size_t i = 0; i < conv_filters.size(); ++i) out.push_back(out.back() / pool);
  return out;
}

int ArchDescriptor::flatten_dim() const { return conv_filters.back() * encoder_lengths().back(); }

int ArchDescriptor::decoder_length() const {
  int len = encoder_lengths().back();
  for (std::size_t i = 0; i < conv_filters.size(); ++i) len *= pool;
  return len;
}

}  // namespace scb::cae
