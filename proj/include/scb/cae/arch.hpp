#pragma once

#include <cstddef>
#include <vector>

namespace scb::cae {

// Shape description of the supervised convolutional autoencoder.
//
// Encoder: for each stage, a same-padded 1-D convolution over time (input
// electrodes are feature maps), batch norm, leaky ReLU and max-pool. The
// pooled feature map is flattened and projected to the latent vector.
// Decoder: dense latent -> last feature map, then per stage (in reverse) a
// nearest-neighbour x2 upsample followed by a same-padded convolution, and a
// final linear interpolation back to the input length.
// Auxiliary head: dense layers over the latent, leaky ReLU between them.
struct ArchDescriptor {
  std::vector<int> conv_filters{32, 64, 128};
  std::vector<int> kernel_sizes{7, 5, 3};
  int pool = 2;
  float leaky_slope = 0.01f;
  int latent_dim = 64;
  std::vector<int> aux_widths{64, 32, 2};
  int in_channels = 12;
  int in_samples = 250;

  bool operator==(const ArchDescriptor&) const = default;

  // Throws InvalidArgument if the shape chain is inconsistent (even kernels,
  // a pooled length reaching zero, aux head not starting at latent_dim or not
  // ending in two classes, ...).
  void validate() const;

  int stages() const { return static_cast<int>(conv_filters.size()); }
  // Temporal length at the input of each encoder stage, plus the final pooled length.
  std::vector<int> encoder_lengths() const;
  int flatten_dim() const;
  // Length produced by the decoder before the final interpolation.
  int decoder_length() const;
  // Channel count entering encoder stage i.
  int stage_in_channels(int i) const { return i == 0 ? in_channels : conv_filters[static_cast<std::size_t>(i) - 1]; }
};

}  // namespace scb::cae
