#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scb/cae/params.hpp"
#include "scb/cae/quantize.hpp"

namespace scb::cae {

// "SCBM" container. Layout (all little-endian):
//   magic "SCBM" | u16 version | arch | u32 tensor count | tensors
//   arch   = list(conv_filters) list(kernel_sizes) i32 pool f32 leaky_slope
//            i32 latent_dim list(aux_widths) i32 in_channels i32 in_samples,
//            list = u32 n then n x i32
//   tensor = u16 name length, name bytes, u8 dtype, u8 rank, rank x u32 dims,
//            u8 has_quant [f32 scale, i32 zero_point], payload (row-major)
enum class DType : std::uint8_t { F32 = 0, F16 = 1, I8 = 2, F64 = 3 };

constexpr std::uint16_t kModelVersion = 1;

std::size_t dtype_size(DType d);

struct NamedTensor {
  std::string name;
  DType dtype = DType::F32;
  std::vector<std::uint32_t> shape;
  std::vector<std::uint8_t> payload;
  bool has_quant = false;
  float scale = 1.0f;
  std::int32_t zero_point = 0;

  std::size_t elements() const;

  static NamedTensor from_f32(std::string name, const Mat<float>& m);
  static NamedTensor from_f16(std::string name, const Mat<std::uint16_t>& m);
  static NamedTensor from_i8(std::string name, const Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>& m,
                             float scale, std::int32_t zero_point);
  static NamedTensor from_f64(std::string name, const std::vector<double>& v);

  // Rank-2 (rank-1 read as a column) views; throw InvalidArgument on dtype mismatch.
  Mat<float> to_f32() const;
  Mat<std::uint16_t> to_f16() const;
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> to_i8() const;
  std::vector<double> to_f64() const;
};

struct ModelFile {
  ArchDescriptor arch;
  std::vector<NamedTensor> tensors;

  const NamedTensor* find(const std::string& name) const;
  const NamedTensor& at(const std::string& name) const;  // throws InvalidArgument
};

std::vector<std::uint8_t> serialize(const ModelFile& m);
// Throws BadMagic, TruncatedPayload, InvalidArgument (unknown version/dtype).
ModelFile parse(std::span<const std::uint8_t> bytes);

void write_model_file(const std::filesystem::path& path, const ModelFile& m);  // throws Io
ModelFile read_model_file(const std::filesystem::path& path);

// Float parameters as f32 tensors named as in ParamSet::for_each_tensor.
void append_params(ModelFile& m, const CaeParams& p);
CaeParams params_from(const ModelFile& m);
bool has_float_params(const ModelFile& m);

// Quantized tensors carry an "int8." or "fp16." prefix so they can sit next to
// the float parameters in one file.
void append_quantized(ModelFile& m, const QuantizedParams& q);
std::optional<QuantizedParams> quantized_from(const ModelFile& m);

}  // namespace scb::cae
