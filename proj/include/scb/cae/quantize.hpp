#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "scb/cae/params.hpp"

namespace scb::cae {

enum class Precision { Int8, Fp16 };

const char* precision_name(Precision p);
Precision parse_precision(const std::string& s);  // "int8" | "fp16", throws InvalidArgument

// Symmetric per-tensor INT8: q = round(w / scale), scale = max|w| / 127.
struct QTensor {
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> q;
  float scale = 1.0f;

  Mat<float> dequantize() const;
};
QTensor quantize_symmetric(const Mat<float>& w);

// Asymmetric activation quantization from a calibrated range that always contains 0.
struct ActQuant {
  float min = 0.0f, max = 0.0f;  // calibration statistics
  float scale = 1.0f;
  std::int32_t zero_point = 0;

  static ActQuant from_range(float lo, float hi);
  std::int8_t quantize(float v) const;
};

struct QuantizedParams {
  Precision mode = Precision::Int8;
  ArchDescriptor arch;

  // Int8: encoder only, batch norm folded into the convolutions.
  std::vector<QTensor> conv_w;        // per stage
  std::vector<Mat<float>> conv_b;     // folded bias, [out x 1]
  QTensor latent_w;
  Mat<float> latent_b;
  std::vector<ActQuant> act;          // input of each stage, then the flattened feature

  // Fp16: every tensor stored as binary16 bit patterns in the ParamSet layout.
  ParamSet<std::uint16_t> half;
  CaeParams widened;  // float view of `half`, kept in sync by quantize() and the model reader
};

constexpr std::size_t kMinCalibrationWindows = 128;

// Calibration windows are normalised encoder inputs. Int8 needs at least
// kMinCalibrationWindows (CalibrationTooSmall otherwise); fp16 ignores them.
QuantizedParams quantize(const CaeParams& params, const std::vector<Eigen::MatrixXf>& calibration, Precision mode);

// Latent of one normalised window under the quantized model.
Eigen::VectorXf forward_quantized(const QuantizedParams& q, const Eigen::MatrixXf& window);

// Fp16 image widened back to float (exact).
CaeParams widen(const ParamSet<std::uint16_t>& half);

}  // namespace scb::cae
