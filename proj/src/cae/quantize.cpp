#include "scb/cae/quantize.hpp"

#include <algorithm>
#include <cmath>

#include "ops.hpp"
#include "scb/cae/half.hpp"
#include "scb/cae/network.hpp"
#include "scb/common/error.hpp"

namespace scb::cae {

namespace {

using detail::RowMat;

struct Folded {
  std::vector<Mat<float>> w, b;
};

Folded fold_norm(const CaeParams& p) {
  Folded f;
  for (std::size_t i = 0; i < p.enc.size(); ++i) {
    const NormLayer<float>& n = p.norm[i];
    const Eigen::VectorXf g =
        (n.gamma.col(0).array() * (n.running_var.col(0).array() + static_cast<float>(kNormEps)).rsqrt()).matrix();
    f.w.push_back(g.asDiagonal() * p.enc[i].w);
    f.b.push_back((n.beta.col(0).array() - g.array() * n.running_mean.col(0).array()).matrix());
  }
  return f;
}

RowMat<float> leaky_pool(const RowMat<float>& u, float slope, int pool) {
  const Eigen::Index out_len = u.cols() / pool;
  RowMat<float> out(u.rows(), out_len);
  for (Eigen::Index c = 0; c < u.rows(); ++c)
    for (Eigen::Index t = 0; t < out_len; ++t) {
      float best = -std::numeric_limits<float>::infinity();
      for (int q = 0; q < pool; ++q) {
        const float v = u(c, t * pool + q);
        best = std::max(best, v > 0.0f ? v : v * slope);
      }
      out(c, t) = best;
    }
  return out;
}

Eigen::VectorXf flatten_one(const RowMat<float>& a) {
  Eigen::VectorXf v(a.size());
  for (Eigen::Index c = 0; c < a.rows(); ++c)
    for (Eigen::Index t = 0; t < a.cols(); ++t) v(c * a.cols() + t) = a(c, t);
  return v;
}

// Folded float encoder used for calibration; records the value range at
// every quantization point.
void calibrate_one(const CaeParams& p, const Folded& f, const Eigen::MatrixXf& window, std::vector<float>& lo,
                   std::vector<float>& hi) {
  const ArchDescriptor& arch = p.arch;
  const std::vector<int> lens = arch.encoder_lengths();
  RowMat<float> a = window;
  for (int i = 0; i < arch.stages(); ++i) {
    lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], a.minCoeff());
    hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], a.maxCoeff());
    const RowMat<float> cols = detail::im2col<float>(a, 1, lens[static_cast<std::size_t>(i)], arch.kernel_sizes[static_cast<std::size_t>(i)]);
    RowMat<float> u = f.w[static_cast<std::size_t>(i)] * cols;
    u.colwise() += f.b[static_cast<std::size_t>(i)].col(0);
    a = leaky_pool(u, arch.leaky_slope, arch.pool);
  }
  const std::size_t last = static_cast<std::size_t>(arch.stages());
  lo[last] = std::min(lo[last], a.minCoeff());
  hi[last] = std::max(hi[last], a.maxCoeff());
}

template <typename Derived>
RowMat<std::int32_t> quantize_act(const Eigen::MatrixBase<Derived>& a, const ActQuant& aq) {
  RowMat<std::int32_t> q(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) q(r, c) = static_cast<std::int32_t>(aq.quantize(a(r, c))) - aq.zero_point;
  return q;
}

}  // namespace

const char* precision_name(Precision p) { return p == Precision::Int8 ? "int8" : "fp16"; }

Precision parse_precision(const std::string& s) {
  if (s == "int8") return Precision::Int8;
  if (s == "fp16") return Precision::Fp16;
  throw Error(Errc::InvalidArgument, "unknown precision '" + s + "' (expected int8 or fp16)");
}

Mat<float> QTensor::dequantize() const { return q.cast<float>() * scale; }

QTensor quantize_symmetric(const Mat<float>& w) {
  QTensor t;
  const float m = w.size() ? w.cwiseAbs().maxCoeff() : 0.0f;
  t.scale = m > 0.0f ? m / 127.0f : 1.0f;
  t.q.resize(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    t.q.data()[i] = static_cast<std::int8_t>(std::clamp(std::nearbyint(w.data()[i] / t.scale), -127.0f, 127.0f));
  return t;
}

ActQuant ActQuant::from_range(float lo, float hi) {
  ActQuant a;
  a.min = lo;
  a.max = hi;
  const float l = std::min(lo, 0.0f), h = std::max(hi, 0.0f);
  a.scale = h > l ? (h - l) / 255.0f : 1.0f;
  a.zero_point = static_cast<std::int32_t>(std::clamp(std::nearbyint(-128.0f - l / a.scale), -128.0f, 127.0f));
  return a;
}

std::int8_t ActQuant::quantize(float v) const {
  const float q = std::nearbyint(v / scale) + static_cast<float>(zero_point);
  return static_cast<std::int8_t>(std::clamp(q, -128.0f, 127.0f));
}

QuantizedParams quantize(const CaeParams& params, const std::vector<Eigen::MatrixXf>& calibration, Precision mode) {
  check_params(params);
  QuantizedParams out;
  out.mode = mode;
  out.arch = params.arch;

  if (mode == Precision::Fp16) {
    // Take the layout from a cast, then overwrite every entry with its binary16 pattern.
    ParamSet<std::uint16_t> h = params.cast<std::uint16_t>();
    std::vector<const Mat<float>*> src;
    params.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) { src.push_back(&m); });
    std::size_t i = 0;
    h.for_each_tensor([&](const std::string&, Mat<std::uint16_t>& m, TensorRole) {
      for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = float_to_half(src[i]->data()[k]);
      ++i;
    });
    out.half = std::move(h);
    out.widened = widen(out.half);
    return out;
  }

  if (calibration.size() < kMinCalibrationWindows)
    throw Error(Errc::CalibrationTooSmall, "int8 calibration needs at least " + std::to_string(kMinCalibrationWindows) +
                                               " windows, got " + std::to_string(calibration.size()));
  const Folded f = fold_norm(params);
  const std::size_t points = params.enc.size() + 1;
  std::vector<float> lo(points, std::numeric_limits<float>::infinity()), hi(points, -std::numeric_limits<float>::infinity());
  for (const auto& w : calibration) {
    if (w.rows() != params.arch.in_channels || w.cols() != params.arch.in_samples)
      throw Error(Errc::InvalidArgument, "calibration window shape does not match the architecture");
    calibrate_one(params, f, w, lo, hi);
  }
  for (std::size_t i = 0; i < points; ++i) out.act.push_back(ActQuant::from_range(lo[i], hi[i]));
  for (std::size_t i = 0; i < params.enc.size(); ++i) {
    out.conv_w.push_back(quantize_symmetric(f.w[i]));
    out.conv_b.push_back(f.b[i]);
  }
  out.latent_w = quantize_symmetric(params.latent.w);
  out.latent_b = params.latent.b;
  return out;
}

Eigen::VectorXf forward_quantized(const QuantizedParams& q, const Eigen::MatrixXf& window) {
  const ArchDescriptor& arch = q.arch;
  if (window.rows() != arch.in_channels || window.cols() != arch.in_samples)
    throw Error(Errc::InvalidArgument, "window shape does not match the architecture");

  if (q.mode == Precision::Fp16) {
    Eigen::MatrixXf x = window;
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = round_to_half(x.data()[i]);
    return encode<float>(q.widened, x);
  }

  const std::vector<int> lens = arch.encoder_lengths();
  RowMat<float> a = window;
  for (int i = 0; i < arch.stages(); ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const RowMat<std::int32_t> qa = quantize_act(a, q.act[si]);
    const RowMat<std::int32_t> cols = detail::im2col<std::int32_t>(qa, 1, lens[si], arch.kernel_sizes[si]);
    const RowMat<std::int32_t> acc = q.conv_w[si].q.cast<std::int32_t>() * cols;
    RowMat<float> u = acc.cast<float>() * (q.conv_w[si].scale * q.act[si].scale);
    u.colwise() += q.conv_b[si].col(0);
    a = leaky_pool(u, arch.leaky_slope, arch.pool);
  }
  const Eigen::VectorXf flat = flatten_one(a);
  const ActQuant& aq = q.act.back();
  const RowMat<std::int32_t> qf = quantize_act(flat, aq);
  const Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1> acc = q.latent_w.q.cast<std::int32_t>() * qf;
  return (acc.cast<float>() * (q.latent_w.scale * aq.scale) + q.latent_b.col(0)).eval();
}

CaeParams widen(const ParamSet<std::uint16_t>& half) {
  CaeParams p = half.cast<float>();
  std::vector<const Mat<std::uint16_t>*> src;
  half.for_each_tensor([&](const std::string&, const Mat<std::uint16_t>& m, TensorRole) { src.push_back(&m); });
  std::size_t i = 0;
  p.for_each_tensor([&](const std::string&, Mat<float>& m, TensorRole) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = half_to_float(src[i]->data()[k]);
    ++i;
  });
  return p;
}

}  // namespace scb::cae
