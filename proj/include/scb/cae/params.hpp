#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "scb/cae/arch.hpp"

namespace scb::cae {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Column-vector tensors (biases, BN vectors) are stored as [n x 1] matrices so
// every tensor can be visited with one signature.
template <typename T>
struct ConvLayer {
  Mat<T> w;  // [out x in*kernel], column index = in_channel * kernel + tap
  Mat<T> b;  // [out x 1], empty for encoder convs (batch norm follows)
};

template <typename T>
struct NormLayer {
  Mat<T> gamma, beta, running_mean, running_var;  // each [channels x 1]
};

template <typename T>
struct DenseLayer {
  Mat<T> w;  // [out x in]
  Mat<T> b;  // [out x 1]
};

enum class TensorRole {
  Weight,   // subject to weight decay
  Bias,
  NormAffine,
  NormStat  // running statistics, not trained by gradient
};

template <typename T>
struct ParamSet {
  ArchDescriptor arch;
  std::uint64_t seed = 0;
  std::vector<ConvLayer<T>> enc;
  std::vector<NormLayer<T>> norm;
  DenseLayer<T> latent;
  DenseLayer<T> dec_dense;
  std::vector<ConvLayer<T>> dec;  // dec[j] maps stage (n-1-j) channels back towards the input
  std::vector<DenseLayer<T>> aux;

  // Visits every tensor in a fixed order with (name, tensor, role). The order
  // and names define the on-disk layout.
  template <typename F>
  void for_each_tensor(F&& fn) {
    visit(*this, fn);
  }
  template <typename F>
  void for_each_tensor(F&& fn) const {
    visit(*this, fn);
  }

  template <typename U>
  ParamSet<U> cast() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& p, F& fn) {
    for (std::size_t i = 0; i < p.enc.size(); ++i) {
      const std::string s = std::to_string(i);
      fn("enc." + s + ".w", p.enc[i].w, TensorRole::Weight);
      fn("norm." + s + ".gamma", p.norm[i].gamma, TensorRole::NormAffine);
      fn("norm." + s + ".beta", p.norm[i].beta, TensorRole::NormAffine);
      fn("norm." + s + ".running_mean", p.norm[i].running_mean, TensorRole::NormStat);
      fn("norm." + s + ".running_var", p.norm[i].running_var, TensorRole::NormStat);
    }
    fn(std::string("latent.w"), p.latent.w, TensorRole::Weight);
    fn(std::string("latent.b"), p.latent.b, TensorRole::Bias);
    fn(std::string("dec.dense.w"), p.dec_dense.w, TensorRole::Weight);
    fn(std::string("dec.dense.b"), p.dec_dense.b, TensorRole::Bias);
    for (std::size_t j = 0; j < p.dec.size(); ++j) {
      const std::string s = std::to_string(j);
      fn("dec." + s + ".w", p.dec[j].w, TensorRole::Weight);
      fn("dec." + s + ".b", p.dec[j].b, TensorRole::Bias);
    }
    for (std::size_t j = 0; j < p.aux.size(); ++j) {
      const std::string s = std::to_string(j);
      fn("aux." + s + ".w", p.aux[j].w, TensorRole::Weight);
      fn("aux." + s + ".b", p.aux[j].b, TensorRole::Bias);
    }
  }
};

using CaeParams = ParamSet<float>;

// Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)); BN gamma=1,
// beta=0, running stats (0, 1); biases zero. Deterministic per seed.
CaeParams init_params(const ArchDescriptor& arch, std::uint64_t seed);

// Same layout with every tensor zero (BN running_var zero too); used as a
// gradient accumulator.
template <typename T>
ParamSet<T> zeros_like(const ParamSet<T>& p);

// Throws NonFinite / InvalidArgument if a tensor is non-finite, a running
// variance is non-positive, or a shape disagrees with the arch.
template <typename T>
void check_params(const ParamSet<T>& p);

std::size_t trainable_count(const CaeParams& p);

template <typename T>
template <typename U>
ParamSet<U> ParamSet<T>::cast() const {
  ParamSet<U> out;
  out.arch = arch;
  out.seed = seed;
  auto conv = [](const ConvLayer<T>& c) { return ConvLayer<U>{c.w.template cast<U>(), c.b.template cast<U>()}; };
  auto dense = [](const DenseLayer<T>& d) { return DenseLayer<U>{d.w.template cast<U>(), d.b.template cast<U>()}; };
  for (const auto& c : enc) out.enc.push_back(conv(c));
  for (const auto& n : norm)
    out.norm.push_back(NormLayer<U>{n.gamma.template cast<U>(), n.beta.template cast<U>(),
                                    n.running_mean.template cast<U>(), n.running_var.template cast<U>()});
  out.latent = dense(latent);
  out.dec_dense = dense(dec_dense);
  for (const auto& c : dec) out.dec.push_back(conv(c));
  for (const auto& d : aux) out.aux.push_back(dense(d));
  return out;
}

}  // namespace scb::cae
