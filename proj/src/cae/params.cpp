#include "scb/cae/params.hpp"

#include <cmath>
#include <random>

#include "scb/common/error.hpp"

namespace scb::cae {

namespace {

Mat<float> uniform(std::mt19937_64& rng, int rows, int cols, int fan_in) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
  std::uniform_real_distribution<float> ud(-bound, bound);
  Mat<float> m(rows, cols);
  // Fill row-major so the draw order does not depend on storage order.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = ud(rng);
  return m;
}

}  // namespace

CaeParams init_params(const ArchDescriptor& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  CaeParams p;
  p.arch = arch;
  p.seed = seed;
  const int n = arch.stages();

  for (int i = 0; i < n; ++i) {
    const int cin = arch.stage_in_channels(i), cout = arch.conv_filters[i], k = arch.kernel_sizes[i];
    p.enc.push_back({uniform(rng, cout, cin * k, cin * k), Mat<float>()});
    p.norm.push_back({Mat<float>::Ones(cout, 1), Mat<float>::Zero(cout, 1), Mat<float>::Zero(cout, 1),
                      Mat<float>::Ones(cout, 1)});
  }
  const int flat = arch.flatten_dim();
  p.latent = {uniform(rng, arch.latent_dim, flat, flat), Mat<float>::Zero(arch.latent_dim, 1)};
  p.dec_dense = {uniform(rng, flat, arch.latent_dim, arch.latent_dim), Mat<float>::Zero(flat, 1)};
  for (int j = 0; j < n; ++j) {
    const int stage = n - 1 - j;
    const int cin = arch.conv_filters[stage];
    const int cout = stage == 0 ? arch.in_channels : arch.conv_filters[stage - 1];
    const int k = arch.kernel_sizes[stage];
    p.dec.push_back({uniform(rng, cout, cin * k, cin * k), Mat<float>::Zero(cout, 1)});
  }
  for (std::size_t j = 0; j + 1 < arch.aux_widths.size(); ++j) {
    const int in = arch.aux_widths[j], out = arch.aux_widths[j + 1];
    p.aux.push_back({uniform(rng, out, in, in), Mat<float>::Zero(out, 1)});
  }
  return p;
}

template <typename T>
ParamSet<T> zeros_like(const ParamSet<T>& p) {
  ParamSet<T> z = p;
  z.for_each_tensor([](const std::string&, Mat<T>& m, TensorRole) { m.setZero(); });
  return z;
}

template <typename T>
void check_params(const ParamSet<T>& p) {
  p.arch.validate();
  const CaeParams ref = init_params(p.arch, 0);  // reference layout
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  ref.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole) { shapes.emplace_back(m.rows(), m.cols()); });
  std::size_t i = 0;
  p.for_each_tensor([&](const std::string& name, const Mat<T>& m, TensorRole role) {
    if (i >= shapes.size() || shapes[i] != std::make_pair(m.rows(), m.cols()))
      throw Error(Errc::InvalidArgument, "tensor " + name + " has the wrong shape");
    if (!m.allFinite()) throw Error(Errc::NonFinite, "tensor " + name + " is not finite");
    if (role == TensorRole::NormStat && name.ends_with("running_var") && (m.array() <= T(0)).any())
      throw Error(Errc::InvalidArgument, "tensor " + name + " has a non-positive variance");
    ++i;
  });
  if (i != shapes.size()) throw Error(Errc::InvalidArgument, "tensor count does not match the arch");
}

std::size_t trainable_count(const CaeParams& p) {
  std::size_t n = 0;
  p.for_each_tensor([&](const std::string&, const Mat<float>& m, TensorRole role) {
    if (role != TensorRole::NormStat) n += static_cast<std::size_t>(m.size());
  });
  return n;
}

template ParamSet<float> zeros_like(const ParamSet<float>&);
template ParamSet<double> zeros_like(const ParamSet<double>&);
template void check_params(const ParamSet<float>&);
template void check_params(const ParamSet<double>&);

}  // namespace scb::cae
