#include "scb/cae/network.hpp"

#include <algorithm>
#include <cmath>

#include "scb/common/error.hpp"
#include "ops.hpp"

namespace scb::cae {

namespace {

template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using Index = Eigen::Index;
using ArgMat = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
struct Tape {
  struct Enc {
    int len = 0;  // input length of the stage
    Act<T> cols;
    Act<T> xhat;
    Vec<T> inv_std;
    Act<T> normed;  // BN output, pre-activation
    ArgMat arg;
  };
  struct Dec {
    int len = 0;  // length after upsampling
    Act<T> cols;
    Act<T> pre;
  };
  std::vector<Enc> enc;
  std::vector<Dec> dec;
  Mat<T> flat, mask, zd;
  std::vector<Mat<T>> aux_in, aux_pre;
  std::vector<Mat<T>> mean, var;
};

template <typename T>
Act<T> col2im(const Act<T>& dcols, Index cin, int batch, int len, int k) {
  const Index pad = k / 2;
  Act<T> dx = Act<T>::Zero(cin, static_cast<Index>(batch) * len);
  for (Index ci = 0; ci < cin; ++ci) {
    for (int tap = 0; tap < k; ++tap) {
      const Index shift = tap - pad;
      const Index lo = std::max<Index>(0, -shift), hi = std::min<Index>(len, len - shift);
      for (int b = 0; b < batch; ++b) {
        T* dst = dx.data() + ci * dx.cols() + static_cast<Index>(b) * len;
        const T* src = dcols.data() + (ci * k + tap) * dcols.cols() + static_cast<Index>(b) * len;
        for (Index t = lo; t < hi; ++t) dst[t + shift] += src[t];
      }
    }
  }
  return dx;
}

template <typename Derived, typename T>
auto leaky(const Eigen::MatrixBase<Derived>& v, T slope) {
  return (v.array() > T(0)).select(v.array(), v.array() * slope).matrix();
}

// d/dv leaky(v) applied to an upstream gradient.
template <typename D1, typename D2, typename T>
auto leaky_back(const Eigen::MatrixBase<D1>& grad, const Eigen::MatrixBase<D2>& pre, T slope) {
  return (pre.array() > T(0)).select(grad.array(), grad.array() * slope).matrix();
}

template <typename T>
Act<T> max_pool(const Act<T>& a, int batch, int len, int pool, ArgMat* arg) {
  const int out_len = len / pool;
  Act<T> out(a.rows(), static_cast<Index>(batch) * out_len);
  if (arg) arg->resize(out.rows(), out.cols());
  for (Index c = 0; c < a.rows(); ++c) {
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < out_len; ++t) {
        Index best = static_cast<Index>(b) * len + static_cast<Index>(t) * pool;
        for (int q = 1; q < pool; ++q) {
          const Index j = static_cast<Index>(b) * len + static_cast<Index>(t) * pool + q;
          if (a(c, j) > a(c, best)) best = j;
        }
        const Index o = static_cast<Index>(b) * out_len + t;
        out(c, o) = a(c, best);
        if (arg) (*arg)(c, o) = best;
      }
    }
  }
  return out;
}

template <typename T>
Act<T> max_pool_back(const Act<T>& dout, const ArgMat& arg, Index in_cols) {
  Act<T> din = Act<T>::Zero(dout.rows(), in_cols);
  for (Index c = 0; c < dout.rows(); ++c)
    for (Index o = 0; o < dout.cols(); ++o) din(c, arg(c, o)) += dout(c, o);
  return din;
}

template <typename T>
Act<T> upsample(const Act<T>& x, int batch, int len, int factor) {
  Act<T> out(x.rows(), static_cast<Index>(batch) * len * factor);
  for (Index c = 0; c < x.rows(); ++c)
    for (Index j = 0; j < out.cols(); ++j) {
      const Index b = j / (static_cast<Index>(len) * factor), t = j % (static_cast<Index>(len) * factor);
      out(c, j) = x(c, b * len + t / factor);
    }
  return out;
}

template <typename T>
Act<T> upsample_back(const Act<T>& dout, int batch, int len, int factor) {
  Act<T> din = Act<T>::Zero(dout.rows(), static_cast<Index>(batch) * len);
  for (Index c = 0; c < dout.rows(); ++c)
    for (Index j = 0; j < dout.cols(); ++j) {
      const Index b = j / (static_cast<Index>(len) * factor), t = j % (static_cast<Index>(len) * factor);
      din(c, b * len + t / factor) += dout(c, j);
    }
  return din;
}

// Linear interpolation from `from` to `to` samples with both end points aligned.
struct Interp {
  std::vector<Index> j0, j1;
  std::vector<double> frac;
  Interp(int from, int to) {
    for (int i = 0; i < to; ++i) {
      const double s = to == 1 ? 0.0 : static_cast<double>(i) * (from - 1) / (to - 1);
      Index j = static_cast<Index>(std::floor(s));
      j = std::clamp<Index>(j, 0, from - 1);
      j0.push_back(j);
      j1.push_back(std::min<Index>(j + 1, from - 1));
      frac.push_back(s - static_cast<double>(j));
    }
  }
};

template <typename T>
Act<T> interp_forward(const Act<T>& x, int batch, int from, int to) {
  const Interp ip(from, to);
  Act<T> out(x.rows(), static_cast<Index>(batch) * to);
  for (Index c = 0; c < x.rows(); ++c)
    for (int b = 0; b < batch; ++b)
      for (int i = 0; i < to; ++i) {
        const T f = static_cast<T>(ip.frac[i]);
        const Index base = static_cast<Index>(b) * from;
        out(c, static_cast<Index>(b) * to + i) = (T(1) - f) * x(c, base + ip.j0[i]) + f * x(c, base + ip.j1[i]);
      }
  return out;
}

template <typename T>
Act<T> interp_back(const Act<T>& dout, int batch, int from, int to) {
  const Interp ip(from, to);
  Act<T> din = Act<T>::Zero(dout.rows(), static_cast<Index>(batch) * from);
  for (Index c = 0; c < dout.rows(); ++c)
    for (int b = 0; b < batch; ++b)
      for (int i = 0; i < to; ++i) {
        const T f = static_cast<T>(ip.frac[i]);
        const T g = dout(c, static_cast<Index>(b) * to + i);
        const Index base = static_cast<Index>(b) * from;
        din(c, base + ip.j0[i]) += (T(1) - f) * g;
        din(c, base + ip.j1[i]) += f * g;
      }
  return din;
}

// [C x batch*len] -> [C*len x batch], feature index c*len + t.
template <typename T>
Mat<T> flatten(const Act<T>& p, int batch, int len) {
  Mat<T> out(p.rows() * len, batch);
  for (Index c = 0; c < p.rows(); ++c)
    for (int b = 0; b < batch; ++b)
      for (int t = 0; t < len; ++t) out(c * len + t, b) = p(c, static_cast<Index>(b) * len + t);
  return out;
}

template <typename T>
Act<T> unflatten(const Mat<T>& f, Index channels, int batch, int len) {
  Act<T> out(channels, static_cast<Index>(batch) * len);
  for (Index c = 0; c < channels; ++c)
    for (int b = 0; b < batch; ++b)
      for (int t = 0; t < len; ++t) out(c, static_cast<Index>(b) * len + t) = f(c * len + t, b);
  return out;
}

template <typename T>
Mat<T> run_encoder(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode, Tape<T>* tape) {
  const ArchDescriptor& arch = p.arch;
  const T slope = static_cast<T>(arch.leaky_slope);
  const std::vector<int> lens = arch.encoder_lengths();
  Act<T> a = x;
  for (int i = 0; i < arch.stages(); ++i) {
    const int len = lens[static_cast<std::size_t>(i)], k = arch.kernel_sizes[static_cast<std::size_t>(i)];
    Act<T> cols = detail::im2col<T>(a, batch, len, k);
    Act<T> u = p.enc[static_cast<std::size_t>(i)].w * cols;
    const NormLayer<T>& nl = p.norm[static_cast<std::size_t>(i)];

    Vec<T> mean, inv_std;
    if (mode == Mode::Train) {
      const T n = static_cast<T>(u.cols());
      mean = u.rowwise().sum() / n;
      u.colwise() -= mean;
      const Vec<T> var = u.array().square().rowwise().sum().matrix() / n;
      inv_std = (var.array() + T(kNormEps)).rsqrt().matrix();
      if (tape) {
        tape->mean.push_back(mean);
        tape->var.push_back(var * (n / (n - T(1))));
      }
    } else {
      mean = nl.running_mean.col(0);
      u.colwise() -= mean;
      inv_std = (nl.running_var.col(0).array() + T(kNormEps)).rsqrt().matrix();
    }
    Act<T> xhat = inv_std.asDiagonal() * u;
    Act<T> normed = (nl.gamma.col(0).asDiagonal() * xhat).colwise() + nl.beta.col(0);
    Act<T> act = leaky(normed, slope);
    typename Tape<T>::Enc rec;
    a = max_pool(act, batch, len, arch.pool, tape ? &rec.arg : nullptr);
    if (tape) {
      rec.len = len;
      rec.cols = std::move(cols);
      rec.xhat = std::move(xhat);
      rec.inv_std = std::move(inv_std);
      rec.normed = std::move(normed);
      tape->enc.push_back(std::move(rec));
    }
  }
  Mat<T> flat = flatten(a, batch, lens.back());
  Mat<T> z = (p.latent.w * flat).colwise() + p.latent.b.col(0);
  if (tape) tape->flat = std::move(flat);
  return z;
}

template <typename T>
ForwardResult<T> run_forward(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode, std::mt19937_64* rng,
                             double dropout, Tape<T>* tape) {
  const ArchDescriptor& arch = p.arch;
  if (x.rows() != arch.in_channels || x.cols() != static_cast<Index>(batch) * arch.in_samples)
    throw Error(Errc::InvalidArgument, "input shape does not match the architecture");
  if (batch < 1) throw Error(Errc::InvalidArgument, "empty batch");
  if (mode == Mode::Train && batch < 2) throw Error(Errc::InvalidArgument, "train mode needs a batch of at least 2");
  if (!x.allFinite()) throw Error(Errc::NonFinite, "input contains NaN/Inf");
  const T slope = static_cast<T>(arch.leaky_slope);

  ForwardResult<T> out;
  out.latent = run_encoder(p, x, batch, mode, tape);

  Mat<T> zd = out.latent;
  if (mode == Mode::Train && dropout > 0.0) {
    if (!rng) throw Error(Errc::InvalidArgument, "dropout needs an rng");
    std::bernoulli_distribution keep(1.0 - dropout);
    const T scale = static_cast<T>(1.0 / (1.0 - dropout));
    Mat<T> mask(zd.rows(), zd.cols());
    for (Index b = 0; b < mask.cols(); ++b)
      for (Index r = 0; r < mask.rows(); ++r) mask(r, b) = keep(*rng) ? scale : T(0);
    zd = zd.cwiseProduct(mask);
    if (tape) tape->mask = std::move(mask);
  }

  // Decoder.
  const std::vector<int> lens = arch.encoder_lengths();
  int len = lens.back();
  Mat<T> h0 = (p.dec_dense.w * zd).colwise() + p.dec_dense.b.col(0);
  Act<T> d = unflatten(h0, arch.conv_filters.back(), batch, len);
  const int n = arch.stages();
  for (int j = 0; j < n; ++j) {
    const int k = arch.kernel_sizes[static_cast<std::size_t>(n - 1 - j)];
    Act<T> up = upsample(d, batch, len, arch.pool);
    len *= arch.pool;
    Act<T> cols = detail::im2col<T>(up, batch, len, k);
    Act<T> pre = (p.dec[static_cast<std::size_t>(j)].w * cols).colwise() + p.dec[static_cast<std::size_t>(j)].b.col(0);
    d = j + 1 < n ? Act<T>(leaky(pre, slope)) : pre;
    if (tape) tape->dec.push_back({len, std::move(cols), std::move(pre)});
  }
  out.recon = interp_forward(d, batch, len, arch.in_samples);

  // Auxiliary head.
  Mat<T> a = zd;
  for (std::size_t j = 0; j < p.aux.size(); ++j) {
    Mat<T> h = (p.aux[j].w * a).colwise() + p.aux[j].b.col(0);
    if (tape) tape->aux_in.push_back(a);
    if (j + 1 < p.aux.size()) {
      a = leaky(h, slope);
      if (tape) tape->aux_pre.push_back(std::move(h));
    } else {
      out.logits = std::move(h);
    }
  }
  if (tape) tape->zd = std::move(zd);

  if (!out.latent.allFinite() || !out.recon.allFinite() || !out.logits.allFinite())
    throw Error(Errc::NonFinite, "activation overflow in forward pass");
  return out;
}

template <typename T>
Mat<T> softmax_cols(const Mat<T>& logits) {
  Mat<T> s(logits.rows(), logits.cols());
  for (Index b = 0; b < logits.cols(); ++b) {
    const T m = logits.col(b).maxCoeff();
    const auto e = (logits.col(b).array() - m).exp();
    s.col(b) = (e / e.sum()).matrix();
  }
  return s;
}

}  // namespace

template <typename T>
Act<T> pack_windows(const std::vector<Eigen::MatrixXf>& windows, const std::vector<std::size_t>& index) {
  if (index.empty()) throw Error(Errc::EmptyInput, "no windows to pack");
  const Index c = windows[index.front()].rows(), l = windows[index.front()].cols();
  Act<T> x(c, l * static_cast<Index>(index.size()));
  for (std::size_t b = 0; b < index.size(); ++b) {
    const Eigen::MatrixXf& w = windows[index[b]];
    if (w.rows() != c || w.cols() != l) throw Error(Errc::InvalidArgument, "windows differ in shape");
    x.block(0, static_cast<Index>(b) * l, c, l) = w.cast<T>();
  }
  return x;
}

template <typename T>
Act<T> pack_windows(const std::vector<Eigen::MatrixXf>& windows) {
  std::vector<std::size_t> idx(windows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return pack_windows<T>(windows, idx);
}

template <typename T>
ForwardResult<T> forward(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode, std::mt19937_64* rng,
                         double dropout) {
  return run_forward<T>(p, x, batch, mode, rng, dropout, nullptr);
}

template <typename T>
LossParts loss(const Act<T>& recon, const Act<T>& target, const Mat<T>& logits, const std::vector<int>& labels,
               double lambda) {
  if (recon.rows() != target.rows() || recon.cols() != target.cols())
    throw Error(Errc::InvalidArgument, "reconstruction and target differ in shape");
  if (logits.cols() != static_cast<Index>(labels.size()))
    throw Error(Errc::InvalidArgument, "one label per window required");
  LossParts out;
  out.recon_mse = (recon.template cast<double>() - target.template cast<double>()).squaredNorm() /
                  static_cast<double>(recon.size());
  double ce = 0.0;
  for (Index b = 0; b < logits.cols(); ++b) {
    const int y = labels[static_cast<std::size_t>(b)];
    if (y < 0 || y >= logits.rows()) throw Error(Errc::InvalidArgument, "label out of range");
    const Eigen::VectorXd l = logits.col(b).template cast<double>();
    const double m = l.maxCoeff();
    const double lse = m + std::log((l.array() - m).exp().sum());
    ce += lse - l(y);
  }
  out.class_ce = logits.cols() > 0 ? ce / static_cast<double>(logits.cols()) : 0.0;
  out.total = out.recon_mse + lambda * out.class_ce;
  return out;
}

template <typename T>
GradResult<T> grad(const ParamSet<T>& p, const Act<T>& x, const Act<T>& target, const std::vector<int>& labels,
                   const GradOptions& opt, std::mt19937_64* rng) {
  const ArchDescriptor& arch = p.arch;
  const int batch = static_cast<int>(labels.size());
  const T slope = static_cast<T>(arch.leaky_slope);
  const int n = arch.stages();

  Tape<T> tape;
  const ForwardResult<T> fw = run_forward<T>(p, x, batch, Mode::Train, rng, opt.dropout, &tape);

  GradResult<T> res;
  res.loss = loss<T>(fw.recon, target, fw.logits, labels, opt.lambda);
  res.grad = zeros_like(p);
  ParamSet<T>& g = res.grad;

  // Reconstruction branch.
  Act<T> dd = (fw.recon - target) * static_cast<T>(2.0 / static_cast<double>(fw.recon.size()));
  dd = interp_back(dd, batch, tape.dec.back().len, arch.in_samples);
  for (int j = n - 1; j >= 0; --j) {
    const auto& rec = tape.dec[static_cast<std::size_t>(j)];
    const ConvLayer<T>& layer = p.dec[static_cast<std::size_t>(j)];
    const int k = arch.kernel_sizes[static_cast<std::size_t>(n - 1 - j)];
    Act<T> dpre = j + 1 < n ? Act<T>(leaky_back(dd, rec.pre, slope)) : dd;
    g.dec[static_cast<std::size_t>(j)].w = dpre * rec.cols.transpose();
    g.dec[static_cast<std::size_t>(j)].b = dpre.rowwise().sum();
    const Act<T> dcols = layer.w.transpose() * dpre;
    const Act<T> dup = col2im(dcols, layer.w.cols() / k, batch, rec.len, k);
    dd = upsample_back(dup, batch, rec.len / arch.pool, arch.pool);
  }
  const int last_len = arch.encoder_lengths().back();
  const Mat<T> dh0 = flatten(dd, batch, last_len);
  g.dec_dense.w = dh0 * tape.zd.transpose();
  g.dec_dense.b = dh0.rowwise().sum();
  Mat<T> dzd = p.dec_dense.w.transpose() * dh0;

  // Auxiliary head.
  Mat<T> dh = softmax_cols(fw.logits);
  for (int b = 0; b < batch; ++b) dh(labels[static_cast<std::size_t>(b)], b) -= T(1);
  dh *= static_cast<T>(opt.lambda / batch);
  for (std::size_t jj = p.aux.size(); jj-- > 0;) {
    g.aux[jj].w = dh * tape.aux_in[jj].transpose();
    g.aux[jj].b = dh.rowwise().sum();
    Mat<T> da = p.aux[jj].w.transpose() * dh;
    if (jj > 0)
      dh = leaky_back(da, tape.aux_pre[jj - 1], slope);
    else
      dzd += da;
  }

  // Latent and encoder.
  const Mat<T> dz = tape.mask.size() > 0 ? Mat<T>(dzd.cwiseProduct(tape.mask)) : dzd;
  g.latent.w = dz * tape.flat.transpose();
  g.latent.b = dz.rowwise().sum();
  const Mat<T> dflat = p.latent.w.transpose() * dz;
  Act<T> dp = unflatten(dflat, arch.conv_filters.back(), batch, last_len);
  for (int i = n - 1; i >= 0; --i) {
    const auto& rec = tape.enc[static_cast<std::size_t>(i)];
    const NormLayer<T>& nl = p.norm[static_cast<std::size_t>(i)];
    const Act<T> da = max_pool_back(dp, rec.arg, static_cast<Index>(batch) * rec.len);
    const Act<T> dnormed = leaky_back(da, rec.normed, slope);

    const Vec<T> dbeta = dnormed.rowwise().sum();
    const Vec<T> dgamma = dnormed.cwiseProduct(rec.xhat).rowwise().sum();
    g.norm[static_cast<std::size_t>(i)].gamma = dgamma;
    g.norm[static_cast<std::size_t>(i)].beta = dbeta;
    const T cnt = static_cast<T>(rec.xhat.cols());
    const Vec<T> gam = nl.gamma.col(0);
    // dU = inv_std / N * (N dxhat - sum(dxhat) - xhat * sum(dxhat * xhat)), dxhat = gamma * dnormed
    Act<T> du = (gam.asDiagonal() * dnormed) * cnt;
    du.colwise() -= gam.cwiseProduct(dbeta);
    du -= (gam.cwiseProduct(dgamma)).asDiagonal() * rec.xhat;
    du = (rec.inv_std / cnt).asDiagonal() * du;

    const int k = arch.kernel_sizes[static_cast<std::size_t>(i)];
    g.enc[static_cast<std::size_t>(i)].w = du * rec.cols.transpose();
    if (i > 0) {
      const Act<T> dcols = p.enc[static_cast<std::size_t>(i)].w.transpose() * du;
      dp = col2im(dcols, arch.stage_in_channels(i), batch, rec.len, k);
    }
  }

  const T wd = static_cast<T>(opt.weight_decay);
  if (wd != T(0)) {
    // Walk the parameter and gradient sets in lockstep.
    std::vector<const Mat<T>*> weights;
    p.for_each_tensor([&](const std::string&, const Mat<T>& m, TensorRole role) {
      weights.push_back(role == TensorRole::Weight ? &m : nullptr);
    });
    std::size_t idx = 0;
    g.for_each_tensor([&](const std::string&, Mat<T>& m, TensorRole) {
      if (weights[idx]) m += wd * *weights[idx];
      ++idx;
    });
  }

  res.batch_mean = std::move(tape.mean);
  res.batch_var = std::move(tape.var);
  bool finite = true;
  g.for_each_tensor([&](const std::string&, const Mat<T>& m, TensorRole) { finite = finite && m.allFinite(); });
  if (!finite) throw Error(Errc::NonFinite, "gradient overflow");
  return res;
}

template <typename T>
double decay_penalty(const ParamSet<T>& p, double weight_decay) {
  double s = 0.0;
  p.for_each_tensor([&](const std::string&, const Mat<T>& m, TensorRole role) {
    if (role == TensorRole::Weight) s += m.template cast<double>().squaredNorm();
  });
  return 0.5 * weight_decay * s;
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, 1> encode(const ParamSet<T>& p, const Eigen::MatrixXf& window) {
  if (window.rows() != p.arch.in_channels || window.cols() != p.arch.in_samples)
    throw Error(Errc::InvalidArgument, "window shape does not match the architecture");
  const Act<T> x = window.cast<T>();
  if (!x.allFinite()) throw Error(Errc::NonFinite, "input contains NaN/Inf");
  return run_encoder<T>(p, x, 1, Mode::Infer, nullptr).col(0);
}

template <typename T>
std::vector<std::uint8_t> activation_pattern(const ParamSet<T>& p, const Act<T>& x, int batch, Mode mode) {
  Tape<T> tape;
  (void)run_forward<T>(p, x, batch, mode, nullptr, 0.0, &tape);
  std::vector<std::uint8_t> out;
  auto signs = [&](const auto& m) {
    for (Index i = 0; i < m.size(); ++i) out.push_back(m.data()[i] > T(0) ? 1 : 0);
  };
  for (const auto& e : tape.enc) {
    signs(e.normed);
    for (Index i = 0; i < e.arg.size(); ++i) out.push_back(static_cast<std::uint8_t>(e.arg.data()[i] % p.arch.pool));
  }
  for (std::size_t j = 0; j + 1 < tape.dec.size(); ++j) signs(tape.dec[j].pre);
  for (const auto& a : tape.aux_pre) signs(a);
  return out;
}

#define SCB_CAE_INSTANTIATE(T)                                                                                      \
  template Act<T> pack_windows<T>(const std::vector<Eigen::MatrixXf>&, const std::vector<std::size_t>&);           \
  template Act<T> pack_windows<T>(const std::vector<Eigen::MatrixXf>&);                                            \
  template ForwardResult<T> forward<T>(const ParamSet<T>&, const Act<T>&, int, Mode, std::mt19937_64*, double);    \
  template LossParts loss<T>(const Act<T>&, const Act<T>&, const Mat<T>&, const std::vector<int>&, double);        \
  template GradResult<T> grad<T>(const ParamSet<T>&, const Act<T>&, const Act<T>&, const std::vector<int>&,        \
                                 const GradOptions&, std::mt19937_64*);                                            \
  template double decay_penalty<T>(const ParamSet<T>&, double);                                                    \
  template Eigen::Matrix<T, Eigen::Dynamic, 1> encode<T>(const ParamSet<T>&, const Eigen::MatrixXf&);            \
  template std::vector<std::uint8_t> activation_pattern<T>(const ParamSet<T>&, const Act<T>&, int, Mode);

SCB_CAE_INSTANTIATE(float)
SCB_CAE_INSTANTIATE(double)

#undef SCB_CAE_INSTANTIATE

}  // namespace scb::cae
