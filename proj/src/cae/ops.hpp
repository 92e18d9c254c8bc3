#pragma once

// Kernels shared by the float network and the quantized encoder.

#include <Eigen/Core>

#include <algorithm>

namespace scb::cae::detail {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Same-padded im2col: row ci*k + tap holds input channel ci shifted by tap - k/2.
template <typename T>
RowMat<T> im2col(const RowMat<T>& x, int batch, int len, int k) {
  const Eigen::Index cin = x.rows(), pad = k / 2;
  RowMat<T> cols = RowMat<T>::Zero(cin * k, static_cast<Eigen::Index>(batch) * len);
  for (Eigen::Index ci = 0; ci < cin; ++ci) {
    for (int tap = 0; tap < k; ++tap) {
      const Eigen::Index shift = tap - pad;
      const Eigen::Index lo = std::max<Eigen::Index>(0, -shift), hi = std::min<Eigen::Index>(len, len - shift);
      for (int b = 0; b < batch; ++b) {
        const T* src = x.data() + ci * x.cols() + static_cast<Eigen::Index>(b) * len;
        T* dst = cols.data() + (ci * k + tap) * cols.cols() + static_cast<Eigen::Index>(b) * len;
        for (Eigen::Index t = lo; t < hi; ++t) dst[t] = src[t + shift];
      }
    }
  }
  return cols;
}

}  // namespace scb::cae::detail
