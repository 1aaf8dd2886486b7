#pragma once

#include "lfvs/blas.hpp"
#include "lfvs/tensor.hpp"

namespace lfvs::nn {

// All convolutions are stride-1, odd-kernel, "same" extent, with replicate
// (edge-clamp) padding so spatially constant inputs stay constant. Dilated
// taps clamp the same way.

inline int conv_pad(int k, int dilation) { return dilation * (k - 1) / 2; }

// im2col: x (C,H,W) -> cols (C*k*k, H*W), row-major.
template <typename T>
void im2col(const Tensor<T>& x, int k, int dilation, Tensor<T>& cols) {
  const int cn = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int pad = conv_pad(k, dilation);
  require(cols.rank() == 2 && cols.dim(0) == cn * k * k && cols.dim(1) == h * w,
          "im2col: bad cols shape");
  T* out = cols.data();
  for (int c = 0; c < cn; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int off_y = ky * dilation - pad;
        const int off_x = kx * dilation - pad;
        T* dst = out + (size_t(c) * k * k + size_t(ky) * k + kx) * size_t(h) * w;
        for (int y = 0; y < h; ++y) {
          int sy = y + off_y;
          sy = sy < 0 ? 0 : (sy >= h ? h - 1 : sy);
          const T* src_row = &x.at(c, sy, 0);
          T* dst_row = dst + size_t(y) * w;
          // replicate-clamped head, contiguous middle, clamped tail
          const int x_lo = std::max(0, -off_x);
          const int x_hi = std::min(w, w - off_x);
          for (int x2 = 0; x2 < std::min(x_lo, w); ++x2) dst_row[x2] = src_row[0];
          for (int x2 = x_lo; x2 < x_hi; ++x2) dst_row[x2] = src_row[x2 + off_x];
          for (int x2 = std::max(x_hi, 0); x2 < w; ++x2) dst_row[x2] = src_row[w - 1];
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add cols (C*k*k, H*W) back into dx (C,H,W).
template <typename T>
void col2im_accumulate(const Tensor<T>& cols, int k, int dilation, Tensor<T>& dx) {
  const int cn = dx.dim(0), h = dx.dim(1), w = dx.dim(2);
  const int pad = conv_pad(k, dilation);
  const T* src = cols.data();
  for (int c = 0; c < cn; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int off_y = ky * dilation - pad;
        const int off_x = kx * dilation - pad;
        const T* s = src + (size_t(c) * k * k + size_t(ky) * k + kx) * size_t(h) * w;
        for (int y = 0; y < h; ++y) {
          int sy = y + off_y;
          sy = sy < 0 ? 0 : (sy >= h ? h - 1 : sy);
          T* drow = &dx.at(c, sy, 0);
          const T* srow = s + size_t(y) * w;
          for (int x = 0; x < w; ++x) {
            int sx = x + off_x;
            sx = sx < 0 ? 0 : (sx >= w ? w - 1 : sx);
            drow[sx] += srow[x];
          }
        }
      }
    }
  }
}

// y (O,H,W) = weight (O,C,k,k) * x (C,H,W) + bias (O)
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& weight,
                         const Tensor<T>& bias, int dilation) {
  const int cn = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int out_c = weight.dim(0), k = weight.dim(2);
  require(weight.dim(1) == cn, "conv2d: input channel mismatch");
  require(weight.dim(2) == weight.dim(3) && k % 2 == 1, "conv2d: odd square kernels only");
  require(bias.numel() == out_c, "conv2d: bias size mismatch");

  Tensor<T> cols({cn * k * k, h * w});
  im2col(x, k, dilation, cols);
  Tensor<T> y({out_c, h, w});
  gemm<T>(false, false, out_c, h * w, cn * k * k, T(1), weight.data(), cn * k * k,
          cols.data(), h * w, T(0), y.data(), h * w);
  for (int o = 0; o < out_c; ++o) {
    T* row = &y.at(o, 0, 0);
    const T b = bias[o];
    for (long i = 0; i < long(h) * w; ++i) row[i] += b;
  }
  return y;
}

// Accumulates input/weight/bias gradients for conv2d_forward.
template <typename T>
void conv2d_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& dy,
                     int dilation, Tensor<T>* dx, Tensor<T>* dweight, Tensor<T>* dbias) {
  const int cn = x.dim(0), h = x.dim(1), w = x.dim(2);
  const int out_c = weight.dim(0), k = weight.dim(2);
  const int kk = cn * k * k, n = h * w;

  if (dbias) {
    for (int o = 0; o < out_c; ++o) {
      const T* row = &dy.at(o, 0, 0);
      T acc = T(0);
      for (long i = 0; i < long(n); ++i) acc += row[i];
      (*dbias)[o] += acc;
    }
  }
  if (dweight) {
    Tensor<T> cols({kk, n});
    im2col(x, k, dilation, cols);
    // dW (O x kk) += dy (O x n) * cols^T (n x kk)
    gemm<T>(false, true, out_c, kk, n, T(1), dy.data(), n, cols.data(), n, T(1),
            dweight->data(), kk);
  }
  if (dx) {
    Tensor<T> dcols({kk, n});
    gemm<T>(true, false, kk, n, out_c, T(1), weight.data(), kk, dy.data(), n, T(0),
            dcols.data(), n);
    col2im_accumulate(dcols, k, dilation, *dx);
  }
}

}  // namespace lfvs::nn
