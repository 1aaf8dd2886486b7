#include "lfvs/metrics.hpp"

#include <array>
#include <cmath>

#include "lfvs/common.hpp"

namespace lfvs {

Tensor<float> rgb_to_luma(const Tensor<float>& rgb01) {
  require(rgb01.rank() == 3 && rgb01.dim(0) == 3, "rgb_to_luma: expected (3,H,W)");
  const int h = rgb01.height(), w = rgb01.width();
  Tensor<float> y({1, h, w});
  for (int yy = 0; yy < h; ++yy)
    for (int x = 0; x < w; ++x)
      y.at(0, yy, x) = 0.299f * rgb01.at(0, yy, x) + 0.587f * rgb01.at(1, yy, x) +
                       0.114f * rgb01.at(2, yy, x);
  return y;
}

double mse(const Tensor<float>& a, const Tensor<float>& b) {
  require(a.same_shape(b), "mse: extent mismatch");
  double acc = 0.0;
  for (long i = 0; i < a.numel(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    acc += d * d;
  }
  return acc / double(a.numel());
}

double psnr_from_mse(double mse_value) {
  if (mse_value <= 0.0) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(1.0 / mse_value));
}

double psnr_y(const Tensor<float>& pred01, const Tensor<float>& gt01) {
  return psnr_from_mse(mse(rgb_to_luma(pred01), rgb_to_luma(gt01)));
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2 with L = 1
constexpr double kC2 = 0.03 * 0.03;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363,
                                                 0.1333};

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    k[size_t(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += k[size_t(i)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  double& at(int y, int x) { return v[size_t(y) * size_t(w) + size_t(x)]; }
  double at(int y, int x) const { return v[size_t(y) * size_t(w) + size_t(x)]; }
};

Plane from_luma(const Tensor<float>& y) {
  Plane p;
  p.h = y.height();
  p.w = y.width();
  p.v.resize(size_t(p.h) * size_t(p.w));
  for (long i = 0; i < y.numel(); ++i) p.v[size_t(i)] = double(y[i]);
  return p;
}

// Separable valid-mode Gaussian filtering; output shrinks by kWindow-1.
Plane gauss_valid(const Plane& in) {
  static const auto kernel = gaussian_kernel();
  Plane tmp;
  tmp.h = in.h;
  tmp.w = in.w - kWindow + 1;
  tmp.v.resize(size_t(tmp.h) * size_t(tmp.w));
  for (int y = 0; y < tmp.h; ++y)
    for (int x = 0; x < tmp.w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += kernel[size_t(k)] * in.at(y, x + k);
      tmp.at(y, x) = acc;
    }
  Plane out;
  out.h = in.h - kWindow + 1;
  out.w = tmp.w;
  out.v.resize(size_t(out.h) * size_t(out.w));
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += kernel[size_t(k)] * tmp.at(y + k, x);
      out.at(y, x) = acc;
    }
  return out;
}

Plane downsample2(const Plane& in) {
  Plane out;
  out.h = in.h / 2;
  out.w = in.w / 2;
  out.v.resize(size_t(out.h) * size_t(out.w));
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x)
      out.at(y, x) = 0.25 * (in.at(2 * y, 2 * x) + in.at(2 * y, 2 * x + 1) +
                             in.at(2 * y + 1, 2 * x) + in.at(2 * y + 1, 2 * x + 1));
  return out;
}

struct ScaleStats {
  double cs = 0.0;    // mean of cs(x,y)
  double ssim = 0.0;  // mean of l(x,y)*cs(x,y), used at the coarsest scale
};

ScaleStats ssim_scale(const Plane& a, const Plane& b) {
  Plane mu1 = gauss_valid(a), mu2 = gauss_valid(b);

  Plane a2 = a, b2 = b, ab = a;
  for (size_t i = 0; i < a.v.size(); ++i) {
    a2.v[i] = a.v[i] * a.v[i];
    b2.v[i] = b.v[i] * b.v[i];
    ab.v[i] = a.v[i] * b.v[i];
  }
  Plane s11 = gauss_valid(a2), s22 = gauss_valid(b2), s12 = gauss_valid(ab);

  double ssim_acc = 0.0, cs_acc = 0.0;
  for (size_t i = 0; i < mu1.v.size(); ++i) {
    const double m1 = mu1.v[i], m2 = mu2.v[i];
    const double var1 = s11.v[i] - m1 * m1;
    const double var2 = s22.v[i] - m2 * m2;
    const double cov = s12.v[i] - m1 * m2;
    const double lum = (2.0 * m1 * m2 + kC1) / (m1 * m1 + m2 * m2 + kC1);
    const double cs = (2.0 * cov + kC2) / (var1 + var2 + kC2);
    cs_acc += cs;
    ssim_acc += lum * cs;
  }
  ScaleStats st;
  st.cs = cs_acc / double(mu1.v.size());
  st.ssim = ssim_acc / double(mu1.v.size());
  return st;
}

int feasible_scales(int h, int w) {
  int scales = 0;
  int m = std::min(h, w);
  while (scales < 5 && m >= kWindow) {
    ++scales;
    m /= 2;
  }
  return scales;
}

}  // namespace

MsssimResult msssim_y(const Tensor<float>& pred01, const Tensor<float>& gt01) {
  require(pred01.same_shape(gt01), "msssim: extent mismatch");
  Plane a = from_luma(rgb_to_luma(pred01));
  Plane b = from_luma(rgb_to_luma(gt01));

  MsssimResult res;
  res.scales = feasible_scales(a.h, a.w);
  require_data(res.scales >= 1, "image too small for SSIM window");

  double weight_sum = 0.0;
  for (int s = 0; s < res.scales; ++s) weight_sum += kScaleWeights[size_t(s)];

  double log_score = 0.0;
  for (int s = 0; s < res.scales; ++s) {
    const ScaleStats st = ssim_scale(a, b);
    const double w = kScaleWeights[size_t(s)] / weight_sum;
    // The coarsest scale contributes the full SSIM mean, earlier scales
    // only contrast-structure. Negative terms are clamped because the
    // exponents are fractional.
    const double term = s == res.scales - 1 ? st.ssim : st.cs;
    log_score += w * std::log(std::max(term, 1e-12));
    if (s + 1 < res.scales) {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  res.score = std::exp(log_score);
  return res;
}

double msssim_to_db(double score) {
  if (score >= 1.0) return kMetricCapDb;
  return std::min(kMetricCapDb, -10.0 * std::log10(1.0 - score));
}

double msssim_db(const Tensor<float>& pred01, const Tensor<float>& gt01) {
  return msssim_to_db(msssim_y(pred01, gt01).score);
}

}  // namespace lfvs
