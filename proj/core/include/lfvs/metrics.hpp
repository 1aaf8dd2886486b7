#pragma once

#include "lfvs/tensor.hpp"

namespace lfvs {

// Metrics follow the reporting convention used throughout: PSNR and MS-SSIM
// are computed on the BT.601 luma of [0,1] RGB images and expressed in dB.
// Identical images are capped at 100 dB to keep reports finite.

inline constexpr double kMetricCapDb = 100.0;

// (1,H,W) luma from (3,H,W) RGB in [0,1], Y = 0.299 R + 0.587 G + 0.114 B.
Tensor<float> rgb_to_luma(const Tensor<float>& rgb01);

// Mean squared error accumulated in double.
double mse(const Tensor<float>& a, const Tensor<float>& b);

// 10*log10(1/mse) with peak 1; capped at kMetricCapDb.
double psnr_from_mse(double mse_value);

double psnr_y(const Tensor<float>& pred01, const Tensor<float>& gt01);

struct MsssimResult {
  double score = 0.0;
  int scales = 0;  // < 5 when the image is too small for the full pyramid
};

// Multi-scale SSIM on the luma channel: 11x11 Gaussian window (sigma 1.5),
// valid-region statistics, 2x2 average-pool downsampling, standard 5-scale
// weights (renormalized when fewer scales fit).
MsssimResult msssim_y(const Tensor<float>& pred01, const Tensor<float>& gt01);

// -10*log10(1 - score), capped at kMetricCapDb; monotone in the score.
double msssim_to_db(double score);

double msssim_db(const Tensor<float>& pred01, const Tensor<float>& gt01);

}  // namespace lfvs
