#pragma once

#include "lfvs/common.hpp"
#include "lfvs/geometry.hpp"
#include "lfvs/light_field.hpp"

namespace lfvs {

template <typename T>
Tensor<T> crop_image(const Tensor<T>& img, int y0, int x0, int h, int w) {
  require_data(y0 >= 0 && x0 >= 0 && y0 + h <= img.dim(1) && x0 + w <= img.dim(2),
               "crop window outside frame");
  Tensor<T> out({img.dim(0), h, w});
  for (int c = 0; c < img.dim(0); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

template <typename T>
Tensor<T> apply_gamma(const Tensor<T>& img01, double gamma) {
  Tensor<T> out(img01.shape());
  for (long i = 0; i < out.numel(); ++i)
    out[i] = T(std::pow(double(img01[i]), gamma));
  return out;
}

struct AugmentConfig {
  int crop_size = 192;
  double gamma_min = 0.4;
  double gamma_max = 1.0;
};

// One training example: the four corner views plus the ground-truth target
// view, all sharing the same crop window and gamma (photometric and
// geometric consistency across the light-field). Values stay in [0,1];
// the work-range mapping happens when the sample is prepared for the model.
struct TrainSample {
  std::array<Tensor<float>, 4> corners01;  // TL, TR, BL, BR
  Tensor<float> target01;
  GridCoord target;
  AngularGrid grid;
};

inline TrainSample augment_sample(const LightField& lf, GridCoord target,
                                  const AugmentConfig& cfg, Rng& rng) {
  require_data(cfg.crop_size <= lf.height && cfg.crop_size <= lf.width,
               "crop size exceeds the source extent");
  const int y0 = rng.uniform_index(lf.height - cfg.crop_size + 1);
  const int x0 = rng.uniform_index(lf.width - cfg.crop_size + 1);
  const double gamma = rng.uniform(cfg.gamma_min, cfg.gamma_max);

  auto prep = [&](const Tensor<float>& v) {
    Tensor<float> c = crop_image(v, y0, x0, cfg.crop_size, cfg.crop_size);
    return gamma == 1.0 ? c : apply_gamma(c, gamma);
  };

  TrainSample s;
  s.grid = AngularGrid{lf.n_v, lf.n_u};
  s.target = target;
  s.corners01 = {prep(lf.view(0, 0)), prep(lf.view(0, lf.n_u - 1)),
                 prep(lf.view(lf.n_v - 1, 0)), prep(lf.view(lf.n_v - 1, lf.n_u - 1))};
  s.target01 = prep(lf.view(target.v, target.u));
  return s;
}

// All non-corner angular positions, row-major. For a 7x7 grid this is the
// 45 interior rendering targets.
inline std::vector<GridCoord> interior_targets(const AngularGrid& grid) {
  std::vector<GridCoord> out;
  for (int v = 0; v < grid.n_v; ++v)
    for (int u = 0; u < grid.n_u; ++u)
      if (!grid.is_corner({v, u})) out.push_back({v, u});
  return out;
}

}  // namespace lfvs
