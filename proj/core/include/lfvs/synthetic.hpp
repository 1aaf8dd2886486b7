#pragma once

#include <vector>

#include "lfvs/common.hpp"
#include "lfvs/config.hpp"
#include "lfvs/light_field.hpp"

namespace lfvs {

// One scene layer. Textures are band-limited periodic noise (sums of
// sinusoids with integer cycle counts over the frame), so they are defined
// analytically at every real coordinate and shift without resampling error.
// Non-background layers carry an elliptical support, evaluated on
// wrapped coordinates so every view is fully covered.
struct SyntheticLayer {
  double disparity = 0.0;  // pixels per unit angular index step
  uint64_t texture_seed = 0;
  bool is_background = false;
  double cx = 0.0, cy = 0.0;  // ellipse center (pixels, in the view-(0,0) frame)
  double rx = 1.0, ry = 1.0;  // ellipse radii (pixels)
};

// Layers are ordered front to back: index 0 occludes index 1, and so on.
// The last layer must be a background covering the whole frame.
struct SyntheticSceneSpec {
  int n_v = 7, n_u = 7;
  int height = 96, width = 96;
  int texture_waves = 8;
  std::vector<SyntheticLayer> layers;

  void validate() const;
};

struct SyntheticScene {
  LightField lf;
  // Exact per-view, per-pixel ground truth of the front-most visible layer.
  std::vector<Tensor<float>> gt_disparity;  // (1,H,W), px per angular step
  std::vector<Tensor<int>> layer_ids;       // (1,H,W)

  const Tensor<float>& disparity(int v, int u) const {
    return gt_disparity[size_t(v) * size_t(lf.n_u) + size_t(u)];
  }
  const Tensor<int>& labels(int v, int u) const {
    return layer_ids[size_t(v) * size_t(lf.n_u) + size_t(u)];
  }
};

SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec);

// Layer primitives, exposed so tests can verify the compositing rule
// independently. Coordinates are in the view-(0,0) frame; a view at
// angular index (v,u) samples layer l at (x - u*d_l, y - v*d_l).
double layer_texture_value(const SyntheticSceneSpec& spec, int layer, int channel,
                           double x, double y);
bool layer_covers(const SyntheticSceneSpec& spec, int layer, double x, double y);

// Full pre-compositing texture image of one layer as seen from view (v,u).
Tensor<float> render_layer_view(const SyntheticSceneSpec& spec, int layer, int v,
                                int u);

// Randomized scene family used by `lfvs prepare --synthetic`. Reads the
// distribution from a key=value config (keys documented in the CLI help)
// and draws per-scene layer geometry/disparities deterministically from
// the master seed.
struct SyntheticDistribution {
  int n_v = 7, n_u = 7;
  int height = 96, width = 96;
  int texture_waves = 8;
  int foreground_layers = 2;
  double disparity_min = -2.0, disparity_max = 2.0;
  bool integer_disparities = false;

  static SyntheticDistribution from_config(const Config& cfg);
  SyntheticSceneSpec sample(uint64_t scene_seed) const;
};

}  // namespace lfvs
