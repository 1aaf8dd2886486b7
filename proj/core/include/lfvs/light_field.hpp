#pragma once

#include <filesystem>
#include <vector>

#include "lfvs/tensor.hpp"

namespace lfvs {

// 4D light-field as a (v,u)-indexed grid of RGB sub-aperture views.
// All views share one spatial extent; pixels are in [0,1]. Mapping to the
// network range [-1,1] happens inside training/inference only.
struct LightField {
  int n_v = 0;
  int n_u = 0;
  int height = 0;
  int width = 0;
  // Values decoded from 8-bit sources and scaled; treated as linear
  // downstream (no gamma transform applied at ingestion).
  enum class ColorSpace { scaled_srgb } color_space = ColorSpace::scaled_srgb;
  std::vector<Tensor<float>> views;  // index v * n_u + u, each (3,H,W)

  LightField() = default;
  LightField(int nv, int nu, int h, int w);

  Tensor<float>& view(int v, int u);
  const Tensor<float>& view(int v, int u) const;

  bool in_grid(int v, int u) const {
    return v >= 0 && v < n_v && u >= 0 && u < n_u;
  }
  bool is_corner(int v, int u) const {
    return (v == 0 || v == n_v - 1) && (u == 0 || u == n_u - 1);
  }

  // Spatial crop applied to every view.
  LightField crop_spatial(int y0, int x0, int h, int w) const;

  void validate() const;
};

// Scene directory layout: one 8-bit PNG per view, named view_<v>_<u>.png
// with v/u zero-based from the top-left of the angular grid.
std::filesystem::path view_filename(int v, int u);

void write_lightfield(const std::filesystem::path& scene_dir, const LightField& lf);
LightField read_lightfield_dir(const std::filesystem::path& scene_dir);

// Angular crop index rule for taking a centered sub-grid from a capture:
// start = (capture - crop + 1) / 2, so a 14-view axis cropped to 7 keeps
// indices 4..10 and an 8-view axis cropped to 7 keeps 1..7.
int central_crop_start(int capture_extent, int crop_extent);

LightField crop_angular(const LightField& lf, int crop_nv, int crop_nu);

}  // namespace lfvs
