#pragma once

#include <array>
#include <cmath>

#include "lfvs/light_field.hpp"

namespace lfvs {

struct GridCoord {
  int v = 0;
  int u = 0;
  bool operator==(const GridCoord&) const = default;
};

// Angular grid with the normalized coordinate convention: index 0..n-1 maps
// linearly onto [-1, 1]. U/V planes and warp offsets use this unit, so
// disparity is expressed in pixels per normalized angular unit.
struct AngularGrid {
  int n_v = 7;
  int n_u = 7;

  double norm_v(double v) const { return n_v > 1 ? 2.0 * v / (n_v - 1) - 1.0 : 0.0; }
  double norm_u(double u) const { return n_u > 1 ? 2.0 * u / (n_u - 1) - 1.0 : 0.0; }
  // Converts a disparity in pixels per index step into pixels per
  // normalized unit (the scale the networks operate in).
  double disparity_scale() const { return (std::max(n_v, n_u) - 1) / 2.0; }

  bool is_corner(GridCoord c) const {
    return (c.v == 0 || c.v == n_v - 1) && (c.u == 0 || c.u == n_u - 1);
  }
  bool contains(GridCoord c) const {
    return c.v >= 0 && c.v < n_v && c.u >= 0 && c.u < n_u;
  }
};

// Roles of the three selected corner views after flip normalization.
enum ViewRole { kLeft = 0, kRight = 1, kBottom = 2 };

// Three corner views flipped into the canonical "upper-left triangle"
// arrangement: L at (0,0), R at (0,n_u-1), B at (n_v-1,0) in (v,u) indexing.
template <typename T>
struct ViewSelection {
  std::array<Tensor<T>, 3> views;      // flipped copies, roles L,R,B
  std::array<GridCoord, 3> corners;    // canonical corner coordinates
  GridCoord dropped;                   // corner excluded (original frame)
  bool flip_h = false;
  bool flip_v = false;
  GridCoord original_target;
  GridCoord remapped_target;
  AngularGrid grid;
};

template <typename T>
Tensor<T> flip_image(const Tensor<T>& img, bool horizontal, bool vertical) {
  if (!horizontal && !vertical) return img;
  Tensor<T> out(img.shape());
  const int c_n = img.dim(0), h = img.dim(1), w = img.dim(2);
  for (int c = 0; c < c_n; ++c)
    for (int y = 0; y < h; ++y) {
      const int sy = vertical ? h - 1 - y : y;
      for (int x = 0; x < w; ++x)
        out.at(c, y, x) = img.at(c, sy, horizontal ? w - 1 - x : x);
    }
  return out;
}

// Which corner to drop: the one with maximum L1 angular distance to the
// target. Ties are broken by a fixed priority so behavior is deterministic:
// (n_v-1,n_u-1) first, then (n_v-1,0), then (0,n_u-1), then (0,0).
GridCoord excluded_corner(const AngularGrid& grid, GridCoord target);

template <typename T>
ViewSelection<T> select_views_from_corners(const std::array<Tensor<T>, 4>& corner_views,
                                           const AngularGrid& grid, GridCoord target) {
  require_usage(grid.contains(target), "target outside the angular grid");
  require_usage(!grid.is_corner(target),
                "target is a corner view; corners are inputs, not targets");

  ViewSelection<T> sel;
  sel.grid = grid;
  sel.original_target = target;
  sel.dropped = excluded_corner(grid, target);
  // Flips move the dropped corner to (n_v-1, n_u-1), which leaves the three
  // kept corners in the canonical triangle.
  sel.flip_h = (sel.dropped.u == 0);
  sel.flip_v = (sel.dropped.v == 0);
  sel.remapped_target = {sel.flip_v ? grid.n_v - 1 - target.v : target.v,
                         sel.flip_h ? grid.n_u - 1 - target.u : target.u};

  auto corner_index = [&](GridCoord c) {
    return (c.v == 0 ? 0 : 2) + (c.u == 0 ? 0 : 1);  // TL,TR,BL,BR
  };
  auto original_of = [&](GridCoord canonical) {
    return GridCoord{sel.flip_v ? grid.n_v - 1 - canonical.v : canonical.v,
                     sel.flip_h ? grid.n_u - 1 - canonical.u : canonical.u};
  };

  sel.corners[kLeft] = {0, 0};
  sel.corners[kRight] = {0, grid.n_u - 1};
  sel.corners[kBottom] = {grid.n_v - 1, 0};
  for (int r = 0; r < 3; ++r) {
    const auto& src = corner_views[size_t(corner_index(original_of(sel.corners[size_t(r)])))];
    sel.views[size_t(r)] = flip_image(src, sel.flip_h, sel.flip_v);
  }
  return sel;
}

ViewSelection<float> select_views(const LightField& lf, GridCoord target);

template <typename T>
Tensor<T> unflip(const Tensor<T>& img, const ViewSelection<T>& sel) {
  return flip_image(img, sel.flip_h, sel.flip_v);
}

// Constant angular coordinate planes U(x,y) = u, V(x,y) = v at the working
// extent, in normalized units.
template <typename T>
Tensor<T> make_plane(T value, int height, int width) {
  require(height > 0 && width > 0, "make_plane: extent must be positive");
  return Tensor<T>::full({1, height, width}, value);
}

// Backward warping with bilinear sub-pixel sampling and edge clamping:
//   out(x,y) = view(x + du * disparity(x,y), y + dv * disparity(x,y)).
// (du, dv) is the angular offset of the source view relative to the target,
// in normalized units; disparity is in pixels per normalized unit.
template <typename T>
Tensor<T> warp_view(const Tensor<T>& view, const Tensor<T>& disparity, T du, T dv) {
  require(view.rank() == 3 && disparity.rank() == 3 && disparity.dim(0) == 1,
          "warp_view: expected (C,H,W) view and (1,H,W) disparity");
  require(view.dim(1) == disparity.dim(1) && view.dim(2) == disparity.dim(2),
          "warp_view: view/disparity extent mismatch");
  const int cn = view.dim(0), h = view.dim(1), w = view.dim(2);
  Tensor<T> out(view.shape());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const T d = disparity.at(0, y, x);
      T sx = T(x) + du * d;
      T sy = T(y) + dv * d;
      if (sx < T(0)) sx = T(0);
      if (sx > T(w - 1)) sx = T(w - 1);
      if (sy < T(0)) sy = T(0);
      if (sy > T(h - 1)) sy = T(h - 1);
      const int x0 = std::min(int(std::floor(sx)), w - 2 < 0 ? 0 : w - 2);
      const int y0 = std::min(int(std::floor(sy)), h - 2 < 0 ? 0 : h - 2);
      const T fx = sx - T(x0);
      const T fy = sy - T(y0);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      for (int c = 0; c < cn; ++c) {
        const T v00 = view.at(c, y0, x0), v01 = view.at(c, y0, x1);
        const T v10 = view.at(c, y1, x0), v11 = view.at(c, y1, x1);
        const T top = v00 + fx * (v01 - v00);
        const T bot = v10 + fx * (v11 - v10);
        out.at(c, y, x) = top + fy * (bot - top);
      }
    }
  }
  return out;
}

}  // namespace lfvs
