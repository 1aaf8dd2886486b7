#include "lfvs/geometry.hpp"

namespace lfvs {

GridCoord excluded_corner(const AngularGrid& grid, GridCoord target) {
  const std::array<GridCoord, 4> priority = {
      GridCoord{grid.n_v - 1, grid.n_u - 1},
      GridCoord{grid.n_v - 1, 0},
      GridCoord{0, grid.n_u - 1},
      GridCoord{0, 0},
  };
  int best_dist = -1;
  GridCoord best{};
  for (const GridCoord& c : priority) {
    const int dist = std::abs(c.v - target.v) + std::abs(c.u - target.u);
    if (dist > best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

ViewSelection<float> select_views(const LightField& lf, GridCoord target) {
  const AngularGrid grid{lf.n_v, lf.n_u};
  const std::array<Tensor<float>, 4> corners = {
      lf.view(0, 0), lf.view(0, lf.n_u - 1), lf.view(lf.n_v - 1, 0),
      lf.view(lf.n_v - 1, lf.n_u - 1)};
  return select_views_from_corners(corners, grid, target);
}

}  // namespace lfvs
