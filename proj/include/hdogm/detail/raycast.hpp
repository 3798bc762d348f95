#pragma once
// Grid traversal (Amanatides-Woo) shared by both simulators.
//
// Cell (r, c) covers x in [c*res, (c+1)*res), y in [r*res, (r+1)*res).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "hdogm/geometry.hpp"

namespace hdogm::detail {

struct RayHit {
  double range = 0.0;
  bool hit = false;
  /// The occupied cell that stopped the ray, when it lies inside the grid.
  std::optional<Cell> cell;
};

struct RayGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double resolution = 1.0;
  /// When false, rays leave the grid unobstructed and return max range.
  bool outside_is_wall = true;
};

/// Walks the ray from `origin` along unit direction (dx, dy) until an occupied
/// cell, the grid edge or `max_range`. `visit(Cell)` is called for every free
/// cell the ray passes through, origin cell included.
///
/// When the ray passes within `kCornerEps` of a grid corner it steps
/// diagonally; it stops there if the diagonal cell or both side cells are
/// occupied.
template <class Occupied, class Visit>
RayHit cast_ray(const RayGrid& g, Point2 origin, double dx, double dy, double max_range, Occupied&& occupied,
                Visit&& visit) {
  constexpr double kCornerEps = 1e-9;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double res = g.resolution;
  long col = static_cast<long>(std::floor(origin.x / res));
  long row = static_cast<long>(std::floor(origin.y / res));
  const auto inside = [&](long r, long c) {
    return r >= 0 && c >= 0 && r < static_cast<long>(g.rows) && c < static_cast<long>(g.cols);
  };
  const auto blocked = [&](long r, long c) {
    if (!inside(r, c)) return g.outside_is_wall;
    return static_cast<bool>(occupied(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
  };
  const auto stop = [&](double t, long r, long c) {
    RayHit h{t, true, std::nullopt};
    if (inside(r, c)) h.cell = Cell{static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
    return h;
  };

  if (blocked(row, col)) return stop(0.0, row, col);

  const int step_c = dx > 0 ? 1 : -1;
  const int step_r = dy > 0 ? 1 : -1;
  const double delta_x = dx != 0 ? res / std::abs(dx) : inf;
  const double delta_y = dy != 0 ? res / std::abs(dy) : inf;
  double next_x = dx != 0 ? ((dx > 0 ? col + 1 : col) * res - origin.x) / dx : inf;
  double next_y = dy != 0 ? ((dy > 0 ? row + 1 : row) * res - origin.y) / dy : inf;

  while (true) {
    if (inside(row, col)) visit(Cell{static_cast<std::size_t>(row), static_cast<std::size_t>(col)});
    const double t = std::min(next_x, next_y);
    if (t >= max_range) return {max_range, false, std::nullopt};
    if (std::abs(next_x - next_y) <= kCornerEps * res) {
      const long r = row + step_r, c = col + step_c;
      if (blocked(r, c)) return stop(t, r, c);
      if (blocked(row, c) && blocked(r, col)) return stop(t, row, c);
      row = r;
      col = c;
      next_x += delta_x;
      next_y += delta_y;
    } else if (next_x < next_y) {
      col += step_c;
      if (blocked(row, col)) return stop(t, row, col);
      next_x += delta_x;
    } else {
      row += step_r;
      if (blocked(row, col)) return stop(t, row, col);
      next_y += delta_y;
    }
    // Once outside an open-edged grid nothing else can stop the ray.
    if (!inside(row, col) && !g.outside_is_wall) return {max_range, false, std::nullopt};
  }
}

}  // namespace hdogm::detail
