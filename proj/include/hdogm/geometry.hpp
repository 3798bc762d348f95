#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hdogm/errors.hpp"

namespace hdogm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

/// Planar pose. Rotating a sensor-frame point by `heading` (counterclockwise)
/// and translating by (x, y) places it in the global frame.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double heading_) : x(x_), y(y_), heading(normalize_angle(heading_)) {}
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

struct MapExtent {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  void validate() const {
    detail::require(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
                        std::isfinite(y_max),
                    "map extent must be finite");
    detail::require(x_max > x_min && y_max > y_min, "map extent must have x_max > x_min and y_max > y_min");
  }
  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  bool contains(const Point2& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Point2 clamp(const Point2& p) const noexcept {
    return {std::min(std::max(p.x, x_min), x_max), std::min(std::max(p.y, y_min), y_max)};
  }
  friend bool operator==(const MapExtent&, const MapExtent&) = default;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Row-major grid of real values. Row r spans y in
/// [origin_y + r*res, origin_y + (r+1)*res); column c likewise in x.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(std::size_t rows, std::size_t cols, double resolution, Point2 origin, double fill = 0.0)
      : rows_(rows), cols_(cols), resolution_(resolution), origin_(origin), values_(rows * cols, fill) {
    detail::require(rows > 0 && cols > 0, "occupancy grid must have rows*cols > 0");
    detail::require(std::isfinite(resolution) && resolution > 0.0, "grid resolution must be > 0");
    detail::require(std::isfinite(fill), "grid values must be finite");
  }

  /// Grid covering `extent` with ceil(size / resolution) cells per axis.
  static OccupancyGrid covering(const MapExtent& extent, double resolution) {
    detail::require(std::isfinite(resolution) && resolution > 0.0, "grid resolution must be > 0");
    extent.validate();
    const auto count = [&](double span) {
      const double n = span / resolution;
      // Absorb floating error so 20 / 1 does not become 21 cells.
      return static_cast<std::size_t>(std::ceil(n - 1e-9 * std::max(1.0, n)));
    };
    return OccupancyGrid(count(extent.height()), count(extent.width()), resolution,
                         {extent.x_min, extent.y_min});
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  double resolution() const noexcept { return resolution_; }
  Point2 origin() const noexcept { return origin_; }

  double& at(std::size_t r, std::size_t c) { return values_.at(r * cols_ + c); }
  double at(std::size_t r, std::size_t c) const { return values_.at(r * cols_ + c); }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  bool in_bounds(const Cell& c) const noexcept { return c.row < rows_ && c.col < cols_; }

  Point2 cell_center(std::size_t r, std::size_t c) const noexcept {
    return {origin_.x + (static_cast<double>(c) + 0.5) * resolution_,
            origin_.y + (static_cast<double>(r) + 0.5) * resolution_};
  }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double resolution_ = 1.0;
  Point2 origin_{};
  std::vector<double> values_;
};

/// Training data for occupancy mappers: global-frame points with 0/1 labels.
struct LabeledPointSet {
  std::vector<Point2> points;
  std::vector<std::uint8_t> labels;  // 1 = occupied, 0 = empty

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  void validate() const {
    detail::require(points.size() == labels.size(), "point/label count mismatch");
    for (std::size_t i = 0; i < points.size(); ++i) {
      detail::require(!std::isnan(points[i].x) && !std::isnan(points[i].y),
                      "NaN coordinate at point " + std::to_string(i));
      detail::require(labels[i] <= 1, "labels must be 0 or 1");
    }
  }

  void append(const Point2& p, std::uint8_t label) {
    points.push_back(p);
    labels.push_back(label);
  }
  void append(const LabeledPointSet& other) {
    points.insert(points.end(), other.points.begin(), other.points.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  }
};

}  // namespace hdogm
