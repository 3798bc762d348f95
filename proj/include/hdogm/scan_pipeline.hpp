#pragma once
// LiDAR scan -> labeled Cartesian training points.
//
//   ranges (polar, sensor frame)
//     -> X      = (r sin(theta), r cos(theta))          one row per beam
//     -> y      = 1, or 0 where the beam hit max range
//     -> X_int  = M free points per beam at k/(M+1) of its length, label 0
//     -> rotate by pose heading, translate by pose position
//
// The result always has (M + 1) * beam_count rows.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hdogm/detail/format.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"

namespace hdogm {

struct PolarScan {
  std::vector<double> ranges;  // meters
  double max_range = 1.0;      // meters
  double fov_degrees = 360.0;

  std::size_t beam_count() const noexcept { return ranges.size(); }
};

struct ThetaVector {
  std::vector<double> angles;  // radians
  double step = 0.0;           // radians
};

struct ScanOptions {
  /// Free-space points per beam (M).
  std::size_t interpolation_points = 1;
  /// A beam is max-range (label 0) when range >= max_range * (1 - tolerance).
  double max_range_tolerance = 1e-6;
  /// Degrees per full turn in the angular step. 360 is geometric; 365
  /// reproduces a printed variant of the racecar formula.
  double theta_denominator = 360.0;
};

inline ThetaVector make_theta(std::size_t beam_count, double fov_degrees,
                              double theta_denominator = 360.0) {
  detail::require(beam_count >= 1, "make_theta: beam count must be >= 1");
  detail::require(std::isfinite(fov_degrees) && fov_degrees > 0.0 && fov_degrees <= 360.0,
                  "make_theta: field of view must be in (0, 360] degrees");
  detail::require(std::isfinite(theta_denominator) && theta_denominator > 0.0,
                  "make_theta: theta denominator must be > 0");
  constexpr double pi = std::numbers::pi;
  ThetaVector theta;
  theta.step = (fov_degrees / theta_denominator) * 2.0 * pi / static_cast<double>(beam_count);
  // Partial fields of view are centered on the sensor's forward axis.
  const double start = fov_degrees == 360.0 ? 0.0 : -0.5 * fov_degrees * pi / 180.0;
  theta.angles.resize(beam_count);
  for (std::size_t i = 0; i < beam_count; ++i)
    theta.angles[i] = start + static_cast<double>(i) * theta.step;
  return theta;
}

inline std::vector<Point2> polar_to_cartesian(const PolarScan& scan, const ThetaVector& theta) {
  detail::require(scan.ranges.size() == theta.angles.size(),
                  "polar_to_cartesian: range/angle length mismatch");
  std::vector<Point2> out(scan.ranges.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = scan.ranges[i];
    out[i] = {r * std::sin(theta.angles[i]), r * std::cos(theta.angles[i])};
  }
  return out;
}

inline std::vector<std::uint8_t> label_endpoints(const PolarScan& scan, double max_range_tolerance = 1e-6) {
  const double cutoff = scan.max_range * (1.0 - max_range_tolerance);
  std::vector<std::uint8_t> labels(scan.ranges.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (scan.ranges[i] >= cutoff) labels[i] = 0;
  return labels;
}

/// M points per beam at fractions k/(M+1), k = 1..M; neither the sensor
/// origin nor the beam terminus is included.
inline LabeledPointSet interpolate_free(const PolarScan& scan, const ThetaVector& theta, std::size_t m) {
  detail::require(scan.ranges.size() == theta.angles.size(),
                  "interpolate_free: range/angle length mismatch");
  LabeledPointSet out;
  out.points.reserve(m * scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double s = std::sin(theta.angles[i]);
    const double c = std::cos(theta.angles[i]);
    for (std::size_t k = 1; k <= m; ++k) {
      const double r = scan.ranges[i] * static_cast<double>(k) / static_cast<double>(m + 1);
      out.points.push_back({r * s, r * c});
    }
  }
  out.labels.assign(out.points.size(), 0);
  return out;
}

inline Point2 transform_point(const Point2& p, const Pose2D& pose) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {c * p.x - s * p.y + pose.x, s * p.x + c * p.y + pose.y};
}

inline std::vector<Point2> transform_to_global(std::vector<Point2> points, const Pose2D& pose) {
  for (auto& p : points) p = transform_point(p, pose);
  return points;
}

inline LabeledPointSet build_training_set(const PolarScan& scan, const Pose2D& pose, const ScanOptions& options) {
  const ThetaVector theta = make_theta(scan.beam_count(), scan.fov_degrees, options.theta_denominator);
  LabeledPointSet out;
  out.points = polar_to_cartesian(scan, theta);
  out.labels = label_endpoints(scan, options.max_range_tolerance);
  out.append(interpolate_free(scan, theta, options.interpolation_points));
  out.points = transform_to_global(std::move(out.points), pose);
  return out;
}

inline LabeledPointSet build_training_set(const PolarScan& scan, const Pose2D& pose, std::size_t m) {
  ScanOptions options;
  options.interpolation_points = m;
  return build_training_set(scan, pose, options);
}

// CSV with header `x,y,label`, coordinates at micrometre precision.
inline void write_points_csv(std::ostream& os, const LabeledPointSet& points) {
  os << "x,y,label\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << detail::format_fixed(points.points[i].x, 6) << ',' << detail::format_fixed(points.points[i].y, 6)
       << ',' << static_cast<int>(points.labels[i]) << '\n';
  }
}

inline void write_points_csv(const std::string& path, const LabeledPointSet& points) {
  std::ofstream os(path);
  if (!os) throw IoError(path, "cannot open for writing");
  write_points_csv(os, points);
  if (!os) throw IoError(path, "write failed");
}

inline LabeledPointSet read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,y,label")
    throw InvalidArgument("points CSV: expected header 'x,y,label'");
  LabeledPointSet out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double x = 0, y = 0;
    int label = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> x >> c1 >> y >> c2 >> label) || c1 != ',' || c2 != ',' || (label != 0 && label != 1))
      throw InvalidArgument("points CSV: malformed row '" + line + "'");
    out.points.push_back({x, y});
    out.labels.push_back(static_cast<std::uint8_t>(label));
  }
  return out;
}

}  // namespace hdogm
