#pragma once
// Kinematic racetrack world.
//
// Track bitmaps are row-major with row 0 at y = 0 and 1 = wall. Anything
// outside the bitmap is wall. Heading 0 faces +y; positive steering turns
// left (counterclockwise). Lidar beam angles follow the scan pipeline:
// theta = 0 straight ahead, positive theta to the right.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hdogm/detail/raycast.hpp"
#include "hdogm/detail/rng.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"
#include "hdogm/reward.hpp"
#include "hdogm/scan_pipeline.hpp"

namespace hdogm {

struct Track {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double resolution = 0.1;  // meters per cell
  std::vector<std::uint8_t> walls;
  Pose2D start;

  bool wall(std::size_t r, std::size_t c) const { return walls.at(r * cols + c) != 0; }
  MapExtent extent() const {
    return {0.0, static_cast<double>(cols) * resolution, 0.0, static_cast<double>(rows) * resolution};
  }
};

struct VehicleParams {
  double v_max = 3.5;        // m/s
  double wheelbase = 0.3;    // m
  double steer_max = 0.4;    // rad
  double dt = 0.02;          // s
  double accel_max = 4.0;    // m/s^2
  double radius = 0.15;      // collision disc, m
};

struct LidarParams {
  std::size_t beams = 1080;
  double fov_degrees = 273.5;
  double max_range = 10.0;   // m
  double noise = 0.05;       // multiplicative bound
  double theta_denominator = 360.0;
};

struct CarConfig {
  VehicleParams vehicle{};
  LidarParams lidar{};
  CarRewardConstants rewards{};
  std::size_t step_cap = 5000;
  std::uint64_t seed = 0;
};

struct CarState {
  Pose2D pose;
  double speed = 0.0;
  double steering = 0.0;  // last normalized command
  bool collision = false;
};

struct CarStep {
  PolarScan scan;
  Pose2D pose;
  double speed = 0.0;
  RewardBreakdown reward;
  /// Minimum noiseless beam range.
  double d_min = 0.0;
  bool done = false;
};

namespace detail {

inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Closed corridor of the given width around a polygonal centerline.
inline Track corridor_track(std::string name, std::vector<Point2> loop, double width, double resolution) {
  constexpr double margin = 1.0;
  double x0 = loop[0].x, x1 = x0, y0 = loop[0].y, y1 = y0;
  for (const auto& p : loop) {
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  }
  const double shift_x = margin + width / 2 - x0, shift_y = margin + width / 2 - y0;
  for (auto& p : loop) p = {p.x + shift_x, p.y + shift_y};
  Track t;
  t.name = std::move(name);
  t.resolution = resolution;
  t.cols = static_cast<std::size_t>(std::ceil((x1 - x0 + width + 2 * margin) / resolution));
  t.rows = static_cast<std::size_t>(std::ceil((y1 - y0 + width + 2 * margin) / resolution));
  t.walls.assign(t.rows * t.cols, 1);
  for (std::size_t r = 0; r < t.rows; ++r)
    for (std::size_t c = 0; c < t.cols; ++c) {
      const Point2 p{(c + 0.5) * resolution, (r + 0.5) * resolution};
      double d = 1e300;
      for (std::size_t k = 0; k < loop.size(); ++k) d = std::min(d, segment_distance(p, loop[k], loop[(k + 1) % loop.size()]));
      if (d <= width / 2) t.walls[r * t.cols + c] = 0;
    }
  const Point2 a = loop[0], b = loop[1];
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  const double fx = (b.x - a.x) / len, fy = (b.y - a.y) / len;
  // Forward is (-sin h, cos h).
  t.start = Pose2D(a.x + 1.5 * fx, a.y + 1.5 * fy, std::atan2(-fx, fy));
  return t;
}

}  // namespace detail

/// Builtin tracks by difficulty: "oval", "lcorner", "chicane".
inline Track builtin_track(const std::string& name, double resolution = 0.1) {
  detail::require(std::isfinite(resolution) && resolution > 0, "track resolution must be > 0");
  if (name == "oval") {
    // Starts on the bottom straight, counterclockwise.
    std::vector<Point2> loop{{-6.0, 0.0}};
    constexpr int arc = 12;
    for (int k = 0; k <= arc; ++k) {
      const double a = -std::numbers::pi / 2 + std::numbers::pi * k / arc;
      loop.push_back({6.0 + 4.0 * std::cos(a), 4.0 + 4.0 * std::sin(a)});
    }
    for (int k = 0; k < arc; ++k) {
      const double a = std::numbers::pi / 2 + std::numbers::pi * k / arc;
      loop.push_back({-6.0 + 4.0 * std::cos(a), 4.0 + 4.0 * std::sin(a)});
    }
    return detail::corridor_track("oval", loop, 2.4, resolution);
  }
  if (name == "lcorner")
    return detail::corridor_track("lcorner", {{0, 0}, {16, 0}, {16, 6}, {7, 6}, {7, 14}, {0, 14}}, 2.0, resolution);
  if (name == "chicane")
    return detail::corridor_track(
        "chicane", {{0, 0}, {7, 0}, {9, 1.6}, {11, 0}, {20, 0}, {20, 10}, {12, 10}, {10, 8.4}, {8, 10}, {0, 10}}, 1.4,
        resolution);
  throw InvalidArgument("unknown builtin track '" + name + "' (expected oval, lcorner or chicane)");
}

/// Binary PGM (P5, maxval 255) with only 0 (wall) and 255 (free) pixels. The
/// image's top row is the track's highest y. The sidecar is a text file of
/// `key value` lines: resolution, start_x, start_y, start_heading.
inline Track load_track_pgm(const std::string& pgm_path, const std::string& sidecar_path) {
  std::ifstream is(pgm_path, std::ios::binary);
  if (!is) throw IoError(pgm_path, "cannot open track image");
  const auto token = [&]() {
    std::string t;
    while (is >> t) {
      if (t[0] != '#') return t;
      std::string rest;
      std::getline(is, rest);
    }
    throw InvalidArgument(pgm_path + ": truncated PGM header");
  };
  if (token() != "P5") throw InvalidArgument(pgm_path + ": not a binary PGM (P5)");
  std::size_t width = 0, height = 0, maxval = 0;
  try {
    width = std::stoul(token());
    height = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::logic_error&) {
    throw InvalidArgument(pgm_path + ": malformed PGM header");
  }
  detail::require(width > 0 && height > 0 && maxval == 255, pgm_path + ": expected a non-empty 8-bit PGM");
  is.get();
  std::vector<unsigned char> pixels(width * height);
  is.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (static_cast<std::size_t>(is.gcount()) != pixels.size()) throw InvalidArgument(pgm_path + ": truncated pixel data");

  Track t;
  t.name = pgm_path;
  t.rows = height;
  t.cols = width;
  t.walls.resize(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (pixels[i] != 0 && pixels[i] != 255)
      throw InvalidArgument(pgm_path + ": pixel value " + std::to_string(pixels[i]) + " is neither 0 nor 255");
    const std::size_t r = height - 1 - i / width, c = i % width;
    t.walls[r * width + c] = pixels[i] == 0 ? 1 : 0;
  }

  std::ifstream side(sidecar_path);
  if (!side) throw IoError(sidecar_path, "cannot open track sidecar");
  double res = -1, sx = NAN, sy = NAN, sh = 0;
  std::string key;
  double value = 0;
  while (side >> key >> value) {
    if (key == "resolution") res = value;
    else if (key == "start_x") sx = value;
    else if (key == "start_y") sy = value;
    else if (key == "start_heading") sh = value;
    else throw InvalidArgument(sidecar_path + ": unknown key '" + key + "'");
  }
  detail::require(std::isfinite(res) && res > 0, sidecar_path + ": resolution must be > 0");
  detail::require(std::isfinite(sx) && std::isfinite(sy), sidecar_path + ": start_x and start_y are required");
  t.resolution = res;
  t.start = Pose2D(sx, sy, sh);
  return t;
}

class CarWorld {
 public:
  CarWorld(Track track, const CarConfig& config) : track_(std::move(track)), config_(config), rng_(config.seed) {
    detail::require(track_.rows > 0 && track_.cols > 0 && track_.walls.size() == track_.rows * track_.cols,
                    "track bitmap size does not match rows * cols");
    const auto& v = config.vehicle;
    detail::require(v.v_max > 0 && v.wheelbase > 0 && v.steer_max > 0 && v.dt > 0 && v.accel_max > 0 && v.radius >= 0,
                    "vehicle parameters must be positive");
    detail::require(config.lidar.noise >= 0 && config.lidar.noise < 1, "lidar noise must be in [0, 1)");
    detail::require(config.lidar.max_range > 0, "lidar max range must be > 0");
    detail::require(config.step_cap >= 1, "step cap must be >= 1");
    theta_ = make_theta(config.lidar.beams, config.lidar.fov_degrees, config.lidar.theta_denominator);
    reset(track_.start);
  }

  /// Restarts at `pose` with a fresh noise stream from the configured seed.
  CarStep reset(const Pose2D& pose) {
    detail::require(std::isfinite(pose.x) && std::isfinite(pose.y) && std::isfinite(pose.heading),
                    "reset pose must be finite");
    if (collides(pose)) throw InvalidArgument("reset pose overlaps a wall");
    rng_ = detail::Rng(config_.seed);
    state_ = CarState{pose, 0.0, 0.0, false};
    steps_ = 0;
    done_ = false;
    return observe();
  }

  CarStep reset() { return reset(track_.start); }

  CarStep step(double steering, double throttle) {
    detail::require(std::isfinite(steering) && std::isfinite(throttle), "car action must be finite");
    detail::require(std::abs(steering) <= 1.0 && std::abs(throttle) <= 1.0, "car action must lie in [-1, 1]");
    if (done_) throw InvalidArgument("car episode already finished");
    const auto& v = config_.vehicle;
    const double target = throttle * v.v_max;
    const double dv = std::clamp(target - state_.speed, -v.accel_max * v.dt, v.accel_max * v.dt);
    state_.speed += dv;
    const double yaw_rate = state_.speed / v.wheelbase * std::tan(steering * v.steer_max);
    const double h = state_.pose.heading + yaw_rate * v.dt;
    const double x = state_.pose.x - state_.speed * std::sin(h) * v.dt;
    const double y = state_.pose.y + state_.speed * std::cos(h) * v.dt;
    state_.pose = Pose2D(x, y, h);
    state_.steering = steering;
    state_.collision = collides(state_.pose);
    ++steps_;
    done_ = state_.collision || steps_ >= config_.step_cap;
    return observe();
  }

  /// Noiseless ranges from the current pose.
  std::vector<double> true_ranges() const {
    std::vector<double> out(theta_.angles.size());
    const detail::RayGrid grid{track_.rows, track_.cols, track_.resolution, true};
    const auto wall = [this](std::size_t r, std::size_t c) { return track_.wall(r, c); };
    const Point2 o{state_.pose.x, state_.pose.y};
    const double ch = std::cos(state_.pose.heading), sh = std::sin(state_.pose.heading);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double sx = std::sin(theta_.angles[i]), sy = std::cos(theta_.angles[i]);
      out[i] = detail::cast_ray(grid, o, ch * sx - sh * sy, sh * sx + ch * sy, config_.lidar.max_range, wall,
                                [](const Cell&) {})
                   .range;
    }
    return out;
  }

  bool collides(const Pose2D& p) const {
    const double res = track_.resolution, rad = config_.vehicle.radius;
    const long c0 = static_cast<long>(std::floor((p.x - rad) / res)), c1 = static_cast<long>(std::floor((p.x + rad) / res));
    const long r0 = static_cast<long>(std::floor((p.y - rad) / res)), r1 = static_cast<long>(std::floor((p.y + rad) / res));
    for (long r = r0; r <= r1; ++r)
      for (long c = c0; c <= c1; ++c) {
        const double nx = std::clamp(p.x, c * res, (c + 1) * res), ny = std::clamp(p.y, r * res, (r + 1) * res);
        if (std::hypot(p.x - nx, p.y - ny) > rad) continue;
        if (r < 0 || c < 0 || r >= static_cast<long>(track_.rows) || c >= static_cast<long>(track_.cols)) return true;
        if (track_.wall(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) return true;
      }
    return false;
  }

  const Track& track() const noexcept { return track_; }
  const CarConfig& config() const noexcept { return config_; }
  const CarState& state() const noexcept { return state_; }
  std::size_t steps() const noexcept { return steps_; }
  bool done() const noexcept { return done_; }
  const ThetaVector& theta() const noexcept { return theta_; }

 private:
  // The reset observation carries an all-zero reward.
  CarStep observe() {
    CarStep s;
    const auto truth = true_ranges();
    s.d_min = *std::min_element(truth.begin(), truth.end());
    s.scan.max_range = config_.lidar.max_range;
    s.scan.fov_degrees = config_.lidar.fov_degrees;
    s.scan.ranges.resize(truth.size());
    const double eps = config_.lidar.noise;
    for (std::size_t i = 0; i < truth.size(); ++i) s.scan.ranges[i] = truth[i] * rng_.uniform(1.0 - eps, 1.0 + eps);
    s.pose = state_.pose;
    s.speed = state_.speed;
    if (steps_ > 0) s.reward = car_reward(state_.speed, state_.steering, s.d_min, state_.collision, config_.rewards);
    s.done = done_;
    return s;
  }

  Track track_;
  CarConfig config_;
  detail::Rng rng_;
  ThetaVector theta_;
  CarState state_;
  std::size_t steps_ = 0;
  bool done_ = false;
};

}  // namespace hdogm
