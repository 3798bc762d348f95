#pragma once
// Scripted agents that stand in for trained policies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <numbers>
#include <vector>

#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"
#include "hdogm/grid_world.hpp"
#include "hdogm/scan_pipeline.hpp"

namespace hdogm {

enum class CellClass : std::uint8_t { Free, Occupied, Unknown };

/// Native grid observation: 0 unknown, 1.0 occupied, anything else free.
inline std::vector<CellClass> classify_native(const OccupancyGrid& obs) {
  std::vector<CellClass> out(obs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = obs.values()[i];
    out[i] = v == kObsUnknown ? CellClass::Unknown : v == kObsOccupied ? CellClass::Occupied : CellClass::Free;
  }
  return out;
}

struct FrontierThresholds {
  double free_below = 0.15;
  double occupied_above = 0.35;
};

/// Mapper observation scaled to [0, 0.5] with the agent cell at 1.0.
inline std::vector<CellClass> classify_scaled(const OccupancyGrid& obs, const FrontierThresholds& t = {}) {
  std::vector<CellClass> out(obs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = obs.values()[i];
    if (v == 1.0 || v <= t.free_below)
      out[i] = CellClass::Free;
    else if (v >= t.occupied_above)
      out[i] = CellClass::Occupied;
    else
      out[i] = CellClass::Unknown;
  }
  return out;
}

struct FrontierDecision {
  GridAction action = GridAction::Stay;
  bool exploration_complete = false;
};

/// Breadth-first search through free cells to the nearest free cell, other
/// than the agent's own, with an unknown 4-neighbour; returns the first move on
/// that path. Neighbours are expanded up, down, left, right, which also breaks
/// ties. With no reachable frontier the decision is Stay with
/// `exploration_complete` set.
inline FrontierDecision frontier_action(const std::vector<CellClass>& cells, std::size_t rows, std::size_t cols,
                                        const Cell& agent) {
  detail::require(cells.size() == rows * cols, "frontier: cell classes do not match grid shape");
  detail::require(agent.row < rows && agent.col < cols, "frontier: agent outside the grid");
  constexpr long dr[] = {-1, 1, 0, 0};
  constexpr long dc[] = {0, 0, -1, 1};
  constexpr GridAction moves[] = {GridAction::Up, GridAction::Down, GridAction::Left, GridAction::Right};
  const auto inside = [&](long r, long c) {
    return r >= 0 && c >= 0 && r < static_cast<long>(rows) && c < static_cast<long>(cols);
  };
  const auto is_frontier = [&](std::size_t i) {
    const long r = static_cast<long>(i / cols), c = static_cast<long>(i % cols);
    for (int k = 0; k < 4; ++k)
      if (inside(r + dr[k], c + dc[k]) && cells[(r + dr[k]) * cols + (c + dc[k])] == CellClass::Unknown) return true;
    return false;
  };

  const std::size_t start = agent.row * cols + agent.col;
  // First move taken from the start to reach each cell; -1 = unvisited.
  std::vector<int> first(cells.size(), -1);
  std::deque<std::size_t> queue;
  first[start] = 4;
  queue.push_back(start);
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const long r = static_cast<long>(i / cols), c = static_cast<long>(i % cols);
    for (int k = 0; k < 4; ++k) {
      const long nr = r + dr[k], nc = c + dc[k];
      if (!inside(nr, nc)) continue;
      const std::size_t j = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
      if (first[j] != -1 || cells[j] != CellClass::Free) continue;
      first[j] = i == start ? k : first[i];
      if (is_frontier(j)) return {moves[first[j]], false};
      queue.push_back(j);
    }
  }
  return {GridAction::Stay, true};
}

struct WallFollowParams {
  double kp = 1.0;
  /// Desired right-side range, meters. Anything above half the corridor
  /// width makes the controller hold the centerline.
  double target = 10.0;
  /// Constant throttle command in [-1, 1].
  double cruise = 0.5;
  /// Bearing of the side beams off the forward axis. Beams angled forward
  /// see corners before the car reaches them.
  double side_angle = 1.0;
  /// Beams averaged on each side of the chosen bearing.
  std::size_t window = 5;
};

struct CarCommand {
  double steering = 0.0;
  double throttle = 0.0;
};

/// Mean range over the beams within `window` of the one nearest `bearing`.
inline double range_near(const PolarScan& scan, const ThetaVector& theta, double bearing, std::size_t window) {
  detail::require(scan.ranges.size() == theta.angles.size() && !scan.ranges.empty(),
                  "range_near: scan and angles differ in length");
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.angles.size(); ++i)
    if (std::abs(theta.angles[i] - bearing) < std::abs(theta.angles[best] - bearing)) best = i;
  const std::size_t lo = best >= window ? best - window : 0;
  const std::size_t hi = std::min(scan.ranges.size() - 1, best + window);
  double sum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) sum += scan.ranges[i];
  return sum / static_cast<double>(hi - lo + 1);
}

/// steering = kp * (min(target, (left + right) / 2) - right), clamped to [-1, 1].
inline CarCommand wall_follow_action(const PolarScan& scan, const ThetaVector& theta, const WallFollowParams& p = {}) {
  const double right = range_near(scan, theta, p.side_angle, p.window);
  const double left = range_near(scan, theta, -p.side_angle, p.window);
  const double steer = p.kp * (std::min(p.target, 0.5 * (left + right)) - right);
  return {std::clamp(steer, -1.0, 1.0), std::clamp(p.cruise, -1.0, 1.0)};
}

}  // namespace hdogm
