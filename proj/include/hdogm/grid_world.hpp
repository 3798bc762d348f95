#pragma once
// Grid exploration world.
//
// Cell (row r, col c) is the unit square x in [c, c+1], y in [r, r+1]. "Up"
// decreases the row index. The agent starts at (1, 1) inside a 3x3 corner that
// the layout generator keeps clear.
//
// Native observation values: 0 unknown, 0.3 seen empty, 0.6 agent, 1.0 seen
// occupied. A cell counts as explored once it holds a non-zero value.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "hdogm/detail/raycast.hpp"
#include "hdogm/detail/rng.hpp"
#include "hdogm/errors.hpp"
#include "hdogm/geometry.hpp"
#include "hdogm/reward.hpp"
#include "hdogm/scan_pipeline.hpp"

namespace hdogm {

enum class GridAction : int { Up = 0, Down = 1, Left = 2, Right = 3, Stay = 4 };

inline GridAction grid_action_from_code(int code) {
  detail::require(code >= 0 && code <= 4, "grid action code must be 0..4, got " + std::to_string(code));
  return static_cast<GridAction>(code);
}

inline constexpr double kObsUnknown = 0.0;
inline constexpr double kObsEmpty = 0.3;
inline constexpr double kObsAgent = 0.6;
inline constexpr double kObsOccupied = 1.0;

struct GridConfig {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double obstacle_density = 0.2;
  std::size_t ray_count = 32;
  /// Meters; 0 selects max(rows, cols).
  double max_range = 0.0;
  /// 0 selects 4 * rows * cols.
  std::size_t step_cap = 0;
  std::uint64_t seed = 0;
  GridRewardConstants rewards{};

  static GridConfig for_level(int level, std::uint64_t seed = 0) {
    GridConfig c;
    switch (level) {
      case 1: c.rows = c.cols = 20; break;
      case 5: c.rows = c.cols = 30; break;
      case 10: c.rows = c.cols = 40; break;
      default: throw InvalidArgument("grid level must be 1, 5 or 10, got " + std::to_string(level));
    }
    c.seed = seed;
    return c;
  }
};

namespace detail {

inline constexpr std::size_t kStartRegion = 3;

inline bool in_start_region(std::size_t r, std::size_t c) { return r < kStartRegion && c < kStartRegion; }

/// True when every free cell is 4-connected to (1, 1).
inline bool free_space_connected(const std::vector<std::uint8_t>& occ, std::size_t rows, std::size_t cols) {
  std::vector<char> seen(occ.size(), 0);
  std::deque<std::size_t> queue{cols + 1};
  seen[cols + 1] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    ++reached;
    const std::size_t r = i / cols, c = i % cols;
    const auto push = [&](std::size_t j) {
      if (!occ[j] && !seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
    };
    if (r > 0) push(i - cols);
    if (r + 1 < rows) push(i + cols);
    if (c > 0) push(i - 1);
    if (c + 1 < cols) push(i + 1);
  }
  std::size_t free_cells = 0;
  for (auto v : occ) free_cells += v ? 0 : 1;
  return reached == free_cells;
}

}  // namespace detail

/// Random rectangular obstacle blocks (1 to 3 cells per side). The 3x3 start
/// corner stays clear and free space stays 4-connected. The occupied fraction
/// ends in [density, density + 0.05].
inline std::vector<std::uint8_t> random_layout(std::size_t rows, std::size_t cols, double density,
                                               std::uint64_t seed) {
  detail::require(rows >= detail::kStartRegion && cols >= detail::kStartRegion,
                  "layout needs at least 3 rows and 3 columns");
  detail::require(density >= 0.0 && density <= 0.4, "obstacle density must be in [0, 0.4]");
  constexpr int kAttempts = 50;
  const std::size_t n = rows * cols;
  const auto target = static_cast<std::size_t>(std::ceil(density * static_cast<double>(n) - 1e-9));
  const std::size_t ceiling = target + static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(n)));
  detail::Rng rng(seed);

  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::uint8_t> occ(n, 0);
    std::size_t count = 0;
    for (std::size_t tries = 0; count < target && tries < 20 * n; ++tries) {
      const std::size_t h = 1 + rng.below(3), w = 1 + rng.below(3);
      if (h > rows || w > cols) continue;
      const std::size_t r0 = rng.below(rows - h + 1), c0 = rng.below(cols - w + 1);
      std::vector<std::size_t> added;
      bool clash = false;
      for (std::size_t r = r0; r < r0 + h && !clash; ++r)
        for (std::size_t c = c0; c < c0 + w; ++c) {
          if (detail::in_start_region(r, c)) {
            clash = true;
            break;
          }
          if (!occ[r * cols + c]) added.push_back(r * cols + c);
        }
      if (clash || added.empty() || count + added.size() > ceiling) continue;
      for (auto i : added) occ[i] = 1;
      if (!detail::free_space_connected(occ, rows, cols)) {
        for (auto i : added) occ[i] = 0;
        continue;
      }
      count += added.size();
    }
    if (count >= target) return occ;
  }
  throw LayoutGenerationFailure("could not reach obstacle density " + std::to_string(density) + " on a " +
                                std::to_string(rows) + "x" + std::to_string(cols) + " grid after " +
                                std::to_string(kAttempts) + " attempts");
}

struct GridStep {
  PolarScan scan;
  RewardBreakdown reward;
  bool done = false;
  bool valid = true;
};

class GridWorld {
 public:
  explicit GridWorld(const GridConfig& config)
      : GridWorld(config, random_layout(config.rows, config.cols, config.obstacle_density, config.seed)) {}

  /// Custom layout; `occupancy` is row-major with 1 = occupied.
  GridWorld(const GridConfig& config, std::vector<std::uint8_t> occupancy)
      : config_(config), occ_(std::move(occupancy)) {
    detail::require(config.rows >= 2 && config.cols >= 2, "grid must be at least 2x2");
    detail::require(occ_.size() == config.rows * config.cols, "layout size does not match rows * cols");
    detail::require(config.ray_count >= 1, "ray count must be >= 1");
    for (auto& v : occ_) v = v ? 1 : 0;
    if (occ_[config.cols + 1]) throw LayoutGenerationFailure("start cell (1, 1) is occupied");
    max_range_ = config.max_range > 0 ? config.max_range : static_cast<double>(std::max(config.rows, config.cols));
    detail::require(std::isfinite(max_range_), "max range must be finite");
    step_cap_ = config.step_cap > 0 ? config.step_cap : 4 * cell_count();
    theta_ = make_theta(config.ray_count, 360.0);
    reset();
  }

  static GridWorld level(int level, std::uint64_t seed) { return GridWorld(GridConfig::for_level(level, seed)); }

  /// Restores the start state and returns the initial scan. Cells revealed by
  /// it are reported as r_explore so the episode's r_explore sum equals the
  /// explored cell count.
  GridStep reset() {
    obs_.assign(cell_count(), kObsUnknown);
    explored_count_ = 0;
    agent_ = Cell{1, 1};
    steps_ = 0;
    done_ = false;
    bonus_paid_ = false;
    const std::size_t revealed = observe();
    GridStep s;
    s.scan = scan_;
    s.reward.r_explore = static_cast<double>(revealed);
    s.reward.total = s.reward.r_explore;
    if (coverage() >= config_.rewards.bonus_coverage) done_ = true;
    s.done = done_;
    return s;
  }

  GridStep step(int action_code) { return step(grid_action_from_code(action_code)); }

  GridStep step(GridAction action) {
    if (done_) throw InvalidArgument("grid episode already finished");
    long r = static_cast<long>(agent_.row), c = static_cast<long>(agent_.col);
    switch (action) {
      case GridAction::Up: --r; break;
      case GridAction::Down: ++r; break;
      case GridAction::Left: --c; break;
      case GridAction::Right: ++c; break;
      case GridAction::Stay: break;
    }
    ++steps_;
    GridStep s;
    const bool inside = r >= 0 && c >= 0 && r < static_cast<long>(rows()) && c < static_cast<long>(cols());
    if (!inside || occupied(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) {
      s.valid = false;
      s.scan = scan_;
      s.reward = grid_reward(0, false, true, config_.rewards);
    } else {
      obs_[index(agent_)] = kObsEmpty;
      agent_ = Cell{static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
      const std::size_t revealed = observe();
      const bool bonus = !bonus_paid_ && coverage() >= config_.rewards.bonus_coverage;
      bonus_paid_ = bonus_paid_ || bonus;
      s.scan = scan_;
      s.reward = grid_reward(revealed, bonus, false, config_.rewards);
    }
    done_ = coverage() >= config_.rewards.bonus_coverage || steps_ >= step_cap_;
    s.done = done_;
    return s;
  }

  const GridConfig& config() const noexcept { return config_; }
  std::size_t rows() const noexcept { return config_.rows; }
  std::size_t cols() const noexcept { return config_.cols; }
  std::size_t cell_count() const noexcept { return config_.rows * config_.cols; }
  double max_range() const noexcept { return max_range_; }
  std::size_t step_cap() const noexcept { return step_cap_; }
  std::size_t steps() const noexcept { return steps_; }
  bool done() const noexcept { return done_; }
  const Cell& agent() const noexcept { return agent_; }
  Pose2D pose() const { return Pose2D(agent_.col + 0.5, agent_.row + 0.5, 0.0); }
  MapExtent extent() const noexcept {
    return {0.0, static_cast<double>(cols()), 0.0, static_cast<double>(rows())};
  }
  const PolarScan& last_scan() const noexcept { return scan_; }

  bool occupied(std::size_t r, std::size_t c) const { return occ_.at(r * cols() + c) != 0; }
  const std::vector<std::uint8_t>& occupancy() const noexcept { return occ_; }

  /// 0.3 for empty, 1.0 for occupied.
  OccupancyGrid truth() const {
    OccupancyGrid g(rows(), cols(), 1.0, {0.0, 0.0});
    for (std::size_t i = 0; i < occ_.size(); ++i) g.values()[i] = occ_[i] ? kObsOccupied : kObsEmpty;
    return g;
  }

  OccupancyGrid native_observation() const {
    OccupancyGrid g(rows(), cols(), 1.0, {0.0, 0.0});
    g.values() = obs_;
    return g;
  }

  bool explored(std::size_t r, std::size_t c) const { return obs_.at(r * cols() + c) != kObsUnknown; }
  std::size_t explored_count() const noexcept { return explored_count_; }
  double coverage() const noexcept {
    return static_cast<double>(explored_count_) / static_cast<double>(cell_count());
  }

  /// Scan from the current cell center without touching the observation.
  PolarScan raycast() const {
    return cast([](const Cell&) {}, [](const Cell&) {});
  }

 private:
  std::size_t index(const Cell& c) const noexcept { return c.row * cols() + c.col; }

  template <class OnFree, class OnHit>
  PolarScan cast(OnFree&& on_free, OnHit&& on_hit) const {
    PolarScan scan;
    scan.max_range = max_range_;
    scan.fov_degrees = 360.0;
    scan.ranges.resize(theta_.angles.size());
    const detail::RayGrid grid{rows(), cols(), 1.0, false};
    const Point2 origin{agent_.col + 0.5, agent_.row + 0.5};
    const auto occ = [this](std::size_t r, std::size_t c) { return occ_[r * cols() + c] != 0; };
    for (std::size_t i = 0; i < theta_.angles.size(); ++i) {
      const double a = theta_.angles[i];
      const auto hit = detail::cast_ray(grid, origin, std::sin(a), std::cos(a), max_range_, occ, on_free);
      scan.ranges[i] = hit.range;
      if (hit.cell) on_hit(*hit.cell);
    }
    return scan;
  }

  std::size_t observe() {
    const std::size_t before = explored_count_;
    const auto mark = [this](const Cell& c, double v) {
      double& o = obs_[index(c)];
      if (o == kObsUnknown) ++explored_count_;
      o = v;
    };
    scan_ = cast([&](const Cell& c) { mark(c, kObsEmpty); }, [&](const Cell& c) { mark(c, kObsOccupied); });
    mark(agent_, kObsAgent);
    return explored_count_ - before;
  }

  GridConfig config_;
  std::vector<std::uint8_t> occ_;
  std::vector<double> obs_;
  std::size_t explored_count_ = 0;
  Cell agent_{1, 1};
  std::size_t steps_ = 0;
  std::size_t step_cap_ = 0;
  bool done_ = false;
  bool bonus_paid_ = false;
  double max_range_ = 0.0;
  ThetaVector theta_;
  PolarScan scan_;
};

}  // namespace hdogm
