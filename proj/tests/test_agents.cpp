#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hdogm/agents.hpp"
#include "hdogm/car_world.hpp"

using namespace hdogm;

namespace {

constexpr CellClass F = CellClass::Free, O = CellClass::Occupied, U = CellClass::Unknown;

// Follows the frontier agent's moves until it reports completion, returning
// every visited cell.
std::vector<Cell> walk(std::vector<CellClass> cells, std::size_t rows, std::size_t cols, Cell at) {
  std::vector<Cell> path{at};
  for (int guard = 0; guard < 1000; ++guard) {
    const auto d = frontier_action(cells, rows, cols, at);
    if (d.exploration_complete) break;
    switch (d.action) {
      case GridAction::Up: --at.row; break;
      case GridAction::Down: ++at.row; break;
      case GridAction::Left: --at.col; break;
      case GridAction::Right: ++at.col; break;
      case GridAction::Stay: break;
    }
    path.push_back(at);
    // Reveal the neighbourhood as a sensor would, never turning walls free.
    for (long dr = -1; dr <= 1; ++dr)
      for (long dc = -1; dc <= 1; ++dc) {
        const long r = static_cast<long>(at.row) + dr, c = static_cast<long>(at.col) + dc;
        if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols)) continue;
        auto& v = cells[r * cols + c];
        if (v == U) v = F;
      }
  }
  return path;
}

PolarScan uniform_scan(const ThetaVector& theta, double range) {
  PolarScan s;
  s.ranges.assign(theta.angles.size(), range);
  return s;
}

ThetaVector lidar_theta() { return make_theta(1080, 273.5); }

}  // namespace

TEST(Frontier, OneCellRightGivesRight) {
  // Agent on the left edge; the middle column borders the unknown right column.
  const std::vector<CellClass> cells = {F, F, U,  //
                                        F, F, U,  //
                                        F, F, U};
  const auto d = frontier_action(cells, 3, 3, {1, 0});
  EXPECT_FALSE(d.exploration_complete);
  EXPECT_EQ(d.action, GridAction::Right);
}

TEST(Frontier, TieBreaksUpBeforeDown) {
  const std::vector<CellClass> cells = {U, F, U,  //
                                        F, F, F,  //
                                        U, F, U};
  EXPECT_EQ(frontier_action(cells, 3, 3, {1, 1}).action, GridAction::Up);
}

TEST(Frontier, FullyExploredSignalsComplete) {
  const std::vector<CellClass> cells(9, F);
  const auto d = frontier_action(cells, 3, 3, {1, 1});
  EXPECT_TRUE(d.exploration_complete);
  EXPECT_EQ(d.action, GridAction::Stay);
}

TEST(Frontier, WalledOffUnknownIsComplete) {
  const std::vector<CellClass> cells = {F, O, U,  //
                                        F, O, U,  //
                                        F, O, U};
  EXPECT_TRUE(frontier_action(cells, 3, 3, {1, 0}).exploration_complete);
}

TEST(Frontier, RoutesAroundWalls) {
  // Frontier is directly right but the wall forces a detour through the top.
  const std::vector<CellClass> cells = {F, F, F, F,  //
                                        F, O, F, U,  //
                                        F, O, F, U};
  const auto d = frontier_action(cells, 3, 4, {2, 0});
  EXPECT_EQ(d.action, GridAction::Up);
}

TEST(Frontier, PathNeverCrossesOccupied) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 9, cols = 11;
    std::vector<CellClass> cells(rows * cols, U);
    for (auto& c : cells)
      if (rng() % 5 == 0) c = O;
    cells[0] = F;
    for (const auto& p : walk(cells, rows, cols, {0, 0})) EXPECT_NE(cells[p.row * cols + p.col], O);
  }
}

TEST(Frontier, RejectsShapeMismatch) {
  EXPECT_THROW(frontier_action(std::vector<CellClass>(8, F), 3, 3, {0, 0}), InvalidArgument);
  EXPECT_THROW(frontier_action(std::vector<CellClass>(9, F), 3, 3, {3, 0}), InvalidArgument);
}

TEST(Classify, ScaledThresholds) {
  OccupancyGrid g(1, 6, 1.0, {0.0, 0.0});
  const double v[] = {0.0, 0.15, 0.2, 0.35, 0.5, 1.0};
  for (std::size_t i = 0; i < 6; ++i) g.at(0, i) = v[i];
  const auto c = classify_scaled(g);
  EXPECT_EQ(c[0], F);
  EXPECT_EQ(c[1], F);
  EXPECT_EQ(c[2], U);
  EXPECT_EQ(c[3], O);
  EXPECT_EQ(c[4], O);
  EXPECT_EQ(c[5], F);
}

TEST(Classify, NativeCodes) {
  OccupancyGrid g(1, 4, 1.0, {0.0, 0.0});
  g.at(0, 0) = kObsUnknown;
  g.at(0, 1) = kObsEmpty;
  g.at(0, 2) = kObsAgent;
  g.at(0, 3) = kObsOccupied;
  const auto c = classify_native(g);
  EXPECT_EQ(c[0], U);
  EXPECT_EQ(c[1], F);
  EXPECT_EQ(c[2], F);
  EXPECT_EQ(c[3], O);
}

TEST(Frontier, ExploresOpenWorld) {
  GridConfig cfg;
  cfg.obstacle_density = 0.0;
  GridWorld w(cfg);
  w.reset();
  while (!w.done()) {
    const auto d = frontier_action(classify_native(w.native_observation()), w.rows(), w.cols(), w.agent());
    if (d.exploration_complete) break;
    w.step(d.action);
  }
  EXPECT_GE(w.coverage(), 0.95);
  EXPECT_LT(w.steps(), w.step_cap());
}

TEST(WallFollow, SymmetricCorridorSteersStraight) {
  const auto theta = lidar_theta();
  const auto cmd = wall_follow_action(uniform_scan(theta, 1.0), theta);
  EXPECT_NEAR(cmd.steering, 0.0, 1e-12);
}

TEST(WallFollow, CloseRightWallSteersLeft) {
  const auto theta = lidar_theta();
  auto scan = uniform_scan(theta, 1.0);
  for (std::size_t i = 0; i < theta.angles.size(); ++i)
    if (theta.angles[i] > 0.0) scan.ranges[i] = 0.3;
  EXPECT_GT(wall_follow_action(scan, theta).steering, 0.0);
}

TEST(WallFollow, OutputsClamped) {
  const auto theta = lidar_theta();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  WallFollowParams p;
  p.kp = 50.0;
  p.cruise = 3.0;
  for (int trial = 0; trial < 200; ++trial) {
    PolarScan s;
    for (std::size_t i = 0; i < theta.angles.size(); ++i) s.ranges.push_back(u(rng));
    const auto cmd = wall_follow_action(s, theta, p);
    EXPECT_LE(std::abs(cmd.steering), 1.0);
    EXPECT_LE(std::abs(cmd.throttle), 1.0);
  }
}

TEST(WallFollow, RangeNearAveragesWindow) {
  const auto theta = lidar_theta();
  PolarScan s;
  for (std::size_t i = 0; i < theta.angles.size(); ++i) s.ranges.push_back(static_cast<double>(i));
  // Center beam index 540 sits at bearing ~0; a symmetric window averages to it.
  EXPECT_NEAR(range_near(s, theta, theta.angles[540], 5), 540.0, 1e-12);
  EXPECT_NEAR(range_near(s, theta, theta.angles[0], 5), 2.5, 1e-12);
}
