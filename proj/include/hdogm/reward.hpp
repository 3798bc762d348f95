#pragma once
// Reward pieces for both simulators. Unused pieces stay 0.

#include <cmath>
#include <cstddef>

namespace hdogm {

struct RewardBreakdown {
  // Grid exploration.
  double r_explore = 0.0;
  double r_move = 0.0;
  double r_bonus = 0.0;
  double r_invalid = 0.0;
  // Racetrack.
  double r_velocity = 0.0;
  double r_steering = 0.0;
  double r_obstacle = 0.0;
  double r_collision = 0.0;

  double total = 0.0;

  RewardBreakdown& operator+=(const RewardBreakdown& o) {
    r_explore += o.r_explore;
    r_move += o.r_move;
    r_bonus += o.r_bonus;
    r_invalid += o.r_invalid;
    r_velocity += o.r_velocity;
    r_steering += o.r_steering;
    r_obstacle += o.r_obstacle;
    r_collision += o.r_collision;
    total += o.total;
    return *this;
  }
};

struct GridRewardConstants {
  double move_penalty = 0.5;
  double bonus = 100.0;
  double invalid_penalty = 100.0;
  double bonus_coverage = 0.95;
};

/// An invalid move overrides every other piece. Otherwise
/// total = (r_explore + r_move) + r_bonus.
inline RewardBreakdown grid_reward(std::size_t newly_explored, bool reached_bonus, bool invalid,
                                   const GridRewardConstants& k = {}) {
  RewardBreakdown r;
  if (invalid) {
    r.r_invalid = -k.invalid_penalty;
    r.total = r.r_invalid;
    return r;
  }
  r.r_explore = static_cast<double>(newly_explored);
  r.r_move = -k.move_penalty;
  r.r_bonus = reached_bonus ? k.bonus : 0.0;
  r.total = r.r_explore + r.r_move + r.r_bonus;
  return r;
}

struct CarRewardConstants {
  double v_target = 3.5;        // lambda0
  double v_floor = 0.1;         // lambda1
  double steer_scale = 15.0;    // lambda2
  double steer_divisor = 5.0;   // lambda3
  double steer_deadband = 0.08; // lambda4
  double steer_bonus = 0.1;
  double obstacle_offset = 0.4;
  double collision_penalty = 100.0;
  /// Penalize -|delta|/lambda2 instead of the signed -delta/lambda2.
  bool abs_steering_penalty = false;
};

/// total = ((r_velocity + r_steering) + r_obstacle) + r_collision.
/// `steering` is the normalized command in [-1, 1].
inline RewardBreakdown car_reward(double speed, double steering, double d_min, bool collision,
                                  const CarRewardConstants& k = {}) {
  RewardBreakdown r;
  r.r_velocity = speed > k.v_floor ? speed / k.v_target : -1.0;
  if (std::abs(steering / k.steer_divisor) < k.steer_deadband)
    r.r_steering = k.steer_bonus;
  else
    r.r_steering = -(k.abs_steering_penalty ? std::abs(steering) : steering) / k.steer_scale;
  r.r_obstacle = d_min - k.obstacle_offset;
  r.r_collision = collision ? -k.collision_penalty : 0.0;
  r.total = r.r_velocity + r.r_steering + r.r_obstacle + r.r_collision;
  return r;
}

}  // namespace hdogm
