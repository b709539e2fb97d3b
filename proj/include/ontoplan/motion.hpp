#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ontoplan/geometry.hpp"

namespace ontoplan {

struct MotionQuery {
  Vec2 start{0, 0};
  Vec2 goal{0, 0};
  Vec2 half_extents{0.01, 0.01};  // moving gripper(+held object) AABB
  std::vector<Box2> obstacles;
  Box2 bounds;
  unsigned seed = 0;
  double step = 0.05;
  int max_iterations = 5000;
  double goal_tolerance = 0.01;
  double inflation = 0.005;  // obstacle inflation for collision tests
};

struct Trajectory {
  std::vector<Vec2> waypoints;  // consecutive spacing <= step
  double length = 0.0;
};

enum class MotionFailureReason { GoalInCollision, StartInCollision, IterationLimit };

struct MotionFailure {
  MotionFailureReason reason;
};

using MotionResult = std::variant<Trajectory, MotionFailure>;

std::string to_string(MotionFailureReason reason);

// Inflated-AABB collision test for the moving footprint centered at p.
bool config_free(const MotionQuery& q, const Vec2& p);

// Dense sampling along [a, b] at the given resolution, endpoints included.
bool segment_free(const MotionQuery& q, const Vec2& a, const Vec2& b,
                  double resolution);

// Bidirectional RRT-Connect with greedy connect, uniform sampling with 5%
// bias toward the opposite tree root, shortcut smoothing, and waypoint
// re-densification. Deterministic for a fixed query (including seed).
MotionResult plan_motion(const MotionQuery& q);

// Random-pair shortcut smoothing; output is collision-free and no longer
// than the input.
Trajectory shortcut(const Trajectory& input, const MotionQuery& q,
                    std::mt19937_64& rng);

}  // namespace ontoplan
