#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ontoplan/motion.hpp"

using namespace ontoplan;

namespace {

MotionQuery base_query() {
  MotionQuery q;
  q.bounds = Box2(Vec2(0, 0), Vec2(1, 1));
  q.start = Vec2(0.1, 0.1);
  q.goal = Vec2(0.9, 0.9);
  q.half_extents = Vec2(0.02, 0.02);
  q.seed = 42;
  return q;
}

MotionQuery random_scatter_query(std::mt19937_64& rng, int obstacles) {
  MotionQuery q = base_query();
  std::uniform_real_distribution<double> pos(0.15, 0.85);
  std::uniform_real_distribution<double> size(0.03, 0.12);
  for (int i = 0; i < obstacles; ++i) {
    const Vec2 c(pos(rng), pos(rng));
    const Vec2 h(size(rng), size(rng));
    q.obstacles.push_back(box_at(c, h));
  }
  q.seed = static_cast<unsigned>(rng());
  return q;
}

}  // namespace

TEST_CASE("free space yields a near-straight path") {
  const MotionQuery q = base_query();
  const MotionResult result = plan_motion(q);
  REQUIRE(std::holds_alternative<Trajectory>(result));
  const Trajectory& traj = std::get<Trajectory>(result);
  const double euclid = (q.goal - q.start).norm();
  CHECK(traj.length <= 1.5 * euclid);
  CHECK(traj.waypoints.front() == q.start);
  CHECK((traj.waypoints.back() - q.goal).norm() <= q.goal_tolerance);
  CHECK(testutil::dense_recheck(traj, q));
}

TEST_CASE("colliding endpoints are reported as such") {
  MotionQuery q = base_query();
  q.obstacles.push_back(box_at(q.goal, Vec2(0.05, 0.05)));
  auto result = plan_motion(q);
  REQUIRE(std::holds_alternative<MotionFailure>(result));
  CHECK(std::get<MotionFailure>(result).reason == MotionFailureReason::GoalInCollision);

  MotionQuery q2 = base_query();
  q2.obstacles.push_back(box_at(q2.start, Vec2(0.05, 0.05)));
  result = plan_motion(q2);
  REQUIRE(std::holds_alternative<MotionFailure>(result));
  CHECK(std::get<MotionFailure>(result).reason == MotionFailureReason::StartInCollision);
}

TEST_CASE("a full wall exhausts the iteration budget") {
  MotionQuery q = base_query();
  // Wall across the whole workspace between start and goal.
  q.obstacles.push_back(Box2(Vec2(0.45, -0.1), Vec2(0.55, 1.1)));
  REQUIRE_FALSE(testutil::grid_bfs_feasible(q));
  const auto result = plan_motion(q);
  REQUIRE(std::holds_alternative<MotionFailure>(result));
  CHECK(std::get<MotionFailure>(result).reason == MotionFailureReason::IterationLimit);
}

TEST_CASE("trivial queries return a single waypoint") {
  MotionQuery q = base_query();
  q.goal = q.start;
  const auto result = plan_motion(q);
  REQUIRE(std::holds_alternative<Trajectory>(result));
  CHECK(std::get<Trajectory>(result).waypoints.size() == 1);
  CHECK(std::get<Trajectory>(result).length == 0.0);
}

TEST_CASE("shortcutting never lengthens and keeps paths collision-free") {
  MotionQuery q = base_query();
  std::mt19937_64 rng(1);

  Trajectory zigzag;
  zigzag.waypoints = {Vec2(0.1, 0.1), Vec2(0.1, 0.8), Vec2(0.3, 0.1),
                      Vec2(0.5, 0.8), Vec2(0.9, 0.9)};
  double len = 0;
  for (size_t i = 1; i < zigzag.waypoints.size(); ++i)
    len += (zigzag.waypoints[i] - zigzag.waypoints[i - 1]).norm();
  zigzag.length = len;

  const Trajectory smooth = shortcut(zigzag, q, rng);
  CHECK(smooth.length < zigzag.length);
  CHECK(testutil::dense_recheck(smooth, q));
  CHECK(smooth.waypoints.front() == zigzag.waypoints.front());
  CHECK(smooth.waypoints.back() == zigzag.waypoints.back());

  Trajectory single;
  single.waypoints = {Vec2(0.1, 0.1), Vec2(0.14, 0.1)};
  single.length = 0.04;
  const Trajectory same = shortcut(single, q, rng);
  CHECK(same.length == doctest::Approx(single.length));
}

TEST_CASE("an L-path around a wall stays collision-free after shortcutting") {
  MotionQuery q = base_query();
  q.obstacles.push_back(Box2(Vec2(0.4, 0.0), Vec2(0.6, 0.8)));
  const auto result = plan_motion(q);
  REQUIRE(std::holds_alternative<Trajectory>(result));
  CHECK(testutil::dense_recheck(std::get<Trajectory>(result), q));
}

TEST_CASE("plans are deterministic under a fixed seed") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 10; ++round) {
    const MotionQuery q = random_scatter_query(rng, 5);
    const auto a = plan_motion(q);
    const auto b = plan_motion(q);
    REQUIRE(a.index() == b.index());
    if (std::holds_alternative<Trajectory>(a)) {
      CHECK(std::get<Trajectory>(a).waypoints == std::get<Trajectory>(b).waypoints);
      CHECK(std::get<Trajectory>(a).length == std::get<Trajectory>(b).length);
    }
  }
}

TEST_CASE("returned trajectories obey spacing, length and soundness invariants") {
  std::mt19937_64 rng(7);
  int successes = 0;
  for (int round = 0; round < 40; ++round) {
    const MotionQuery q = random_scatter_query(rng, 6);
    if (!testutil::grid_bfs_feasible(q)) continue;
    const auto result = plan_motion(q);
    if (!std::holds_alternative<Trajectory>(result)) continue;
    ++successes;
    const Trajectory& traj = std::get<Trajectory>(result);

    double total = 0;
    for (size_t i = 1; i < traj.waypoints.size(); ++i) {
      const double d = (traj.waypoints[i] - traj.waypoints[i - 1]).norm();
      CHECK(d <= q.step + 1e-9);
      total += d;
    }
    CHECK(traj.length == doctest::Approx(total).epsilon(1e-6));
    CHECK(testutil::dense_recheck(traj, q));
    CHECK((traj.waypoints.back() - q.goal).norm() <= q.goal_tolerance);
  }
  CHECK(successes > 20);
}
