#include "ontoplan/motion.hpp"

#include <algorithm>
#include <cmath>

namespace ontoplan {

namespace {

constexpr double kCheckDivisor = 8.0;  // segment check resolution = step / 8

struct Node {
  Vec2 q;
  int parent;
};

double segment_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

int nearest(const std::vector<Node>& tree, const Vec2& q) {
  int best = 0;
  double best_d = (tree[0].q - q).squaredNorm();
  for (size_t i = 1; i < tree.size(); ++i) {
    const double d = (tree[i].q - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

enum class ExtendResult { Trapped, Advanced, Reached };

ExtendResult extend(const MotionQuery& q, std::vector<Node>& tree, const Vec2& target,
                    int& new_index) {
  const int near = nearest(tree, target);
  const Vec2 from = tree[near].q;
  const Vec2 delta = target - from;
  const double dist = delta.norm();
  if (dist < 1e-12) {
    new_index = near;
    return ExtendResult::Reached;
  }
  const Vec2 to = dist <= q.step ? target : Vec2(from + delta * (q.step / dist));
  if (!segment_free(q, from, to, q.step / kCheckDivisor)) return ExtendResult::Trapped;
  tree.push_back({to, near});
  new_index = static_cast<int>(tree.size()) - 1;
  return dist <= q.step ? ExtendResult::Reached : ExtendResult::Advanced;
}

std::vector<Vec2> chain_to_root(const std::vector<Node>& tree, int index) {
  std::vector<Vec2> out;
  for (int i = index; i >= 0; i = tree[i].parent) out.push_back(tree[i].q);
  return out;  // index -> root
}

std::vector<Vec2> densify(const std::vector<Vec2>& pts, double step) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  out.push_back(pts.front());
  for (size_t i = 1; i < pts.size(); ++i) {
    const Vec2 a = pts[i - 1];
    const Vec2 b = pts[i];
    const double d = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(d / step)));
    for (int k = 1; k <= n; ++k) out.push_back(a + (b - a) * (double(k) / n));
  }
  return out;
}

}  // namespace

std::string to_string(MotionFailureReason reason) {
  switch (reason) {
    case MotionFailureReason::GoalInCollision:
      return "goal position is in collision";
    case MotionFailureReason::StartInCollision:
      return "start position is in collision";
    case MotionFailureReason::IterationLimit:
      return "no collision-free path found within the iteration limit";
  }
  return "unknown motion failure";
}

bool config_free(const MotionQuery& q, const Vec2& p) {
  const Box2 mover = box_at(p, q.half_extents);
  if (!contains_box(q.bounds, mover)) return false;
  for (const Box2& obs : q.obstacles)
    if (overlaps_open(mover, inflate(obs, q.inflation))) return false;
  return true;
}

bool segment_free(const MotionQuery& q, const Vec2& a, const Vec2& b,
                  double resolution) {
  const double d = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(d / resolution)));
  for (int k = 0; k <= n; ++k) {
    if (!config_free(q, a + (b - a) * (double(k) / n))) return false;
  }
  return true;
}

Trajectory shortcut(const Trajectory& input, const MotionQuery& q,
                    std::mt19937_64& rng) {
  std::vector<Vec2> pts = input.waypoints;
  if (pts.size() >= 3) {
    const int attempts = 150;
    for (int a = 0; a < attempts && pts.size() >= 3; ++a) {
      std::uniform_int_distribution<size_t> dist(0, pts.size() - 1);
      size_t i = dist(rng);
      size_t j = dist(rng);
      if (i > j) std::swap(i, j);
      if (j - i < 2) continue;
      if (!segment_free(q, pts[i], pts[j], q.step / kCheckDivisor)) continue;
      pts.erase(pts.begin() + i + 1, pts.begin() + j);
    }
  }
  pts = densify(pts, q.step);
  Trajectory out;
  out.waypoints = std::move(pts);
  out.length = segment_length(out.waypoints);
  return out;
}

MotionResult plan_motion(const MotionQuery& q) {
  if (!config_free(q, q.start))
    return MotionFailure{MotionFailureReason::StartInCollision};
  if (!config_free(q, q.goal))
    return MotionFailure{MotionFailureReason::GoalInCollision};

  if ((q.goal - q.start).norm() <= q.goal_tolerance)
    return Trajectory{{q.start}, 0.0};

  std::mt19937_64 rng(q.seed);
  std::uniform_real_distribution<double> ux(q.bounds.min().x(), q.bounds.max().x());
  std::uniform_real_distribution<double> uy(q.bounds.min().y(), q.bounds.max().y());
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<Node> start_tree{{q.start, -1}};
  std::vector<Node> goal_tree{{q.goal, -1}};
  std::vector<Node>* a = &start_tree;
  std::vector<Node>* b = &goal_tree;
  bool a_is_start = true;

  for (int iter = 0; iter < q.max_iterations; ++iter) {
    // 5% bias toward the opposite tree's root.
    const Vec2 target =
        coin(rng) < 0.05 ? (*b)[0].q : Vec2(ux(rng), uy(rng));

    int new_a = -1;
    if (extend(q, *a, target, new_a) != ExtendResult::Trapped && new_a >= 0) {
      const Vec2 bridge = (*a)[new_a].q;
      // Greedy connect from the other tree.
      int new_b = -1;
      ExtendResult r = ExtendResult::Advanced;
      while (r == ExtendResult::Advanced) r = extend(q, *b, bridge, new_b);
      if (r == ExtendResult::Reached && new_b >= 0) {
        std::vector<Vec2> from_a = chain_to_root(*a, new_a);   // bridge -> a root
        std::vector<Vec2> from_b = chain_to_root(*b, new_b);   // bridge -> b root
        std::reverse(from_a.begin(), from_a.end());            // a root -> bridge
        std::vector<Vec2> path = std::move(from_a);
        path.insert(path.end(), from_b.begin() + 1, from_b.end());  // ... -> b root
        if (!a_is_start) std::reverse(path.begin(), path.end());

        Trajectory raw;
        raw.waypoints = std::move(path);
        raw.length = segment_length(raw.waypoints);
        return shortcut(raw, q, rng);
      }
    }
    std::swap(a, b);
    a_is_start = !a_is_start;
  }
  return MotionFailure{MotionFailureReason::IterationLimit};
}

}  // namespace ontoplan
