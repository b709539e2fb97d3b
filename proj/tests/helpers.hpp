#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "ontoplan/motion.hpp"
#include "ontoplan/ontology.hpp"
#include "ontoplan/plan.hpp"
#include "ontoplan/world.hpp"

namespace testutil {

inline std::string data_dir() { return ONTOPLAN_DATA_DIR; }

inline const ontoplan::KnowledgeBase& kitchen_kb() {
  static const ontoplan::KnowledgeBase kb =
      ontoplan::KnowledgeBase::load_file(data_dir() + "/kitchen.nt");
  return kb;
}

inline ontoplan::Scene scene(const std::string& id) {
  return ontoplan::load_scene_file(data_dir() + "/scenes/" + id + ".json");
}

// ---------------------------------------------------------------------------
// Brute-force ordering oracle: enumerate every permutation of the mention
// list, keep those satisfying all pairwise priority constraints (a before b
// whenever priority(a) < priority(b)), and return the lexicographically first
// by mention index. Independent of the guidance implementation.
inline std::vector<std::string> permutation_order_oracle(
    const std::vector<std::string>& objects,
    const std::function<long(const std::string&)>& priority_of) {
  const size_t n = objects.size();
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;

  std::vector<long> prio(n);
  for (size_t i = 0; i < n; ++i) prio[i] = priority_of(objects[i]);

  std::optional<std::vector<size_t>> best;
  std::vector<size_t> perm = idx;
  std::sort(perm.begin(), perm.end());
  do {
    bool ok = true;
    for (size_t a = 0; a < n && ok; ++a) {
      for (size_t b = a + 1; b < n && ok; ++b) {
        // perm[a] is placed before perm[b]; constraint violated when the
        // later one has strictly higher priority (smaller number).
        if (prio[perm[b]] < prio[perm[a]]) ok = false;
      }
    }
    if (!ok) continue;
    if (!best || perm < *best) best = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::string> out;
  for (size_t i : *best) out.push_back(objects[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Independent collision model for re-checking trajectories (deliberately not
// reusing ontoplan::config_free).
inline bool aabb_hit(const ontoplan::Vec2& center, const ontoplan::Vec2& half,
                     const ontoplan::Box2& obstacle, double inflation) {
  const double eps = 1e-9;
  return center.x() - half.x() < obstacle.max().x() + inflation - eps &&
         obstacle.min().x() - inflation < center.x() + half.x() - eps &&
         center.y() - half.y() < obstacle.max().y() + inflation - eps &&
         obstacle.min().y() - inflation < center.y() + half.y() - eps;
}

inline bool dense_recheck(const ontoplan::Trajectory& traj,
                          const ontoplan::MotionQuery& q) {
  if (traj.waypoints.empty()) return false;
  auto free_at = [&](const ontoplan::Vec2& p) {
    if (p.x() - q.half_extents.x() < q.bounds.min().x() - 1e-9 ||
        p.y() - q.half_extents.y() < q.bounds.min().y() - 1e-9 ||
        p.x() + q.half_extents.x() > q.bounds.max().x() + 1e-9 ||
        p.y() + q.half_extents.y() > q.bounds.max().y() + 1e-9)
      return false;
    for (const ontoplan::Box2& obs : q.obstacles)
      if (aabb_hit(p, q.half_extents, obs, q.inflation)) return false;
    return true;
  };
  if (traj.waypoints.size() == 1) return free_at(traj.waypoints.front());

  const double resolution = q.step / 8.0;
  for (size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
    const ontoplan::Vec2 a = traj.waypoints[i];
    const ontoplan::Vec2 b = traj.waypoints[i + 1];
    const double d = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(d / resolution)));
    for (int k = 0; k <= n; ++k)
      if (!free_at(a + (b - a) * (double(k) / n))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Grid BFS feasibility oracle at resolution step/2 over the query bounds,
// 4-connected, cells tested at their centers with the same inflated-AABB
// rule (reimplemented here).
inline bool grid_bfs_feasible(const ontoplan::MotionQuery& q) {
  const double cell = q.step / 2.0;
  const auto size = q.bounds.sizes();
  const int nx = std::max(1, static_cast<int>(std::floor(size.x() / cell)));
  const int ny = std::max(1, static_cast<int>(std::floor(size.y() / cell)));

  auto center = [&](int ix, int iy) {
    return ontoplan::Vec2(q.bounds.min().x() + (ix + 0.5) * cell,
                          q.bounds.min().y() + (iy + 0.5) * cell);
  };
  auto free_at = [&](const ontoplan::Vec2& p) {
    if (p.x() - q.half_extents.x() < q.bounds.min().x() - 1e-9 ||
        p.y() - q.half_extents.y() < q.bounds.min().y() - 1e-9 ||
        p.x() + q.half_extents.x() > q.bounds.max().x() + 1e-9 ||
        p.y() + q.half_extents.y() > q.bounds.max().y() + 1e-9)
      return false;
    for (const ontoplan::Box2& obs : q.obstacles)
      if (aabb_hit(p, q.half_extents, obs, q.inflation)) return false;
    return true;
  };
  auto cell_of = [&](const ontoplan::Vec2& p) {
    int ix = static_cast<int>((p.x() - q.bounds.min().x()) / cell);
    int iy = static_cast<int>((p.y() - q.bounds.min().y()) / cell);
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    return std::pair<int, int>(ix, iy);
  };

  const auto [sx, sy] = cell_of(q.start);
  const auto [gx, gy] = cell_of(q.goal);
  if (!free_at(q.start) || !free_at(q.goal)) return false;

  std::vector<char> visited(static_cast<size_t>(nx) * ny, 0);
  auto at = [&](int ix, int iy) -> char& {
    return visited[static_cast<size_t>(iy) * nx + ix];
  };
  std::queue<std::pair<int, int>> frontier;
  frontier.push({sx, sy});
  at(sx, sy) = 1;
  while (!frontier.empty()) {
    const auto [ix, iy] = frontier.front();
    frontier.pop();
    if (ix == gx && iy == gy) return true;
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int jx = ix + dx[d];
      const int jy = iy + dy[d];
      if (jx < 0 || jy < 0 || jx >= nx || jy >= ny || at(jx, jy)) continue;
      if (!free_at(center(jx, jy))) continue;
      at(jx, jy) = 1;
      frontier.push({jx, jy});
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
inline ontoplan::SymbolicPlan random_plan(std::mt19937_64& rng, size_t max_len = 12) {
  static const std::vector<std::string> names = {
      "bowl", "plate", "apple", "banana", "cup", "sugar_box", "plate1", "tray"};
  std::uniform_int_distribution<size_t> len_dist(1, max_len);
  std::uniform_int_distribution<size_t> name_dist(0, names.size() - 1);
  std::uniform_int_distribution<int> coord(-500, 1500);
  std::uniform_int_distribution<int> coin(0, 1);

  ontoplan::SymbolicPlan plan;
  const size_t n = len_dist(rng);
  for (size_t i = 0; i < n; ++i) {
    const std::string& name = names[name_dist(rng)];
    if (coin(rng)) {
      plan.actions.push_back(ontoplan::PrimitiveAction::pick(name));
    } else {
      // 3-decimal grid keeps the canonical renderer lossless.
      plan.actions.push_back(ontoplan::PrimitiveAction::place(
          name, coord(rng) / 1000.0, coord(rng) / 1000.0, coord(rng) / 1000.0,
          coord(rng) / 1000.0));
    }
  }
  return plan;
}

// A random already-valid pick or place applied to the state; returns nullopt
// when the sampler fails to find one quickly.
inline std::optional<ontoplan::PrimitiveAction> random_valid_action(
    const ontoplan::WorldState& state, std::mt19937_64& rng) {
  using namespace ontoplan;
  std::vector<std::string> names;
  for (const auto& [name, obj] : state.objects) names.push_back(name);
  if (names.empty()) return std::nullopt;
  std::uniform_int_distribution<size_t> pick_dist(0, names.size() - 1);

  if (!state.held) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const std::string& name = names[pick_dist(rng)];
      if (!objects_on(state, name).empty()) continue;
      return PrimitiveAction::pick(name);
    }
    return std::nullopt;
  }

  // Place the held object onto a random surface cell or a random object that
  // can carry it.
  const SceneObject& held = state.objects.at(*state.held);
  std::vector<std::pair<Box2, double>> regions;  // region, z
  for (const auto& [sname, surf] : state.surfaces) regions.push_back({surf.region, surf.z});
  for (const auto& [oname, obj] : state.objects) {
    if (oname == *state.held) continue;
    if (area_of(obj.footprint) + 1e-9 < held.length * held.width) continue;
    regions.push_back({obj.footprint, obj.top()});
  }
  std::uniform_int_distribution<size_t> region_dist(0, regions.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto& [region, z] = regions[region_dist(rng)];
    const Vec2 lo = region.min() + Vec2(held.length / 2.0, held.width / 2.0);
    const Vec2 hi = region.max() - Vec2(held.length / 2.0, held.width / 2.0);
    if (lo.x() > hi.x() || lo.y() > hi.y()) continue;
    const Vec2 target(lo.x() + unit(rng) * (hi.x() - lo.x()),
                      lo.y() + unit(rng) * (hi.y() - lo.y()));
    const Box2 fp = box_at(target, Vec2(held.length / 2.0, held.width / 2.0));
    const std::string support = resolve_support(state, target, *state.held);
    if (support.empty()) continue;
    bool clear = true;
    for (const auto& [oname, obj] : state.objects) {
      if (oname == *state.held) continue;
      if (obj.support == support && overlaps_open(fp, obj.footprint)) {
        clear = false;
        break;
      }
    }
    if (!clear) continue;
    if (state.objects.count(support) &&
        area_of(state.objects.at(support).footprint) + 1e-9 <
            held.length * held.width)
      continue;
    return PrimitiveAction::place(*state.held, target.x(), target.y(), z, 0.0);
  }
  return std::nullopt;
}

}  // namespace testutil
