#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ontoplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Box2 = Eigen::AlignedBox2d;

// Open-interval overlap with a small slack so that boxes sharing an edge
// (up to rounding) do not count as overlapping.
inline bool overlaps_open(const Box2& a, const Box2& b, double eps = 1e-9) {
  return a.min().x() < b.max().x() - eps && b.min().x() < a.max().x() - eps &&
         a.min().y() < b.max().y() - eps && b.min().y() < a.max().y() - eps;
}

inline Box2 inflate(const Box2& b, double r) {
  return Box2(b.min() - Vec2(r, r), b.max() + Vec2(r, r));
}

inline Box2 box_at(const Vec2& center, const Vec2& half_extents) {
  return Box2(center - half_extents, center + half_extents);
}

inline Vec2 center_of(const Box2& b) { return 0.5 * (b.min() + b.max()); }

inline double area_of(const Box2& b) {
  const Vec2 d = b.sizes();
  return d.x() * d.y();
}

inline bool contains_point(const Box2& b, const Vec2& p) {
  return p.x() >= b.min().x() && p.x() <= b.max().x() &&
         p.y() >= b.min().y() && p.y() <= b.max().y();
}

inline bool contains_box(const Box2& outer, const Box2& inner, double eps = 1e-9) {
  return inner.min().x() >= outer.min().x() - eps &&
         inner.min().y() >= outer.min().y() - eps &&
         inner.max().x() <= outer.max().x() + eps &&
         inner.max().y() <= outer.max().y() + eps;
}

}  // namespace ontoplan
