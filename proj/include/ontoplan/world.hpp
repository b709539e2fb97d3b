#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ontoplan/errors.hpp"
#include "ontoplan/geometry.hpp"
#include "ontoplan/ontology.hpp"
#include "ontoplan/plan.hpp"

namespace ontoplan {

struct Trajectory;  // motion.hpp

// Objects are slabs of fixed thickness; stacking raises z by one slab.
inline constexpr double kSlabThickness = 0.02;

struct SceneObject {
  std::string name;
  Vec3 position{0, 0, 0};  // footprint center (x, y); z = base height
  double yaw = 0.0;
  Box2 footprint;
  double length = 0.0;  // x extent
  double width = 0.0;   // y extent
  std::string support;  // surface or object it rests on; empty while held

  double top() const { return position.z() + kSlabThickness; }
};

struct Surface {
  std::string name;
  Box2 region;
  double z = 0.0;
};

struct GoalPredicate {
  enum class Kind { On, AtSurface, StackedOrder };
  Kind kind = Kind::On;
  std::string object;                 // On / AtSurface
  std::vector<std::string> supports;  // On: acceptable supports; StackedOrder: bottom -> top
  std::string surface;                // AtSurface
};

struct GoalSpec {
  std::vector<GoalPredicate> predicates;
};

// Immutable value; transitions return new states.
struct WorldState {
  std::map<std::string, SceneObject> objects;
  std::optional<std::string> held;
  std::map<std::string, Surface> surfaces;

  // Scene-level context carried along for planning.
  Box2 workspace;
  Vec2 gripper_home{0, 0};
  Vec2 gripper{0, 0};

  const SceneObject* find(const std::string& name) const {
    auto it = objects.find(name);
    return it == objects.end() ? nullptr : &it->second;
  }
};

struct Scene {
  WorldState state;
  GoalSpec goal;
};

// Scene JSON: { workspace, gripper_home, surfaces[], objects[], goal[] }.
// Throws ParseError on malformed input, InvariantError when the initial
// state violates world invariants.
Scene load_scene(const std::string& json_text);
Scene load_scene_file(const std::string& path);

GoalSpec parse_goal(const std::string& json_array_text);

// Throws InvariantError: footprint consistency, acyclic support chains,
// non-overlap of same-support footprints, held object has no support.
void check_invariants(const WorldState& state);

// Name of the support whose region contains p, preferring the topmost
// object; empty when p lies outside every region. `exclude` is ignored.
std::string resolve_support(const WorldState& state, const Vec2& p,
                            const std::string& exclude = "");

// Names of objects directly resting on `support`.
std::vector<std::string> objects_on(const WorldState& state, const std::string& support);

// Kinematic transition. Pick: object exists, nothing held, nothing on top.
// Place: object held, footprint collision-free among siblings, support has
// the capacity to hold it; z snaps to the support height. Throws
// PreconditionError with a machine-readable reason.
WorldState apply_action(const WorldState& state, const PrimitiveAction& action,
                        const Trajectory* trajectory = nullptr);

bool check_goal(const WorldState& state, const GoalSpec& goal);

// One sentence per object (name-sorted), 3-decimal fixed formatting:
//   <name> is a <Type> located at position [x,y,z] and orientation [yaw]
//   with a bounding box spanning from [xmin, ymin] to [xmax, ymax] and
//   dimensions of <l> meters in length and <w> meters in width.
std::string describe_state(const KnowledgeBase& kb, const WorldState& state);

// Support surfaces and gripper status; appended to the environment block
// after describe_state.
std::string describe_context(const WorldState& state);

uint64_t state_hash(const WorldState& state);

}  // namespace ontoplan
