#pragma once

#include <array>
#include <string>
#include <vector>

#include "ontoplan/errors.hpp"

namespace ontoplan {

struct WorldState;  // world.hpp

enum class Verb { Pick, Place };

// Pick carries no parameters; Place carries gamma = (x, y, z, theta).
struct PrimitiveAction {
  Verb verb = Verb::Pick;
  std::string object;
  std::array<double, 4> gamma{0.0, 0.0, 0.0, 0.0};

  static PrimitiveAction pick(std::string object) {
    return {Verb::Pick, std::move(object), {0, 0, 0, 0}};
  }
  static PrimitiveAction place(std::string object, double x, double y, double z,
                               double theta) {
    return {Verb::Place, std::move(object), {x, y, z, theta}};
  }

  bool operator==(const PrimitiveAction&) const = default;
};

struct SymbolicPlan {
  std::vector<PrimitiveAction> actions;

  bool operator==(const SymbolicPlan&) const = default;
};

// Extracts `Pick ([name],{})` / `Place ([name]),{x,y,z,theta}` entries from
// free text, ignoring surrounding prose. Verbs are case-sensitive. Place
// parameters may be numbers or symbolic placeholders (parsed as 0). Throws
// ParseError when no entry is found or an entry is malformed.
SymbolicPlan parse_plan(const std::string& text);

// Canonical plan block (the inverse of parse_plan for numeric plans):
//   Full Plan =
//       Pick ([bowl],{})
//       Place ([bowl]),{0.740,0.250,0.020,0.000}
std::string render_plan(const SymbolicPlan& plan);

enum class PlanViolationKind {
  PickWhileHolding,
  PlaceWithoutPick,
  UnknownObject,
  PickBuried,
};

struct PlanViolation {
  PlanViolationKind kind;
  std::string object;
  size_t action_index = 0;

  std::string to_string() const;
  bool operator==(const PlanViolation&) const = default;
};

// Structural executability check via a coarse rollout: alternation of
// pick/place, object existence, and burial at the time of each pick.
// Violations are data, not errors.
std::vector<PlanViolation> validate_plan(const SymbolicPlan& plan,
                                         const WorldState& state);

std::string to_string(Verb v);

}  // namespace ontoplan
