#include "ontoplan/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ontoplan/motion.hpp"

namespace ontoplan {

namespace {

using nlohmann::json;

std::string fmt3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  std::string s = out.str();
  if (s == "-0.000") s = "0.000";
  return s;
}

Box2 box_from_array(const json& a) {
  if (!a.is_array() || a.size() != 4)
    throw ParseError("expected [xmin, ymin, xmax, ymax]");
  return Box2(Vec2(a[0].get<double>(), a[1].get<double>()),
              Vec2(a[2].get<double>(), a[3].get<double>()));
}

GoalPredicate parse_predicate(const json& p) {
  GoalPredicate g;
  const std::string type = p.at("type").get<std::string>();
  if (type == "on") {
    g.kind = GoalPredicate::Kind::On;
    g.object = p.at("object").get<std::string>();
    for (const auto& s : p.at("supports")) g.supports.push_back(s.get<std::string>());
    if (g.supports.empty()) throw ParseError("on-predicate needs supports");
  } else if (type == "at_surface") {
    g.kind = GoalPredicate::Kind::AtSurface;
    g.object = p.at("object").get<std::string>();
    g.surface = p.at("surface").get<std::string>();
  } else if (type == "stacked_order") {
    g.kind = GoalPredicate::Kind::StackedOrder;
    for (const auto& s : p.at("objects")) g.supports.push_back(s.get<std::string>());
    if (g.supports.size() < 2) throw ParseError("stacked_order needs >= 2 objects");
  } else {
    throw ParseError("unknown goal predicate type: " + type);
  }
  return g;
}

}  // namespace

GoalSpec parse_goal(const std::string& json_array_text) {
  GoalSpec goal;
  json a = json::parse(json_array_text);
  for (const auto& p : a) goal.predicates.push_back(parse_predicate(p));
  return goal;
}

Scene load_scene(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene JSON: ") + e.what());
  }

  Scene scene;
  WorldState& st = scene.state;
  try {
    st.workspace = box_from_array(doc.at("workspace"));
    const auto& home = doc.at("gripper_home");
    st.gripper_home = Vec2(home[0].get<double>(), home[1].get<double>());
    st.gripper = st.gripper_home;

    for (const auto& s : doc.at("surfaces")) {
      Surface surf;
      surf.name = s.at("name").get<std::string>();
      surf.region = box_from_array(s.at("region"));
      surf.z = s.value("z", 0.0);
      st.surfaces[surf.name] = surf;
    }
    for (const auto& o : doc.at("objects")) {
      SceneObject obj;
      obj.name = o.at("name").get<std::string>();
      const auto& pos = o.at("position");
      obj.position = Vec3(pos[0].get<double>(), pos[1].get<double>(),
                          pos.size() > 2 ? pos[2].get<double>() : 0.0);
      obj.yaw = o.value("yaw", 0.0);
      const auto& size = o.at("size");
      obj.length = size[0].get<double>();
      obj.width = size[1].get<double>();
      obj.footprint = box_at(Vec2(obj.position.x(), obj.position.y()),
                             Vec2(obj.length / 2.0, obj.width / 2.0));
      obj.support = o.at("support").get<std::string>();
      if (st.objects.count(obj.name))
        throw ParseError("duplicate object name: " + obj.name);
      st.objects[obj.name] = obj;
    }
    if (doc.contains("goal"))
      for (const auto& p : doc.at("goal"))
        scene.goal.predicates.push_back(parse_predicate(p));
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene JSON: ") + e.what());
  }

  check_invariants(st);
  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scene(buf.str());
}

void check_invariants(const WorldState& state) {
  for (const auto& [name, obj] : state.objects) {
    if (obj.footprint.max().x() <= obj.footprint.min().x() ||
        obj.footprint.max().y() <= obj.footprint.min().y())
      throw InvariantError("degenerate footprint on " + name);
    const Vec2 sizes = obj.footprint.sizes();
    if (std::abs(sizes.x() - obj.length) > 1e-9 || std::abs(sizes.y() - obj.width) > 1e-9)
      throw InvariantError("footprint does not match length/width on " + name);
    const bool is_held = state.held && *state.held == name;
    if (is_held) {
      if (!obj.support.empty())
        throw InvariantError("held object " + name + " has a support");
      continue;
    }
    if (obj.support.empty())
      throw InvariantError(name + " has no support and is not held");
    if (!state.surfaces.count(obj.support) && !state.objects.count(obj.support))
      throw InvariantError(name + " rests on unknown support " + obj.support);
  }
  if (state.held && !state.objects.count(*state.held))
    throw InvariantError("held object does not exist: " + *state.held);

  // Acyclic support chains.
  for (const auto& [name, obj] : state.objects) {
    std::set<std::string> seen{name};
    std::string cur = obj.support;
    while (!cur.empty() && state.objects.count(cur)) {
      if (!seen.insert(cur).second)
        throw InvariantError("support cycle through " + name);
      cur = state.objects.at(cur).support;
    }
  }

  // No two footprints on the same support overlap (open-interval test).
  std::vector<const SceneObject*> objs;
  for (const auto& [name, obj] : state.objects)
    if (!state.held || *state.held != name) objs.push_back(&obj);
  for (size_t i = 0; i < objs.size(); ++i)
    for (size_t j = i + 1; j < objs.size(); ++j)
      if (objs[i]->support == objs[j]->support &&
          overlaps_open(objs[i]->footprint, objs[j]->footprint))
        throw InvariantError("overlapping footprints: " + objs[i]->name + " and " +
                             objs[j]->name);
}

std::string resolve_support(const WorldState& state, const Vec2& p,
                            const std::string& exclude) {
  const SceneObject* best = nullptr;
  for (const auto& [name, obj] : state.objects) {
    if (name == exclude) continue;
    if (state.held && *state.held == name) continue;
    if (!contains_point(obj.footprint, p)) continue;
    if (!best || obj.position.z() > best->position.z()) best = &obj;
  }
  if (best) return best->name;
  for (const auto& [name, surf] : state.surfaces)
    if (contains_point(surf.region, p)) return name;
  return "";
}

std::vector<std::string> objects_on(const WorldState& state, const std::string& support) {
  std::vector<std::string> out;
  for (const auto& [name, obj] : state.objects)
    if (obj.support == support) out.push_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

WorldState apply_action(const WorldState& state, const PrimitiveAction& action,
                        const Trajectory* trajectory) {
  WorldState next = state;
  auto it = next.objects.find(action.object);

  if (action.verb == Verb::Pick) {
    if (it == next.objects.end())
      throw PreconditionError("unknown object " + action.object);
    if (next.held) throw PreconditionError("gripper occupied");
    const auto on_top = objects_on(next, action.object);
    if (!on_top.empty())
      throw PreconditionError("object " + action.object + " is buried under " +
                              on_top.front());
    it->second.support.clear();
    next.held = action.object;
    next.gripper = Vec2(it->second.position.x(), it->second.position.y());
  } else {
    if (it == next.objects.end())
      throw PreconditionError("unknown object " + action.object);
    if (!next.held || *next.held != action.object)
      throw PreconditionError("object " + action.object + " is not held");

    SceneObject& obj = it->second;
    const Vec2 target(action.gamma[0], action.gamma[1]);
    const std::string support = resolve_support(next, target, action.object);
    if (support.empty())
      throw PreconditionError("no support region at target for " + action.object);

    const Box2 fp = box_at(target, Vec2(obj.length / 2.0, obj.width / 2.0));
    for (const auto& [name, other] : next.objects) {
      if (name == action.object) continue;
      if (other.support == support && overlaps_open(fp, other.footprint))
        throw PreconditionError("placement of " + action.object + " overlaps " + name);
    }

    double z;
    if (auto sit = next.surfaces.find(support); sit != next.surfaces.end()) {
      z = sit->second.z;
    } else {
      const SceneObject& under = next.objects.at(support);
      if (area_of(under.footprint) + 1e-9 < obj.length * obj.width)
        throw PreconditionError("support " + support + " too small for " + action.object);
      z = under.top();
    }

    obj.position = Vec3(target.x(), target.y(), z);
    obj.yaw = action.gamma[3];
    obj.footprint = fp;
    obj.support = support;
    next.held.reset();
    next.gripper =
        trajectory && !trajectory->waypoints.empty() ? trajectory->waypoints.back() : target;
  }

  check_invariants(next);
  return next;
}

bool check_goal(const WorldState& state, const GoalSpec& goal) {
  for (const GoalPredicate& p : goal.predicates) {
    switch (p.kind) {
      case GoalPredicate::Kind::On: {
        const SceneObject* obj = state.find(p.object);
        if (!obj) return false;
        if (std::find(p.supports.begin(), p.supports.end(), obj->support) ==
            p.supports.end())
          return false;
        break;
      }
      case GoalPredicate::Kind::AtSurface: {
        const SceneObject* obj = state.find(p.object);
        if (!obj || obj->support != p.surface) return false;
        break;
      }
      case GoalPredicate::Kind::StackedOrder: {
        for (size_t i = 1; i < p.supports.size(); ++i) {
          const SceneObject* upper = state.find(p.supports[i]);
          if (!upper || upper->support != p.supports[i - 1]) return false;
        }
        break;
      }
    }
  }
  return true;
}

std::string describe_state(const KnowledgeBase& kb, const WorldState& state) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, obj] : state.objects) {  // std::map iterates name-sorted
    const auto types = kb.object_types(name);
    const std::string type = types.empty() ? "Unknown" : types.front();
    if (!first) out << "\n";
    first = false;
    out << name << " is a " << type << " located at position [" << fmt3(obj.position.x())
        << "," << fmt3(obj.position.y()) << "," << fmt3(obj.position.z())
        << "] and orientation [" << fmt3(obj.yaw)
        << "] with a bounding box spanning from [" << fmt3(obj.footprint.min().x())
        << ", " << fmt3(obj.footprint.min().y()) << "] to ["
        << fmt3(obj.footprint.max().x()) << ", " << fmt3(obj.footprint.max().y())
        << "] and dimensions of " << fmt3(obj.length) << " meters in length and "
        << fmt3(obj.width) << " meters in width.";
  }
  return out.str();
}

std::string describe_context(const WorldState& state) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, surf] : state.surfaces) {
    if (!first) out << "\n";
    first = false;
    out << name << " is a support surface spanning from [" << fmt3(surf.region.min().x())
        << ", " << fmt3(surf.region.min().y()) << "] to [" << fmt3(surf.region.max().x())
        << ", " << fmt3(surf.region.max().y()) << "].";
  }
  if (state.held) {
    if (!first) out << "\n";
    out << "the gripper is currently holding " << *state.held << ".";
  }
  return out.str();
}

uint64_t state_hash(const WorldState& state) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= '|';
    h *= 1099511628211ull;
  };
  auto mixd = [&](double v) { mix(fmt3(v)); };
  for (const auto& [name, obj] : state.objects) {
    mix(name);
    mixd(obj.position.x());
    mixd(obj.position.y());
    mixd(obj.position.z());
    mixd(obj.yaw);
    mix(obj.support);
  }
  mix(state.held.value_or("-"));
  return h;
}

}  // namespace ontoplan
