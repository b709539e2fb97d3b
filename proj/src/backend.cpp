#include "ontoplan/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <vector>

#include "ontoplan/geometry.hpp"
#include "ontoplan/guidance.hpp"
#include "ontoplan/plan.hpp"
#include "ontoplan/prompt.hpp"
#include "ontoplan/tagger.hpp"
#include "ontoplan/world.hpp"

#include "httplib.h"
#include "json.hpp"

namespace ontoplan {

namespace {

constexpr double kGridCell = 0.02;
constexpr double kMockClearance = 0.01;  // sibling clearance left by the grid scan

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_names(std::string csv) {
  csv = trim(csv);
  if (!csv.empty() && csv.back() == '.') csv.pop_back();
  std::vector<std::string> names;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!trim(cur).empty()) names.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) names.push_back(trim(cur));
  return names;
}

// ---- prompt sections ------------------------------------------------------

struct Sections {
  std::string guidance;
  std::string env;
  std::string user;
};

Sections split_sections(const std::string& prompt) {
  struct Header {
    const char* text;
    size_t pos;
  };
  Header headers[] = {{kGuidanceHeader, prompt.find(kGuidanceHeader)},
                      {kEnvStateHeader, prompt.find(kEnvStateHeader)},
                      {kUserInputHeader, prompt.find(kUserInputHeader)}};
  if (headers[1].pos == std::string::npos || headers[2].pos == std::string::npos)
    throw MockError("prompt is missing the environment or user command block");

  auto section = [&](const Header& h) -> std::string {
    if (h.pos == std::string::npos) return "";
    size_t begin = h.pos + std::string(h.text).size();
    size_t end = prompt.size();
    for (const Header& other : headers) {
      if (other.pos == std::string::npos || other.pos <= h.pos) continue;
      end = std::min(end, other.pos);
    }
    return trim(prompt.substr(begin, end - begin));
  };
  return {section(headers[0]), section(headers[1]), section(headers[2])};
}

// ---- environment model ----------------------------------------------------

struct MockObject {
  std::string name;
  Vec2 center{0, 0};
  Vec2 half{0, 0};
  double z = 0.0;
};

struct EnvModel {
  std::map<std::string, MockObject> objects;
  std::map<std::string, Box2> surfaces;
  std::optional<std::string> held;
};

const std::regex& object_line_re() {
  static const std::regex re(
      R"(^(\S+) is a \S+ located at position \[([-\d.]+),([-\d.]+),([-\d.]+)\] and orientation \[[-\d.]+\] with a bounding box spanning from \[([-\d.]+), ([-\d.]+)\] to \[([-\d.]+), ([-\d.]+)\] and dimensions of .*$)");
  return re;
}

const std::regex& surface_line_re() {
  static const std::regex re(
      R"(^(\S+) is a support surface spanning from \[([-\d.]+), ([-\d.]+)\] to \[([-\d.]+), ([-\d.]+)\]\.$)");
  return re;
}

EnvModel parse_env(const std::string& env_text) {
  EnvModel env;
  static const std::string held_prefix = "the gripper is currently holding ";
  for (const std::string& raw : split_lines(env_text)) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (std::regex_match(line, m, object_line_re())) {
      MockObject obj;
      obj.name = m[1];
      obj.z = std::stod(m[4]);
      const Vec2 lo(std::stod(m[5]), std::stod(m[6]));
      const Vec2 hi(std::stod(m[7]), std::stod(m[8]));
      obj.center = 0.5 * (lo + hi);
      obj.half = 0.5 * (hi - lo);
      env.objects[obj.name] = obj;
    } else if (std::regex_match(line, m, surface_line_re())) {
      env.surfaces[m[1]] = Box2(Vec2(std::stod(m[2]), std::stod(m[3])),
                                Vec2(std::stod(m[4]), std::stod(m[5])));
    } else if (line.compare(0, held_prefix.size(), held_prefix) == 0) {
      std::string name = line.substr(held_prefix.size());
      if (!name.empty() && name.back() == '.') name.pop_back();
      env.held = name;
    }
  }
  return env;
}

// ---- guidance block -------------------------------------------------------

struct GuidanceInfo {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> expansions;
  std::map<std::string, int> place_failures;  // object -> failed place count
};

GuidanceInfo parse_guidance(const std::string& guidance_text) {
  GuidanceInfo info;
  const std::string order_prefix = kOrderPrefix;
  const std::string refers = kRefersInfix;
  for (const std::string& raw : split_lines(guidance_text)) {
    const std::string line = trim(raw);
    if (line.compare(0, order_prefix.size(), order_prefix) == 0) {
      info.order = split_names(line.substr(order_prefix.size()));
    } else if (line.find(refers) != std::string::npos) {
      const size_t at = line.find(refers);
      info.expansions[trim(line.substr(0, at))] =
          split_names(line.substr(at + refers.size()));
    } else if (line.compare(0, 9, "FAILURE: ") == 0) {
      // "FAILURE: Place <object>: <reason>"
      static const std::regex fail_re(R"(^FAILURE: Place (\S+):.*$)");
      std::smatch m;
      if (std::regex_match(line, m, fail_re)) info.place_failures[m[1]] += 1;
    }
  }
  return info;
}

// ---- placement simulation --------------------------------------------------

struct PlannedItem {
  std::string name;
  std::string dest;   // surface or object name; may be empty
  std::string verb;   // canonical clause task
  size_t clause_index = 0;
};

// Obstacles for a candidate inside `region`: objects whose center lies in the
// region, except the moved object, the region's owner, and anything at or
// below the owner's height (the owner's own support chain).
std::vector<Box2> region_obstacles(const EnvModel& env, const Box2& region,
                                   const std::string& self, const std::string& owner,
                                   double above_z) {
  std::vector<Box2> out;
  for (const auto& [name, obj] : env.objects) {
    if (name == self || name == owner) continue;
    if (obj.z <= above_z + 1e-9) continue;
    if (!contains_point(region, obj.center)) continue;
    out.push_back(box_at(obj.center, obj.half));
  }
  return out;
}

// Row-major grid scan; returns every candidate center whose footprint fits
// fully inside the region with clearance against the obstacles.
std::vector<Vec2> scan_candidates(const Box2& region, const Vec2& half,
                                  const std::vector<Box2>& obstacles) {
  std::vector<Vec2> out;
  const Vec2 size = 2.0 * half;
  for (double y = region.min().y(); y + size.y() <= region.max().y() + 1e-9;
       y += kGridCell) {
    for (double x = region.min().x(); x + size.x() <= region.max().x() + 1e-9;
         x += kGridCell) {
      const Box2 fp(Vec2(x, y), Vec2(x + size.x(), y + size.y()));
      const Box2 grown = inflate(fp, kMockClearance);
      bool free = true;
      for (const Box2& obs : obstacles) {
        if (overlaps_open(grown, obs)) {
          free = false;
          break;
        }
      }
      if (free) out.push_back(center_of(fp));
    }
  }
  return out;
}

}  // namespace

BackendKind BackendConfig::parse_kind(const std::string& name) {
  if (name == "mock-guided") return BackendKind::MockGuided;
  if (name == "mock-naive") return BackendKind::MockNaive;
  if (name == "http") return BackendKind::Http;
  throw ParseError("unknown backend kind: " + name);
}

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::MockGuided:
      return "mock-guided";
    case BackendKind::MockNaive:
      return "mock-naive";
    case BackendKind::Http:
      return "http";
  }
  return "?";
}

std::string mock_generate(MockMode mode, const std::string& prompt, unsigned /*seed*/) {
  const Sections sections = split_sections(prompt);
  EnvModel env = parse_env(sections.env);
  const GuidanceInfo ginfo = parse_guidance(sections.guidance);

  TaggedCommand cmd;
  try {
    cmd = extract_command(sections.user);
  } catch (const std::exception&) {
    return "Full Plan =\n";  // nothing actionable in the command
  }

  // Destination and verb for every mentioned name (and, in guided mode, for
  // the concrete objects the guidance resolved category terms to).
  struct SourceInfo {
    std::string dest;
    std::string verb;
    size_t clause_index;
  };
  std::map<std::string, SourceInfo> source;
  for (size_t ci = 0; ci < cmd.clauses.size(); ++ci) {
    const Clause& clause = cmd.clauses[ci];
    const std::string dest = clause.destination.value_or("");
    for (const std::string& object : clause.objects) {
      source.emplace(object, SourceInfo{dest, clause.task, ci});
      if (mode == MockMode::Guided) {
        auto it = ginfo.expansions.find(object);
        if (it != ginfo.expansions.end())
          for (const std::string& member : it->second)
            source.emplace(member, SourceInfo{dest, clause.task, ci});
      }
    }
  }

  std::vector<PlannedItem> items;
  auto add_item = [&](const std::string& name) {
    auto it = source.find(name);
    if (it == source.end()) return;
    items.push_back({name, it->second.dest, it->second.verb, it->second.clause_index});
  };
  if (mode == MockMode::Guided && !ginfo.order.empty()) {
    for (const std::string& name : ginfo.order) add_item(name);
  } else {
    for (size_t ci = 0; ci < cmd.clauses.size(); ++ci)
      for (const std::string& object : cmd.clauses[ci].objects) add_item(object);
  }

  SymbolicPlan plan;
  std::map<size_t, std::string> stack_top;  // clause -> current chain top

  auto top_of = [&](const std::string& support) -> double {
    auto it = env.objects.find(support);
    return it == env.objects.end() ? 0.0 : it->second.z + kSlabThickness;
  };

  auto place_onto = [&](const std::string& name, const Box2& region,
                        const std::string& owner, double z, int skip) -> Vec2 {
    MockObject& obj = env.objects.at(name);
    const double above_z = z - kSlabThickness;  // the owner's own height
    const auto obstacles = region_obstacles(env, region, name, owner, above_z);
    const auto candidates = scan_candidates(region, obj.half, obstacles);
    Vec2 target;
    if (static_cast<size_t>(skip) < candidates.size()) {
      target = candidates[skip];
    } else {
      target = center_of(region);  // let the simulator arbitrate
    }
    plan.actions.push_back(PrimitiveAction::place(name, target.x(), target.y(), z, 0.0));
    obj.center = target;
    obj.z = z;
    return target;
  };

  // A held object is put down first; its pending placement resumes there.
  std::set<std::string> already_handled;
  if (env.held) {
    const std::string& h = *env.held;
    auto sit = source.find(h);
    if (sit != source.end() && env.objects.count(h)) {
      const PlannedItem item{h, sit->second.dest, sit->second.verb,
                             sit->second.clause_index};
      int skip = 0;
      if (auto f = ginfo.place_failures.find(h); f != ginfo.place_failures.end())
        skip = f->second;
      if (item.verb == "stack") {
        // Retry the same chain target.
        std::string target_name = item.dest;
        if (auto t = stack_top.find(item.clause_index); t != stack_top.end())
          target_name = t->second;
        // Chain context is lost between calls; aim at the mentioned
        // predecessor if it exists, else the destination.
        const Clause& clause = cmd.clauses[item.clause_index];
        for (size_t i = 0; i < clause.objects.size(); ++i) {
          if (clause.objects[i] == h && i > 0 && env.objects.count(clause.objects[i - 1]))
            target_name = clause.objects[i - 1];
        }
        if (env.objects.count(target_name)) {
          const MockObject& under = env.objects.at(target_name);
          place_onto(h, box_at(under.center, under.half), target_name,
                     under.z + kSlabThickness, skip);
          stack_top[item.clause_index] = h;
        } else if (env.surfaces.count(target_name)) {
          place_onto(h, env.surfaces.at(target_name), "", 0.0, skip);
          stack_top[item.clause_index] = h;
        }
      } else if (env.surfaces.count(item.dest)) {
        place_onto(h, env.surfaces.at(item.dest), "", 0.0, skip);
      } else if (env.objects.count(item.dest)) {
        const MockObject& under = env.objects.at(item.dest);
        const Box2 region = box_at(under.center, under.half);
        const auto obstacles = region_obstacles(env, region, h, item.dest, under.z);
        auto candidates = scan_candidates(region, env.objects.at(h).half, obstacles);
        if (static_cast<size_t>(skip) < candidates.size()) {
          place_onto(h, region, item.dest, under.z + kSlabThickness, skip);
        } else {
          // Try stacking on whatever already sits on the destination.
          bool placed = false;
          for (const auto& [oname, oobj] : env.objects) {
            if (oname == h || oname == item.dest) continue;
            if (!contains_point(region, oobj.center)) continue;
            const Box2 inner = box_at(oobj.center, oobj.half);
            if (oobj.half.x() * oobj.half.y() < env.objects.at(h).half.x() *
                                                    env.objects.at(h).half.y())
              continue;
            const auto inner_obs = region_obstacles(env, inner, h, oname, oobj.z);
            if (!scan_candidates(inner, env.objects.at(h).half, inner_obs).empty()) {
              place_onto(h, inner, oname, oobj.z + kSlabThickness, 0);
              placed = true;
              break;
            }
          }
          if (!placed) place_onto(h, region, item.dest, under.z + kSlabThickness, skip);
        }
      }
      already_handled.insert(h);
      env.held.reset();
    } else {
      // Not part of the task: set it back down where it is.
      if (env.objects.count(h)) {
        const MockObject& obj = env.objects.at(h);
        plan.actions.push_back(
            PrimitiveAction::place(h, obj.center.x(), obj.center.y(), obj.z, 0.0));
      }
      already_handled.insert(h);
      env.held.reset();
    }
  }

  for (const PlannedItem& item : items) {
    if (already_handled.count(item.name)) continue;
    already_handled.insert(item.name);
    auto oit = env.objects.find(item.name);
    if (oit == env.objects.end()) continue;  // not a scene object
    MockObject& obj = oit->second;

    if (item.verb == "stack") {
      std::string target_name;
      if (auto t = stack_top.find(item.clause_index); t != stack_top.end()) {
        target_name = t->second;
      } else {
        target_name = item.dest;
        // The base stays put when it already rests on the destination surface.
        if (env.surfaces.count(target_name) &&
            contains_point(env.surfaces.at(target_name), obj.center)) {
          stack_top[item.clause_index] = item.name;
          continue;
        }
      }
      if (env.objects.count(target_name)) {
        const MockObject& under = env.objects.at(target_name);
        plan.actions.push_back(PrimitiveAction::pick(item.name));
        place_onto(item.name, box_at(under.center, under.half), target_name,
                   under.z + kSlabThickness, 0);
      } else if (env.surfaces.count(target_name)) {
        plan.actions.push_back(PrimitiveAction::pick(item.name));
        place_onto(item.name, env.surfaces.at(target_name), "", 0.0, 0);
      } else {
        continue;
      }
      stack_top[item.clause_index] = item.name;
      continue;
    }

    // put / serve / arrange: place onto the destination region.
    Box2 region;
    std::string owner;
    double z = 0.0;
    if (env.surfaces.count(item.dest)) {
      region = env.surfaces.at(item.dest);
      // Already resting on the destination surface (replans after partial
      // execution must not undo completed moves).
      if (contains_point(region, obj.center) && std::abs(obj.z) < 1e-6) continue;
    } else if (env.objects.count(item.dest)) {
      const MockObject& under = env.objects.at(item.dest);
      region = box_at(under.center, under.half);
      owner = item.dest;
      z = under.z + kSlabThickness;
      // Already on the destination object or on something stacked on it.
      if (contains_point(region, obj.center) && obj.z > under.z + 1e-9) continue;
    } else {
      continue;  // no usable destination (e.g. "clean table")
    }

    plan.actions.push_back(PrimitiveAction::pick(item.name));
    const double region_z = owner.empty() ? -1.0 : z - kSlabThickness;
    const auto obstacles = region_obstacles(env, region, item.name, owner, region_z);
    const auto candidates = scan_candidates(region, obj.half, obstacles);
    int skip = 0;
    if (auto f = ginfo.place_failures.find(item.name); f != ginfo.place_failures.end())
      skip = f->second;
    if (static_cast<size_t>(skip) < candidates.size()) {
      const Vec2 target = candidates[skip];
      plan.actions.push_back(
          PrimitiveAction::place(item.name, target.x(), target.y(), z, 0.0));
      obj.center = target;
      obj.z = z;
    } else {
      // No room on the destination itself: try objects already on it that are
      // large enough to carry this one.
      bool placed = false;
      for (const auto& [oname, oobj] : env.objects) {
        if (oname == item.name || oname == owner) continue;
        if (!contains_point(region, oobj.center)) continue;
        if (oobj.half.x() * oobj.half.y() < obj.half.x() * obj.half.y()) continue;
        const Box2 inner = box_at(oobj.center, oobj.half);
        const auto inner_obs = region_obstacles(env, inner, item.name, oname, oobj.z);
        const auto inner_candidates = scan_candidates(inner, obj.half, inner_obs);
        if (!inner_candidates.empty()) {
          const Vec2 target = inner_candidates.front();
          plan.actions.push_back(
              PrimitiveAction::place(item.name, target.x(), target.y(),
                                     oobj.z + kSlabThickness, 0.0));
          obj.center = target;
          obj.z = oobj.z + kSlabThickness;
          placed = true;
          break;
        }
      }
      if (!placed) {
        // Let the simulator arbitrate the conflict.
        const Vec2 target = center_of(region);
        plan.actions.push_back(
            PrimitiveAction::place(item.name, target.x(), target.y(), z, 0.0));
        obj.center = target;
        obj.z = z;
      }
    }
  }

  if (plan.actions.empty()) return "Full Plan =\n";
  return render_plan(plan);
}

namespace {

class MockBackend : public PlanBackend {
 public:
  MockBackend(MockMode mode, unsigned seed) : mode_(mode), seed_(seed) {}
  std::string request_plan(const std::string& prompt) override {
    return mock_generate(mode_, prompt, seed_);
  }

 private:
  MockMode mode_;
  unsigned seed_;
};

class HttpBackend : public PlanBackend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
    const char* cred = std::getenv(config_.credential_env.c_str());
    if (!cred || !*cred)
      throw AuthError("credential environment variable " + config_.credential_env +
                      " is not set");
    credential_ = cred;
  }

  std::string request_plan(const std::string& prompt) override {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", {{{"role", "user"}, {"content", prompt}}}},
        {"temperature", config_.temperature},
    };
    const std::string payload = body.dump();

    std::string reply;
    // Single retry on transport failure.
    for (int attempt = 0; attempt < 2; ++attempt) {
      try {
        reply = post(payload);
        break;
      } catch (const TransportError&) {
        if (attempt == 1) throw;
      }
    }

    try {
      nlohmann::json parsed = nlohmann::json::parse(reply);
      return parsed.at(nlohmann::json::json_pointer(config_.text_path))
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed backend reply: ") + e.what());
    }
  }

  double last_latency_s() const override { return last_latency_s_; }

 private:
  std::string post(const std::string& payload) {
    std::string host_part = config_.endpoint;
    std::string path = "/";
    const size_t scheme = host_part.find("://");
    std::string base = host_part;
    if (scheme != std::string::npos) {
      const size_t path_at = host_part.find('/', scheme + 3);
      if (path_at != std::string::npos) {
        base = host_part.substr(0, path_at);
        path = host_part.substr(path_at);
      }
    }

    httplib::Client client(base);
    client.set_connection_timeout(static_cast<int>(config_.timeout_s), 0);
    client.set_read_timeout(static_cast<int>(config_.timeout_s), 0);
    client.set_bearer_token_auth(credential_);

    const auto t0 = std::chrono::steady_clock::now();
    auto res = client.Post(path, payload, "application/json");
    last_latency_s_ =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!res) {
      if (res.error() == httplib::Error::ConnectionTimeout ||
          res.error() == httplib::Error::Read)
        throw TimeoutError("backend request timed out");
      throw TransportError("backend request failed: " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("backend rejected the credential (HTTP " +
                      std::to_string(res->status) + ")");
    if (res->status != 200)
      throw TransportError("backend returned HTTP " + std::to_string(res->status));
    return res->body;
  }

  BackendConfig config_;
  std::string credential_;
  double last_latency_s_ = 0.0;
};

}  // namespace

std::unique_ptr<PlanBackend> make_backend(const BackendConfig& config) {
  switch (config.kind) {
    case BackendKind::MockGuided:
      return std::make_unique<MockBackend>(MockMode::Guided, config.seed);
    case BackendKind::MockNaive:
      return std::make_unique<MockBackend>(MockMode::Naive, config.seed);
    case BackendKind::Http:
      if (config.endpoint.empty() || config.model.empty())
        throw ParseError("http backend requires endpoint and model");
      return std::make_unique<HttpBackend>(config);
  }
  throw ParseError("unknown backend kind");
}

}  // namespace ontoplan
