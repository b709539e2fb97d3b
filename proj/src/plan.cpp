#include "ontoplan/plan.hpp"

#include <cctype>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <sstream>

#include "ontoplan/world.hpp"

namespace ontoplan {

namespace {

struct Cursor {
  const std::string& text;
  size_t pos;

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r' ||
            text[pos] == '\n'))
      ++pos;
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c))
      throw ParseError(std::string("malformed plan entry: expected '") + c + "' " + what);
  }
};

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string parse_object_name(Cursor& c) {
  c.expect('[', "before the object name");
  const size_t end = c.text.find(']', c.pos);
  if (end == std::string::npos || c.text.find('\n', c.pos) < end)
    throw ParseError("malformed plan entry: unterminated object name");
  std::string name = trim(c.text.substr(c.pos, end - c.pos));
  if (name.empty()) throw ParseError("malformed plan entry: empty object name");
  c.pos = end + 1;
  return name;
}

// A parameter is a number, or a symbolic placeholder parsed as 0.
double parse_param(const std::string& raw) {
  const std::string token = trim(raw);
  if (token.empty()) throw ParseError("malformed plan entry: empty parameter");
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() + token.size()) return v;
  return 0.0;
}

std::array<double, 4> parse_params(Cursor& c) {
  c.expect('{', "before the parameters");
  const size_t close = c.text.find('}', c.pos);
  if (close == std::string::npos || c.text.find('\n', c.pos) < close)
    throw ParseError("malformed plan entry: unterminated parameter block");
  const std::string body = c.text.substr(c.pos, close - c.pos);
  c.pos = close + 1;

  std::vector<std::string> parts;
  std::string cur;
  for (char ch : body) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4)
    throw ParseError("malformed plan entry: expected 4 parameters, got " +
                     std::to_string(parts.size()));
  std::array<double, 4> out{};
  for (size_t i = 0; i < 4; ++i) out[i] = parse_param(parts[i]);
  return out;
}

bool at_word(const std::string& text, size_t pos, const char* word) {
  const size_t n = std::string(word).size();
  if (text.compare(pos, n, word) != 0) return false;
  if (pos > 0 && std::isalnum(static_cast<unsigned char>(text[pos - 1]))) return false;
  // Must be followed by an opening paren (possibly after spaces) to count as
  // an action entry rather than prose.
  size_t after = pos + n;
  while (after < text.size() && (text[after] == ' ' || text[after] == '\t')) ++after;
  return after < text.size() && text[after] == '(';
}

std::string fmt3(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << v;
  std::string s = out.str();
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace

std::string to_string(Verb v) { return v == Verb::Pick ? "Pick" : "Place"; }

SymbolicPlan parse_plan(const std::string& text) {
  SymbolicPlan plan;
  size_t pos = 0;
  while (pos < text.size()) {
    const bool pick = at_word(text, pos, "Pick");
    const bool place = !pick && at_word(text, pos, "Place");
    if (!pick && !place) {
      ++pos;
      continue;
    }
    Cursor c{text, pos + (pick ? 4 : 5)};
    c.expect('(', "after the verb");
    if (pick) {
      const std::string name = parse_object_name(c);
      c.expect(',', "after the object name");
      c.expect('{', "before the parameters");
      c.expect('}', "in the empty parameter block");
      c.expect(')', "closing the entry");
      plan.actions.push_back(PrimitiveAction::pick(name));
    } else {
      const std::string name = parse_object_name(c);
      std::array<double, 4> gamma{};
      c.skip_ws();
      if (c.pos < text.size() && text[c.pos] == ')') {
        // Place ([x]),{...}
        ++c.pos;
        c.expect(',', "between ')' and the parameters");
        gamma = parse_params(c);
      } else {
        // Place ([x],{...})
        c.expect(',', "after the object name");
        gamma = parse_params(c);
        c.expect(')', "closing the entry");
      }
      plan.actions.push_back(
          PrimitiveAction::place(name, gamma[0], gamma[1], gamma[2], gamma[3]));
    }
    pos = c.pos;
  }
  if (plan.actions.empty()) throw ParseError("no plan entries found");
  return plan;
}

std::string render_plan(const SymbolicPlan& plan) {
  std::ostringstream out;
  out << "Full Plan =\n";
  for (const PrimitiveAction& a : plan.actions) {
    if (a.verb == Verb::Pick) {
      out << "    Pick ([" << a.object << "],{})\n";
    } else {
      out << "    Place ([" << a.object << "]),{" << fmt3(a.gamma[0]) << ","
          << fmt3(a.gamma[1]) << "," << fmt3(a.gamma[2]) << "," << fmt3(a.gamma[3])
          << "}\n";
    }
  }
  return out.str();
}

std::string PlanViolation::to_string() const {
  std::string what;
  switch (kind) {
    case PlanViolationKind::PickWhileHolding:
      what = "PickWhileHolding";
      break;
    case PlanViolationKind::PlaceWithoutPick:
      what = "PlaceWithoutPick";
      break;
    case PlanViolationKind::UnknownObject:
      what = "UnknownObject";
      break;
    case PlanViolationKind::PickBuried:
      what = "PickBuried";
      break;
  }
  return what + "(" + object + " at action " + std::to_string(action_index) + ")";
}

std::vector<PlanViolation> validate_plan(const SymbolicPlan& plan,
                                         const WorldState& state) {
  std::vector<PlanViolation> out;
  std::optional<std::string> held = state.held;

  // Who rests on whom, updated through the rollout; placements are assumed
  // to land on a clear spot.
  std::map<std::string, std::string> support_of;
  for (const auto& [name, obj] : state.objects)
    if (!obj.support.empty()) support_of[name] = obj.support;
  auto covered = [&](const std::string& name) {
    for (const auto& [child, parent] : support_of)
      if (parent == name) return true;
    return false;
  };

  for (size_t i = 0; i < plan.actions.size(); ++i) {
    const PrimitiveAction& a = plan.actions[i];
    if (!state.objects.count(a.object)) {
      out.push_back({PlanViolationKind::UnknownObject, a.object, i});
      continue;
    }
    if (a.verb == Verb::Pick) {
      if (held) {
        out.push_back({PlanViolationKind::PickWhileHolding, a.object, i});
        continue;
      }
      if (covered(a.object)) {
        out.push_back({PlanViolationKind::PickBuried, a.object, i});
        continue;
      }
      support_of.erase(a.object);
      held = a.object;
    } else {
      if (!held || *held != a.object) {
        out.push_back({PlanViolationKind::PlaceWithoutPick, a.object, i});
        continue;
      }
      held.reset();
      support_of.erase(a.object);  // assumed placed somewhere clear
    }
  }
  return out;
}

}  // namespace ontoplan
