#include "ontoplan/guidance.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <sstream>

namespace ontoplan {

namespace {

constexpr long kNoRulePriority = 1'000'000;   // classified, but no matching rule
constexpr long kUnknownPriority = 2'000'000;  // not in the knowledge base

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip_underscores(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

// "crockery_items" -> "crockery", "plates" -> "plate"
std::string category_stem(std::string term) {
  for (const char* suffix : {"_items", "_item"}) {
    const size_t n = std::string(suffix).size();
    if (term.size() > n && term.compare(term.size() - n, n, suffix) == 0) {
      term.resize(term.size() - n);
      return term;
    }
  }
  if (term.size() > 1 && term.back() == 's') term.pop_back();
  return term;
}

std::string join_names(const std::vector<std::string>& names) {
  std::ostringstream out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out << (i + 1 == names.size() ? " and " : ", ");
    out << names[i];
  }
  return out.str();
}

std::string humanize_type(const std::string& type) {
  if (type == "Crockery") return "crockery";
  if (type == "FoodItem") return "food items";
  if (type == "BoxedFood") return "boxed food items";
  if (type == "Utensil") return "utensils";
  if (type == "Container") return "containers";
  if (type == "KitchenItems") return "kitchen items";
  return lower(type);
}

struct Entry {
  std::string name;        // concrete object name
  std::string source;      // clause-level term it came from
  size_t clause_index;
  std::string type;
  long priority;           // rule priority or sentinel
  double area;             // world footprint area, stack ordering
  size_t seq;              // global mention order
};

}  // namespace

std::map<std::string, std::string> classify_objects(const KnowledgeBase& kb,
                                                    const TaggedCommand& command) {
  std::map<std::string, std::string> out;
  for (const Clause& clause : command.clauses) {
    for (const std::string& object : clause.objects) {
      const auto types = kb.object_types(object);
      out[object] = types.empty() ? kUnknownType : types.front();
    }
  }
  return out;
}

Guidance build_guidance(const KnowledgeBase& kb, const TaggedCommand& command,
                        const WorldState* world) {
  Guidance g;
  if (command.clauses.empty()) return g;
  const std::string context_verb = command.clauses.front().task;

  auto rule_for = [&](const std::string& verb,
                      const std::string& type) -> std::optional<ActionPriorityRule> {
    if (type == kUnknownType) return std::nullopt;
    if (auto r = kb.action_priority(context_verb, type)) return r;
    if (verb != context_verb)
      if (auto r = kb.action_priority(verb, type)) return r;
    return std::nullopt;
  };

  auto object_area = [&](const std::string& name) -> double {
    if (!world) return 0.0;
    const SceneObject* obj = world->find(name);
    return obj ? area_of(obj->footprint) : 0.0;
  };

  // Expand a category term into the scene objects it denotes, or an empty
  // list when it is not a category.
  auto expand_term = [&](const std::string& term) -> std::vector<std::string> {
    if (!world) return {};
    if (!kb.object_types(term).empty()) return {};  // a real individual
    const std::string stem = category_stem(term);

    // Class-name categories: "crockery items" -> Crockery, "boxed food
    // items" -> BoxedFood.
    for (const std::string& cls : kb.class_names()) {
      if (strip_underscores(lower(cls)) != strip_underscores(stem)) continue;
      std::vector<std::string> members;
      for (const auto& [name, obj] : world->objects) {
        const auto types = kb.object_types(name);
        if (std::find(types.begin(), types.end(), cls) != types.end())
          members.push_back(name);
      }
      return members;  // name-sorted via map iteration
    }

    // Plural of a name family: "plates" -> plate, plate1, plate2, ...
    if (term != stem) {
      std::vector<std::string> members;
      for (const auto& [name, obj] : world->objects) {
        if (name == stem) {
          members.push_back(name);
          continue;
        }
        if (name.size() > stem.size() && name.compare(0, stem.size(), stem) == 0 &&
            std::all_of(name.begin() + stem.size(), name.end(),
                        [](unsigned char c) { return std::isdigit(c); }))
          members.push_back(name);
      }
      return members;
    }
    return {};
  };

  std::vector<Entry> entries;
  size_t seq = 0;
  for (size_t ci = 0; ci < command.clauses.size(); ++ci) {
    const Clause& clause = command.clauses[ci];
    const bool is_stack = clause.task == "stack";

    std::vector<Entry> clause_entries;  // unexpanded, for the per-clause view
    for (const std::string& object : clause.objects) {
      const auto types = kb.object_types(object);
      const std::string type = types.empty() ? kUnknownType : types.front();

      std::vector<std::string> members = expand_term(object);
      if (!members.empty()) g.expansions[object] = members;

      auto push = [&](const std::string& name, const std::string& source) {
        Entry e;
        e.name = name;
        e.source = source;
        e.clause_index = ci;
        const auto member_types = kb.object_types(name);
        e.type = member_types.empty() ? type : member_types.front();
        const auto rule = rule_for(clause.task, e.type);
        e.priority = rule ? rule->priority
                          : (e.type == kUnknownType ? kUnknownPriority : kNoRulePriority);
        e.area = object_area(name);
        e.seq = seq++;
        entries.push_back(e);
      };
      if (members.empty()) {
        push(object, object);
      } else {
        for (const std::string& m : members) push(m, object);
      }

      Entry ce;
      ce.name = object;
      ce.source = object;
      ce.clause_index = ci;
      ce.type = type;
      const auto rule = rule_for(clause.task, type);
      ce.priority = rule ? rule->priority
                         : (!members.empty()
                                ? kNoRulePriority  // resolvable category, not unknown
                                : (type == kUnknownType ? kUnknownPriority
                                                        : kNoRulePriority));
      ce.area = object_area(object);
      ce.seq = ce.clause_index;  // unused for the per-clause sort
      clause_entries.push_back(ce);
    }

    ClauseGuidance cg;
    cg.task = clause.task;
    std::stable_sort(clause_entries.begin(), clause_entries.end(),
                     [&](const Entry& a, const Entry& b) {
                       if (is_stack && world) {
                         const bool ha = world->find(a.name) != nullptr;
                         const bool hb = world->find(b.name) != nullptr;
                         if (ha != hb) return ha > hb;
                         if (ha && hb && a.area != b.area) return a.area > b.area;
                         return false;
                       }
                       return a.priority < b.priority;
                     });
    for (const Entry& e : clause_entries) cg.ordered_objects.push_back(e.name);
    g.clauses.push_back(std::move(cg));
  }

  // Global order across clauses: within each stack clause, descending
  // footprint area first; then a stable sort on rule priority across the
  // whole command.
  if (world) {
    for (size_t ci = 0; ci < command.clauses.size(); ++ci) {
      if (command.clauses[ci].task != "stack") continue;
      auto begin = std::stable_partition(
          entries.begin(), entries.end(),
          [&](const Entry& e) { return e.clause_index < ci; });
      auto end = std::stable_partition(
          begin, entries.end(), [&](const Entry& e) { return e.clause_index == ci; });
      std::stable_sort(begin, end, [&](const Entry& a, const Entry& b) {
        const bool ha = world->find(a.name) != nullptr;
        const bool hb = world->find(b.name) != nullptr;
        if (ha != hb) return ha > hb;
        return ha && hb && a.area > b.area;
      });
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.priority < b.priority; });
  for (const Entry& e : entries) g.global_order.push_back(e.name);

  // Notes: group rated entries by (priority, type) ascending; describe the
  // first group as going before the next one and later groups as going after
  // the previous one. Each note is attached to the clause holding the
  // group's first member.
  std::vector<Entry> rated;
  for (const Entry& e : entries)
    if (e.priority < kNoRulePriority) rated.push_back(e);
  std::stable_sort(rated.begin(), rated.end(),
                   [](const Entry& a, const Entry& b) { return a.priority < b.priority; });

  std::vector<std::pair<std::string, std::vector<Entry>>> groups;  // type -> members
  for (const Entry& e : rated) {
    if (groups.empty() || groups.back().first != e.type)
      groups.push_back({e.type, {}});
    groups.back().second.push_back(e);
  }
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& [type, members] = groups[gi];
    const Clause& clause = command.clauses[members.front().clause_index];
    const auto rule = rule_for(clause.task, type);
    if (!rule) continue;
    std::vector<std::string> names;
    for (const Entry& e : members) names.push_back(e.name);

    std::ostringstream note;
    if (gi == 0 && groups.size() > 1) {
      note << clause.task << " " << join_names(names) << " before "
           << humanize_type(groups[gi + 1].first) << " because " << rule->description;
    } else if (gi > 0) {
      note << clause.task << " " << join_names(names) << " after "
           << humanize_type(groups[gi - 1].first) << " because " << rule->description;
    } else {
      continue;  // a single rated group needs no ordering note
    }
    g.clauses[members.front().clause_index].notes.push_back(note.str());
  }

  // Stack clauses: the size rule, with the resolved order spelled out.
  for (size_t ci = 0; ci < command.clauses.size(); ++ci) {
    if (command.clauses[ci].task != "stack" || !world) continue;
    std::vector<std::string> in_clause;
    for (const Entry& e : entries)
      if (e.clause_index == ci) in_clause.push_back(e.name);
    if (in_clause.empty()) continue;
    g.clauses[ci].notes.push_back(std::string(kStackNote) + ": " +
                                  join_names(in_clause));
  }

  // Warnings for objects absent from the knowledge base (and not resolvable
  // as categories).
  for (size_t ci = 0; ci < command.clauses.size(); ++ci) {
    for (const std::string& object : command.clauses[ci].objects) {
      if (!kb.object_types(object).empty()) continue;
      if (g.expansions.count(object)) continue;
      g.clauses[ci].warnings.push_back(object +
                                       " is not in the knowledge base; it will be "
                                       "handled last");
    }
  }
  return g;
}

std::string render_guidance(const Guidance& guidance) {
  std::ostringstream out;
  bool first = true;
  auto line = [&](const std::string& s) {
    if (!first) out << "\n";
    first = false;
    out << s;
  };
  if (!guidance.global_order.empty()) {
    std::ostringstream order;
    order << kOrderPrefix;
    for (size_t i = 0; i < guidance.global_order.size(); ++i) {
      if (i) order << ", ";
      order << guidance.global_order[i];
    }
    order << ".";
    line(order.str());
  }
  for (const auto& [term, members] : guidance.expansions) {
    std::ostringstream e;
    e << term << kRefersInfix;
    for (size_t i = 0; i < members.size(); ++i) {
      if (i) e << ", ";
      e << members[i];
    }
    e << ".";
    line(e.str());
  }
  for (const ClauseGuidance& c : guidance.clauses) {
    for (const std::string& n : c.notes) line(n + ".");
    for (const std::string& w : c.warnings) line(w + ".");
  }
  return out.str();
}

}  // namespace ontoplan
