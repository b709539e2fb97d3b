#include "ontoplan/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace ontoplan {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct LineCursor {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
};

std::string parse_iri(LineCursor& c, long line) {
  c.skip_ws();
  if (c.pos >= c.text.size() || c.text[c.pos] != '<')
    throw ParseError("expected '<'", line);
  size_t end = c.text.find('>', c.pos + 1);
  if (end == std::string::npos) throw ParseError("unterminated IRI", line);
  std::string iri = c.text.substr(c.pos + 1, end - c.pos - 1);
  if (iri.empty()) throw ParseError("empty IRI", line);
  c.pos = end + 1;
  return iri;
}

std::string parse_quoted(LineCursor& c, long line) {
  // c.text[c.pos] == '"'
  std::string out;
  size_t i = c.pos + 1;
  while (i < c.text.size() && c.text[i] != '"') {
    if (c.text[i] == '\\' && i + 1 < c.text.size()) {
      char n = c.text[i + 1];
      if (n == '"' || n == '\\') {
        out.push_back(n);
        i += 2;
        continue;
      }
    }
    out.push_back(c.text[i]);
    ++i;
  }
  if (i >= c.text.size()) throw ParseError("unterminated literal", line);
  c.pos = i + 1;
  return out;
}

std::string escape_literal(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

}  // namespace

std::string iri_local_name(const std::string& iri) {
  size_t pos = iri.find_last_of(":#/");
  return pos == std::string::npos ? iri : iri.substr(pos + 1);
}

KnowledgeBase KnowledgeBase::load(const std::string& document) {
  KnowledgeBase kb;
  std::istringstream in(document);
  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    LineCursor c{raw};
    if (c.done()) continue;
    if (raw[c.pos] == '#') continue;

    Triple t;
    t.subject = parse_iri(c, line_no);
    t.predicate = parse_iri(c, line_no);

    c.skip_ws();
    if (c.pos >= raw.size()) throw ParseError("missing object", line_no);
    if (raw[c.pos] == '<') {
      t.object = parse_iri(c, line_no);
      t.literal = LiteralKind::None;
    } else if (raw[c.pos] == '"') {
      t.object = parse_quoted(c, line_no);
      t.literal = LiteralKind::String;
      if (raw.compare(c.pos, 5, "^^int") == 0) {
        t.literal = LiteralKind::Integer;
        try {
          t.integer = std::stol(t.object);
        } catch (const std::exception&) {
          throw ParseError("invalid integer literal '" + t.object + "'", line_no);
        }
        c.pos += 5;
      }
    } else {
      throw ParseError("expected IRI or literal object", line_no);
    }

    c.skip_ws();
    if (c.pos >= raw.size() || raw[c.pos] != '.')
      throw ParseError("missing terminating '.'", line_no);
    c.pos += 1;
    if (!c.done()) throw ParseError("trailing content after '.'", line_no);

    kb.triples_.push_back(std::move(t));
  }
  kb.build_indices();
  return kb;
}

KnowledgeBase KnowledgeBase::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open knowledge base file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

std::string KnowledgeBase::serialize() const {
  std::ostringstream out;
  for (const Triple& t : triples_) {
    out << '<' << t.subject << "> <" << t.predicate << "> ";
    switch (t.literal) {
      case LiteralKind::None:
        out << '<' << t.object << '>';
        break;
      case LiteralKind::String:
        out << '"' << escape_literal(t.object) << '"';
        break;
      case LiteralKind::Integer:
        out << '"' << t.integer << "\"^^int";
        break;
    }
    out << " .\n";
  }
  return out.str();
}

void KnowledgeBase::build_indices() {
  std::map<std::string, std::vector<std::string>> types;  // subject -> type IRIs
  std::map<std::string, std::string> labels;              // subject -> label
  for (const Triple& t : triples_) {
    if (t.predicate == kRdfType && t.literal == LiteralKind::None)
      types[t.subject].push_back(t.object);
    if (t.predicate == kRdfsLabel && t.literal == LiteralKind::String) {
      auto [it, inserted] = labels.emplace(t.subject, t.object);
      if (!inserted && it->second != t.object)
        throw SchemaError("individual <" + t.subject + "> has multiple labels");
    }
  }

  std::set<std::string> seen_labels;
  for (const auto& [subject, label] : labels) {
    std::string key = lower(label);
    if (!seen_labels.insert(key).second)
      throw SchemaError("duplicate label '" + label + "'");
    std::vector<std::string> classes;
    auto it = types.find(subject);
    if (it != types.end()) {
      for (const std::string& type_iri : it->second) {
        if (type_iri == kOwlNamedIndividual) continue;
        classes.push_back(iri_local_name(type_iri));
      }
    }
    std::sort(classes.begin(), classes.end());
    label_index_[key] = std::move(classes);
  }

  // ActionPriority instances must carry all four properties.
  std::map<std::string, ActionPriorityRule> partial;
  std::map<std::string, int> have;  // bitmask: action|type|priority|description
  for (const auto& [subject, type_iris] : types) {
    if (std::find(type_iris.begin(), type_iris.end(), kActionPriorityClass) == type_iris.end())
      continue;
    have[subject] = 0;
  }
  for (const Triple& t : triples_) {
    auto it = have.find(t.subject);
    if (it == have.end()) continue;
    ActionPriorityRule& r = partial[t.subject];
    if (t.predicate == kHasAction && t.literal == LiteralKind::String) {
      r.action = t.object;
      it->second |= 1;
    } else if (t.predicate == kHasObjectType && t.literal == LiteralKind::String) {
      r.object_type = t.object;
      it->second |= 2;
    } else if (t.predicate == kHasPriority && t.literal == LiteralKind::Integer) {
      r.priority = t.integer;
      it->second |= 4;
    } else if (t.predicate == kHasDescription && t.literal == LiteralKind::String) {
      r.description = t.object;
      it->second |= 8;
    }
  }
  for (const auto& [subject, mask] : have) {
    if (mask != 15)
      throw SchemaError("ActionPriority <" + subject +
                        "> is missing one of hasAction/hasObjectType/hasPriority/hasDescription");
    const ActionPriorityRule& r = partial[subject];
    if (r.priority < 1)
      throw SchemaError("ActionPriority <" + subject + "> has priority < 1");
    if (r.description.empty())
      throw SchemaError("ActionPriority <" + subject + "> has empty description");
    if (r.action != lower(r.action))
      throw SchemaError("ActionPriority <" + subject + "> action must be lowercase");
    rules_.push_back(r);
    rule_index_[{r.action, r.object_type}].push_back(r);
  }
}

std::vector<std::string> KnowledgeBase::object_types(const std::string& label) const {
  auto it = label_index_.find(lower(label));
  if (it == label_index_.end()) return {};
  return it->second;
}

std::optional<ActionPriorityRule> KnowledgeBase::action_priority(
    const std::string& action, const std::string& object_type) const {
  auto it = rule_index_.find({action, object_type});
  if (it == rule_index_.end()) return std::nullopt;
  if (it->second.size() > 1)
    throw AmbiguityError("multiple ActionPriority rules match (" + action + ", " +
                         object_type + ")");
  return it->second.front();
}

std::vector<std::string> KnowledgeBase::individuals_of_type(
    const std::string& class_name) const {
  std::vector<std::string> out;
  for (const auto& [label, classes] : label_index_) {
    if (std::find(classes.begin(), classes.end(), class_name) != classes.end())
      out.push_back(label);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> KnowledgeBase::class_names() const {
  std::vector<std::string> out;
  for (const Triple& t : triples_) {
    if (t.predicate == kRdfType && t.object == kOwlClass)
      out.push_back(iri_local_name(t.subject));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ontoplan
