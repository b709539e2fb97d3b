#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ontoplan/errors.hpp"

namespace ontoplan {

// Well-known IRIs (compact scheme form, as written in the triple files).
inline constexpr const char* kRdfType = "rdf:type";
inline constexpr const char* kRdfsLabel = "rdfs:label";
inline constexpr const char* kRdfsSubClassOf = "rdfs:subClassOf";
inline constexpr const char* kOwlClass = "owl:Class";
inline constexpr const char* kOwlNamedIndividual = "owl:NamedIndividual";
inline constexpr const char* kHasAction = "kitchen:hasAction";
inline constexpr const char* kHasObjectType = "kitchen:hasObjectType";
inline constexpr const char* kHasPriority = "kitchen:hasPriority";
inline constexpr const char* kHasDescription = "kitchen:hasDescription";
inline constexpr const char* kActionPriorityClass = "kitchen:ActionPriority";

enum class LiteralKind { None, String, Integer };  // None means the object is an IRI

struct Triple {
  std::string subject;    // IRI, without angle brackets
  std::string predicate;  // IRI
  std::string object;     // IRI text or literal text
  LiteralKind literal = LiteralKind::None;
  long integer = 0;  // set when literal == Integer

  auto operator<=>(const Triple&) const = default;
};

struct ActionPriorityRule {
  std::string action;       // lowercase verb, e.g. "put"
  std::string object_type;  // class local name, e.g. "Crockery"
  long priority = 0;        // 1 = highest
  std::string description;
};

// Local name of an IRI: the part after the last ':', '#' or '/'.
std::string iri_local_name(const std::string& iri);

// Immutable after load; safe to share read-only across threads.
class KnowledgeBase {
 public:
  // Parses a line-oriented triple document:
  //   <subj> <pred> <obj> .
  //   <subj> <pred> "literal" .
  //   <subj> <pred> "123"^^int .
  // '#' starts a comment line. Throws ParseError with the offending line
  // number, SchemaError on duplicate labels or incomplete ActionPriority
  // instances.
  static KnowledgeBase load(const std::string& document);
  static KnowledgeBase load_file(const std::string& path);

  const std::vector<Triple>& triples() const { return triples_; }
  std::string serialize() const;

  // Classes of the individual labeled `label` (case-insensitive), excluding
  // the owl:NamedIndividual marker. Empty when no individual matches.
  std::vector<std::string> object_types(const std::string& label) const;

  // Unique ActionPriority rule for (action, object_type); nullopt when no
  // rule matches, AmbiguityError when more than one does.
  std::optional<ActionPriorityRule> action_priority(const std::string& action,
                                                    const std::string& object_type) const;

  const std::vector<ActionPriorityRule>& rules() const { return rules_; }

  // Labels of individuals directly asserted as `class_name`, sorted.
  std::vector<std::string> individuals_of_type(const std::string& class_name) const;

  // Declared class local names (rdf:type owl:Class), sorted.
  std::vector<std::string> class_names() const;

  // label (lowercased) -> class local names; derivable from triples.
  const std::map<std::string, std::vector<std::string>>& label_index() const {
    return label_index_;
  }
  // (action, object_type) -> rules with that key; derivable from triples.
  const std::map<std::pair<std::string, std::string>, std::vector<ActionPriorityRule>>&
  rule_index() const {
    return rule_index_;
  }

 private:
  void build_indices();

  std::vector<Triple> triples_;
  std::vector<ActionPriorityRule> rules_;
  std::map<std::string, std::vector<std::string>> label_index_;
  std::map<std::pair<std::string, std::string>, std::vector<ActionPriorityRule>> rule_index_;
};

}  // namespace ontoplan
