#pragma once

#include <map>
#include <string>
#include <vector>

#include "ontoplan/ontology.hpp"
#include "ontoplan/tagger.hpp"
#include "ontoplan/world.hpp"

namespace ontoplan {

inline constexpr const char* kUnknownType = "Unknown";
inline constexpr const char* kOrderPrefix = "Recommended handling order: ";
inline constexpr const char* kRefersInfix = " refers to: ";
inline constexpr const char* kStackNote =
    "the objects with the large bounding boxes will come first in stacking";

struct ClauseGuidance {
  std::string task;
  std::vector<std::string> ordered_objects;  // permutation of the clause's objects
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
};

struct Guidance {
  std::vector<ClauseGuidance> clauses;
  // Priority order across clauses with category terms expanded to the
  // concrete scene objects they refer to.
  std::vector<std::string> global_order;
  std::map<std::string, std::vector<std::string>> expansions;
};

// Each object mapped through the ontology; unmatched objects map to
// "Unknown".
std::map<std::string, std::string> classify_objects(const KnowledgeBase& kb,
                                                    const TaggedCommand& command);

// Ordering guidance: objects sorted by ascending rule priority (stable on
// mention order), unknown objects last with a warning. Rule lookup tries the
// command context verb (first clause) before the clause's own verb, so a
// leading "clean" clause governs the moves that implement it. Stack clauses
// order by footprint area (largest first) when a world state is given, which
// is also used to expand category terms ("crockery items", "plates") into
// the scene objects they denote.
Guidance build_guidance(const KnowledgeBase& kb, const TaggedCommand& command,
                        const WorldState* world = nullptr);

// Text block injected into the prompt: order line, category expansions,
// then the per-clause notes and warnings.
std::string render_guidance(const Guidance& guidance);

}  // namespace ontoplan
