#pragma once

#include <map>
#include <string>

#include "ontoplan/errors.hpp"

namespace ontoplan {

inline constexpr const char* kGuidanceSlot = "{GUIDANCE}";
inline constexpr const char* kEnvStateSlot = "{ENV_STATE}";
inline constexpr const char* kUserInputSlot = "{USER_INPUT}";

// Section headers of the shipped template; the deterministic mock backends
// locate their input blocks by these lines.
inline constexpr const char* kGuidanceHeader = "Task guidance:";
inline constexpr const char* kEnvStateHeader = "Environment state:";
inline constexpr const char* kUserInputHeader = "User command:";

class PromptTemplate {
 public:
  // Throws TemplateError unless each slot marker appears exactly once.
  static PromptTemplate parse(const std::string& text);
  static PromptTemplate load_file(const std::string& path);
  static const PromptTemplate& builtin();

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct SlotRange {
  size_t begin = 0;
  size_t end = 0;  // half-open byte range
};

struct Prompt {
  std::string text;
  std::map<std::string, SlotRange> provenance;  // GUIDANCE / ENV_STATE / USER_INPUT
};

// Substitutes the three slots; deterministic, provenance records where each
// input landed.
Prompt compose(const PromptTemplate& tmpl, const std::string& guidance,
               const std::string& env_description, const std::string& user_input);

}  // namespace ontoplan
