#include "ontoplan/prompt.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace ontoplan {

namespace {

constexpr const char* kBuiltinTemplate =
    R"(You are a robotic task planner for a tabletop pick-and-place system.
Available actions:
    Pick ([object],{})
    Place ([object]),{x,y,z,theta}
Rules:
- Alternate Pick and Place; exactly one object can be held at a time.
- Coordinates are meters in the workspace frame; theta is radians.
- Respond with the plan only, using exactly this format:
Full Plan =
    Pick ([object],{})
    Place ([object]),{x,y,z,theta}

Task guidance:
{GUIDANCE}

Environment state:
{ENV_STATE}

User command:
{USER_INPUT}
)";

size_t find_unique(const std::string& text, const std::string& marker) {
  const size_t first = text.find(marker);
  if (first == std::string::npos)
    throw TemplateError("template is missing slot " + marker);
  if (text.find(marker, first + marker.size()) != std::string::npos)
    throw TemplateError("template has duplicate slot " + marker);
  return first;
}

}  // namespace

PromptTemplate PromptTemplate::parse(const std::string& text) {
  find_unique(text, kGuidanceSlot);
  find_unique(text, kEnvStateSlot);
  find_unique(text, kUserInputSlot);
  PromptTemplate t;
  t.text_ = text;
  return t;
}

PromptTemplate PromptTemplate::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const PromptTemplate& PromptTemplate::builtin() {
  static const PromptTemplate t = parse(kBuiltinTemplate);
  return t;
}

Prompt compose(const PromptTemplate& tmpl, const std::string& guidance,
               const std::string& env_description, const std::string& user_input) {
  struct Sub {
    const char* slot;
    const char* key;
    const std::string* value;
  };
  const std::array<Sub, 3> subs = {{{kGuidanceSlot, "GUIDANCE", &guidance},
                                    {kEnvStateSlot, "ENV_STATE", &env_description},
                                    {kUserInputSlot, "USER_INPUT", &user_input}}};

  Prompt prompt;
  prompt.text = tmpl.text();
  for (const Sub& sub : subs) {
    const size_t at = prompt.text.find(sub.slot);
    if (at == std::string::npos)
      throw TemplateError(std::string("template is missing slot ") + sub.slot);
    prompt.text.replace(at, std::string(sub.slot).size(), *sub.value);
    prompt.provenance[sub.key] = {at, at + sub.value->size()};
    // Later substitutions shift earlier recorded ranges only if their slot
    // came earlier in the text; re-adjust recorded ranges that start after
    // this insertion point.
    const long shift = static_cast<long>(sub.value->size()) -
                       static_cast<long>(std::string(sub.slot).size());
    for (auto& [key, range] : prompt.provenance) {
      if (key == sub.key) continue;
      if (range.begin > at) {
        range.begin = static_cast<size_t>(static_cast<long>(range.begin) + shift);
        range.end = static_cast<size_t>(static_cast<long>(range.end) + shift);
      }
    }
  }
  return prompt;
}

}  // namespace ontoplan
