#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ontoplan/backend.hpp"
#include "ontoplan/guidance.hpp"
#include "ontoplan/motion.hpp"
#include "ontoplan/ontology.hpp"
#include "ontoplan/plan.hpp"
#include "ontoplan/prompt.hpp"
#include "ontoplan/world.hpp"

namespace ontoplan {

enum class Outcome { Success, PlanningFailure, ExecutionFailure };

std::string to_string(Outcome outcome);

struct StepRecord {
  PrimitiveAction action;
  bool motion_ok = false;
  double motion_time_s = 0.0;
  double path_length = 0.0;
  size_t waypoints = 0;
  std::string failure;  // empty when the step succeeded
  uint64_t state_hash = 0;
};

struct ExecutionTrace {
  std::vector<StepRecord> steps;
  int llm_calls = 0;
  Outcome outcome = Outcome::PlanningFailure;
  double motion_time_total = 0.0;
  std::vector<std::string> failure_messages;
  std::vector<std::string> prompts;              // prompt text per LLM call
  std::vector<std::string> plans;                // raw reply per LLM call
  std::vector<std::string> realized_place_order; // successful placements
  double backend_latency_total_s = 0.0;
  WorldState final_state;

  std::string to_json() const;
};

struct RunOptions {
  int max_calls = 10;
  unsigned seed = 0;
  bool include_guidance = true;  // false = baseline prompt (no guidance block)
  const PromptTemplate* prompt_template = nullptr;  // builtin when null

  double motion_step = 0.05;
  int motion_max_iterations = 5000;
  double motion_goal_tolerance = 0.01;
  double motion_inflation = 0.005;

  // Test hook (inject_failure): forces the k-th motion query (1-based) to
  // fail with the returned reason regardless of geometry.
  std::function<std::optional<MotionFailureReason>(int call_index)> motion_failure_hook;
};

// One planning/execution loop: compose the prompt (failure feedback appended
// to the guidance block), request and parse a plan, validate it, then run
// motion planning and the kinematic transition per action. Any failure is
// fed back verbatim and the loop re-requests a plan from the current state,
// up to max_calls. Success requires the goal check to pass.
ExecutionTrace run_task(const std::string& user_input, const Scene& scene,
                        const KnowledgeBase& kb, PlanBackend& backend,
                        const RunOptions& options = {});

// Gripper footprint half extents in the planar collision model.
inline constexpr double kGripperHalf = 0.01;

}  // namespace ontoplan
