#include "ontoplan/executor.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ontoplan/tagger.hpp"

namespace ontoplan {

namespace {

// Obstacles for one transit: every resting object except the moved one, the
// prospective support chain under the goal, and anything already colliding
// with the start configuration (the gripper lifts off vertically before
// translating).
std::vector<Box2> gather_obstacles(const WorldState& state, const std::string& moving,
                                   const Vec2& start, const Vec2& goal_xy,
                                   const Vec2& half_extents, double inflation) {
  std::set<std::string> excluded{moving};
  std::string support = resolve_support(state, goal_xy, moving);
  while (!support.empty() && state.objects.count(support)) {
    excluded.insert(support);
    support = state.objects.at(support).support;
  }

  std::vector<Box2> obstacles;
  const Box2 at_start = box_at(start, half_extents);
  for (const auto& [name, obj] : state.objects) {
    if (excluded.count(name)) continue;
    if (state.held && *state.held == name) continue;
    if (overlaps_open(at_start, inflate(obj.footprint, inflation))) continue;
    obstacles.push_back(obj.footprint);
  }
  return obstacles;
}

}  // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Success:
      return "Success";
    case Outcome::PlanningFailure:
      return "PlanningFailure";
    case Outcome::ExecutionFailure:
      return "ExecutionFailure";
  }
  return "?";
}

ExecutionTrace run_task(const std::string& user_input, const Scene& scene,
                        const KnowledgeBase& kb, PlanBackend& backend,
                        const RunOptions& options) {
  if (options.max_calls < 1) throw InvalidTrials("max_calls must be >= 1");
  const PromptTemplate& tmpl =
      options.prompt_template ? *options.prompt_template : PromptTemplate::builtin();

  const TaggedCommand command = extract_command(user_input);

  ExecutionTrace trace;
  WorldState state = scene.state;
  state.gripper = state.gripper_home;
  int motion_calls = 0;
  bool reached_execution = false;

  while (trace.llm_calls < options.max_calls) {
    std::string guidance_text;
    if (options.include_guidance)
      guidance_text = render_guidance(build_guidance(kb, command, &state));
    if (!trace.failure_messages.empty()) {
      std::ostringstream with_feedback;
      with_feedback << guidance_text;
      for (const std::string& msg : trace.failure_messages)
        with_feedback << (with_feedback.str().empty() ? "" : "\n") << msg;
      guidance_text = with_feedback.str();
    }

    std::string env_text = describe_state(kb, state);
    const std::string context = describe_context(state);
    if (!context.empty()) env_text += (env_text.empty() ? "" : "\n") + context;

    const Prompt prompt = compose(tmpl, guidance_text, env_text, user_input);
    trace.prompts.push_back(prompt.text);
    ++trace.llm_calls;

    std::string reply;
    try {
      reply = backend.request_plan(prompt.text);
    } catch (const std::exception& e) {
      trace.plans.push_back("");
      trace.failure_messages.push_back(std::string("FAILURE: backend: ") + e.what());
      trace.outcome = Outcome::PlanningFailure;
      trace.final_state = state;
      return trace;
    }
    trace.backend_latency_total_s += backend.last_latency_s();
    trace.plans.push_back(reply);

    SymbolicPlan plan;
    try {
      plan = parse_plan(reply);
    } catch (const ParseError& e) {
      trace.failure_messages.push_back(std::string("FAILURE: plan: ") + e.what());
      continue;
    }

    const auto violations = validate_plan(plan, state);
    if (violations.empty()) reached_execution = true;
    if (!violations.empty()) {
      std::ostringstream msg;
      msg << "FAILURE: plan: invalid:";
      for (const PlanViolation& v : violations) msg << " " << v.to_string();
      trace.failure_messages.push_back(msg.str());
      continue;
    }

    bool replan = false;
    for (const PrimitiveAction& action : plan.actions) {
      MotionQuery query;
      query.start = state.gripper;
      query.bounds = state.workspace;
      query.step = options.motion_step;
      query.max_iterations = options.motion_max_iterations;
      query.goal_tolerance = options.motion_goal_tolerance;
      query.inflation = options.motion_inflation;
      query.seed = options.seed + static_cast<unsigned>(motion_calls) * 7919u;

      const SceneObject* obj = state.find(action.object);
      if (action.verb == Verb::Pick) {
        query.goal = obj ? Vec2(obj->position.x(), obj->position.y()) : state.gripper;
        query.half_extents = Vec2(kGripperHalf, kGripperHalf);
      } else {
        query.goal = Vec2(action.gamma[0], action.gamma[1]);
        query.half_extents = obj ? Vec2(obj->length / 2.0, obj->width / 2.0)
                                 : Vec2(kGripperHalf, kGripperHalf);
      }
      query.obstacles = gather_obstacles(state, action.object, query.start, query.goal,
                                         query.half_extents, query.inflation);

      ++motion_calls;
      const auto t0 = std::chrono::steady_clock::now();
      MotionResult result;
      std::optional<MotionFailureReason> injected;
      if (options.motion_failure_hook) injected = options.motion_failure_hook(motion_calls);
      if (injected) {
        result = MotionFailure{*injected};
      } else {
        result = plan_motion(query);
      }
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      trace.motion_time_total += dt;

      StepRecord step;
      step.action = action;
      step.motion_time_s = dt;

      if (std::holds_alternative<MotionFailure>(result)) {
        const auto reason = std::get<MotionFailure>(result).reason;
        step.motion_ok = false;
        step.failure = "FAILURE: " + to_string(action.verb) + " " + action.object +
                       ": " + to_string(reason);
        step.state_hash = state_hash(state);
        trace.steps.push_back(step);
        trace.failure_messages.push_back(step.failure);
        replan = true;
        break;
      }

      const Trajectory& traj = std::get<Trajectory>(result);
      step.motion_ok = true;
      step.path_length = traj.length;
      step.waypoints = traj.waypoints.size();

      try {
        state = apply_action(state, action, &traj);
        if (action.verb == Verb::Place)
          trace.realized_place_order.push_back(action.object);
      } catch (const PreconditionError& e) {
        step.failure = "FAILURE: " + to_string(action.verb) + " " + action.object +
                       ": " + e.what();
        step.state_hash = state_hash(state);
        trace.steps.push_back(step);
        trace.failure_messages.push_back(step.failure);
        replan = true;
        break;
      }
      step.state_hash = state_hash(state);
      trace.steps.push_back(step);
    }

    if (!replan) {
      if (check_goal(state, scene.goal)) {
        trace.outcome = Outcome::Success;
        trace.final_state = state;
        return trace;
      }
      trace.failure_messages.push_back(
          "FAILURE: goal: not satisfied after executing the plan");
    }
  }

  trace.outcome = reached_execution ? Outcome::ExecutionFailure : Outcome::PlanningFailure;
  trace.final_state = state;
  return trace;
}

std::string ExecutionTrace::to_json() const {
  nlohmann::json doc;
  doc["llm_calls"] = llm_calls;
  doc["outcome"] = to_string(outcome);
  doc["motion_time_total_s"] = motion_time_total;
  doc["failure_messages"] = failure_messages;
  doc["realized_place_order"] = realized_place_order;
  doc["plans"] = plans;
  nlohmann::json steps_json = nlohmann::json::array();
  for (const StepRecord& s : steps) {
    nlohmann::json j;
    j["verb"] = to_string(s.action.verb);
    j["object"] = s.action.object;
    j["gamma"] = s.action.gamma;
    j["motion_ok"] = s.motion_ok;
    j["motion_time_s"] = s.motion_time_s;
    j["path_length"] = s.path_length;
    j["waypoints"] = s.waypoints;
    j["failure"] = s.failure;
    j["state_hash"] = s.state_hash;
    steps_json.push_back(j);
  }
  doc["steps"] = steps_json;
  return doc.dump(2);
}

}  // namespace ontoplan
