#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ontoplan/backend.hpp"
#include "ontoplan/eval.hpp"
#include "ontoplan/executor.hpp"
#include "ontoplan/guidance.hpp"
#include "ontoplan/ontology.hpp"
#include "ontoplan/prompt.hpp"
#include "ontoplan/tagger.hpp"
#include "ontoplan/world.hpp"

namespace {

using namespace ontoplan;

struct CommonOpts {
  std::string data_dir = "data";
  std::string kb_path;
  std::string scene_path;
  std::string template_path;
  std::string backend = "mock-guided";
  std::string endpoint;
  std::string model;
  std::string cred_env = "ONTOPLAN_API_KEY";
  std::string mode = "onto";
  unsigned seed = 0;
  int trials = 10;
  int max_calls = 10;
  std::string report = "report";
  std::string tasks_filter = "all";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--data", opts.data_dir, "Data directory (kitchen.nt, scenes/, tasks.json)");
  cmd->add_option("--kb", opts.kb_path, "Knowledge base file (overrides --data)");
  cmd->add_option("--scene", opts.scene_path, "Scene file");
  cmd->add_option("--template", opts.template_path, "Prompt template file");
  cmd->add_option("--backend", opts.backend, "mock-guided | mock-naive | http");
  cmd->add_option("--endpoint", opts.endpoint, "HTTP backend endpoint URL");
  cmd->add_option("--model", opts.model, "HTTP backend model name");
  cmd->add_option("--cred-env", opts.cred_env, "Env var holding the API credential");
  cmd->add_option("--mode", opts.mode, "baseline | onto (bench also accepts both)");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--trials", opts.trials, "Benchmark trials per task");
  cmd->add_option("--max-calls", opts.max_calls, "LLM call budget per task");
  cmd->add_option("--report", opts.report, "Report path prefix (bench)");
  cmd->add_option("--tasks", opts.tasks_filter, "Comma-separated task ids, or 'all'");
}

KnowledgeBase load_kb(const CommonOpts& opts) {
  const std::string path =
      opts.kb_path.empty() ? opts.data_dir + "/kitchen.nt" : opts.kb_path;
  return KnowledgeBase::load_file(path);
}

PromptTemplate load_template(const CommonOpts& opts) {
  if (opts.template_path.empty()) return PromptTemplate::builtin();
  return PromptTemplate::load_file(opts.template_path);
}

BackendConfig backend_config(const CommonOpts& opts) {
  BackendConfig config;
  config.kind = BackendConfig::parse_kind(opts.backend);
  config.endpoint = opts.endpoint;
  config.model = opts.model;
  config.credential_env = opts.cred_env;
  config.seed = opts.seed;
  return config;
}

int cmd_tag(const std::string& text) {
  const TaggedCommand cmd = extract_command(text);
  std::cout << to_string(cmd);
  return 0;
}

int cmd_query(const CommonOpts& opts, const std::string& label,
              const std::string& action, const std::string& object_type) {
  const KnowledgeBase kb = load_kb(opts);
  if (!action.empty() || !object_type.empty()) {
    if (action.empty() || object_type.empty())
      throw ParseError("rule query needs both --action and --object-type");
    const auto rule = kb.action_priority(action, object_type);
    if (!rule) {
      std::cout << "no rule for (" << action << ", " << object_type << ")\n";
      return 1;
    }
    std::cout << "priority " << rule->priority << ": " << rule->description << "\n";
    return 0;
  }
  if (label.empty()) throw ParseError("query needs a label or --action/--object-type");
  const auto types = kb.object_types(label);
  if (types.empty()) {
    std::cout << label << ": (no classes)\n";
    return 0;
  }
  std::cout << label << ":";
  for (const auto& t : types) std::cout << " " << t;
  std::cout << "\n";
  return 0;
}

int cmd_describe(const CommonOpts& opts) {
  if (opts.scene_path.empty()) throw ParseError("describe needs --scene");
  const KnowledgeBase kb = load_kb(opts);
  const Scene scene = load_scene_file(opts.scene_path);
  const std::string body = describe_state(kb, scene.state);
  const std::string context = describe_context(scene.state);
  if (!body.empty()) std::cout << body << "\n";
  if (!context.empty()) std::cout << context << "\n";
  return 0;
}

int cmd_plan(const CommonOpts& opts, const std::string& text) {
  if (opts.scene_path.empty()) throw ParseError("plan needs --scene");
  const KnowledgeBase kb = load_kb(opts);
  const Scene scene = load_scene_file(opts.scene_path);
  const PromptTemplate tmpl = load_template(opts);

  const TaggedCommand cmd = extract_command(text);
  std::string guidance_text;
  if (opts.mode != "baseline")
    guidance_text = render_guidance(build_guidance(kb, cmd, &scene.state));
  std::string env_text = describe_state(kb, scene.state);
  const std::string context = describe_context(scene.state);
  if (!context.empty()) env_text += (env_text.empty() ? "" : "\n") + context;

  const Prompt prompt = compose(tmpl, guidance_text, env_text, text);
  auto backend = make_backend(backend_config(opts));
  const std::string reply = backend->request_plan(prompt.text);
  const SymbolicPlan plan = parse_plan(reply);

  std::cout << "--- prompt ---\n" << prompt.text << "\n--- plan ---\n"
            << render_plan(plan);
  return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& text,
            const std::string& trace_out) {
  if (opts.scene_path.empty()) throw ParseError("run needs --scene");
  const KnowledgeBase kb = load_kb(opts);
  const Scene scene = load_scene_file(opts.scene_path);
  const PromptTemplate tmpl = load_template(opts);

  RunOptions run;
  run.max_calls = opts.max_calls;
  run.seed = opts.seed;
  run.include_guidance = opts.mode != "baseline";
  run.prompt_template = &tmpl;

  auto backend = make_backend(backend_config(opts));
  const ExecutionTrace trace = run_task(text, scene, kb, *backend, run);

  std::cout << "outcome: " << to_string(trace.outcome) << "\n"
            << "llm_calls: " << trace.llm_calls << "\n"
            << "motion_time_total_s: " << trace.motion_time_total << "\n"
            << "steps: " << trace.steps.size() << "\n";
  for (const StepRecord& s : trace.steps) {
    std::cout << "  " << to_string(s.action.verb) << " " << s.action.object
              << (s.failure.empty() ? "" : "  [" + s.failure + "]") << "\n";
  }
  if (!trace.failure_messages.empty()) {
    std::cout << "failures:\n";
    for (const auto& msg : trace.failure_messages) std::cout << "  " << msg << "\n";
  }
  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    out << trace.to_json();
  }
  return trace.outcome == Outcome::Success ? 0 : 1;
}

int cmd_bench(const CommonOpts& opts) {
  Bench bench = Bench::load(opts.data_dir);
  if (!opts.kb_path.empty()) bench.kb = KnowledgeBase::load_file(opts.kb_path);

  BenchmarkOptions bopts;
  bopts.trials = opts.trials;
  bopts.seed = opts.seed;
  bopts.max_calls = opts.max_calls;
  if (opts.tasks_filter != "all") {
    std::vector<int> ids;
    std::string cur;
    for (char c : opts.tasks_filter + ",") {
      if (c == ',') {
        if (!cur.empty()) ids.push_back(std::stoi(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (ids.empty()) throw InvalidTrials("empty task filter");
    bopts.task_filter = ids;
  }

  EvalReport merged;
  auto run_mode = [&](PipelineMode mode) {
    BackendConfig config = backend_config(opts);
    if (config.kind != BackendKind::Http) {
      config.kind = mode == PipelineMode::Onto ? BackendKind::MockGuided
                                               : BackendKind::MockNaive;
    }
    EvalReport r = run_benchmark(bench, mode, config, bopts);
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  };
  if (opts.mode == "both") {
    run_mode(PipelineMode::Baseline);
    run_mode(PipelineMode::Onto);
  } else if (opts.mode == "baseline") {
    run_mode(PipelineMode::Baseline);
  } else {
    run_mode(PipelineMode::Onto);
  }

  merged.tagging = measure_tagging(gold_corpus_from_tasks(bench.tasks), opts.trials);

  const std::string csv_path = opts.report + ".csv";
  const std::string md_path = opts.report + ".md";
  std::ofstream(csv_path) << merged.to_csv();
  std::ofstream(md_path) << merged.to_markdown(bench.tasks);
  std::cout << merged.to_csv();
  if (merged.tagging && merged.tagging->accuracy_pct) {
    std::cout << "tagging: mean " << merged.tagging->mean_time_s * 1000.0
              << " ms, accuracy " << *merged.tagging->accuracy_pct << "%\n";
  }
  std::cout << "wrote " << csv_path << " and " << md_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology-guided task and motion planning pipeline"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string text;
  std::string label;
  std::string action;
  std::string object_type;
  std::string trace_out;

  CLI::App* tag = app.add_subcommand("tag", "Tag a natural-language command");
  tag->add_option("text", text, "Command text")->required();
  add_common(tag, opts);

  CLI::App* query = app.add_subcommand("query", "Query the knowledge base");
  query->add_option("label", label, "Object label for a type query");
  query->add_option("--action", action, "Action for a priority query");
  query->add_option("--object-type", object_type, "Object type for a priority query");
  add_common(query, opts);

  CLI::App* describe = app.add_subcommand("describe", "Describe a scene");
  add_common(describe, opts);

  CLI::App* plan = app.add_subcommand("plan", "Compose a prompt and request a plan");
  plan->add_option("text", text, "Command text")->required();
  add_common(plan, opts);

  CLI::App* run = app.add_subcommand("run", "Execute a command with replanning");
  run->add_option("text", text, "Command text")->required();
  run->add_option("--trace-out", trace_out, "Write the execution trace JSON here");
  add_common(run, opts);

  CLI::App* bench = app.add_subcommand("bench", "Run the benchmark sweep");
  add_common(bench, opts);
  bench->get_option("--mode")->default_str("both");

  CLI11_PARSE(app, argc, argv);
  if (bench->parsed() && !bench->get_option("--mode")->count()) opts.mode = "both";

  try {
    if (tag->parsed()) return cmd_tag(text);
    if (query->parsed()) return cmd_query(opts, label, action, object_type);
    if (describe->parsed()) return cmd_describe(opts);
    if (plan->parsed()) return cmd_plan(opts, text);
    if (run->parsed()) return cmd_run(opts, text, trace_out);
    if (bench->parsed()) return cmd_bench(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
