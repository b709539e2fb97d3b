#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ontoplan/backend.hpp"
#include "ontoplan/executor.hpp"
#include "ontoplan/ontology.hpp"
#include "ontoplan/tagger.hpp"
#include "ontoplan/world.hpp"

namespace ontoplan {

enum class PipelineMode { Baseline, Onto };

std::string to_string(PipelineMode mode);

struct TaskSpec {
  int id = 0;
  std::string prompt;  // verbatim benchmark wording
  std::string scene_id;
  GoalSpec goal;
  TaggedCommand gold_parse;
  // Pairwise temporal constraints: first must be placed before second.
  std::vector<std::pair<std::string, std::string>> gold_pairs;
};

// The benchmark bundle: knowledge base, scenes, task corpus.
struct Bench {
  KnowledgeBase kb;
  std::map<std::string, Scene> scenes;
  std::vector<TaskSpec> tasks;

  // data_dir must hold kitchen.nt, tasks.json, and scenes/<id>.json.
  static Bench load(const std::string& data_dir);
};

std::vector<TaskSpec> load_tasks(const std::string& json_text);

// Weighted plan score: 0.1 for parsing + passing validate_plan against the
// initial state, plus 0.9 times the satisfied fraction of the task's gold
// pairwise before-relations (first placement order). Unparseable text
// scores 0.
double score_semantics(const std::string& plan_text, const WorldState& initial,
                       const TaskSpec& task);
double score_semantics(const SymbolicPlan& plan, const WorldState& initial,
                       const TaskSpec& task);

// True when the realized placement order satisfies every gold pair.
bool order_respects_gold(const std::vector<std::string>& placed_order,
                         const TaskSpec& task);

struct EvalRow {
  int task_id = 0;
  std::string mode;
  std::string backend;
  double tpsr_pct = 0.0;
  double exesr_pct = 0.0;
  double mean_calls = 0.0;
  double mean_motion_time_s = 0.0;
};

struct TaggingStats {
  double mean_time_s = 0.0;
  std::optional<double> accuracy_pct;  // nullopt for an empty corpus
  size_t corpus_size = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::optional<TaggingStats> tagging;

  // task_id,mode,backend,tpsr,exesr,mean_calls,mean_motion_time_s
  std::string to_csv() const;
  // One row per task with baseline and onto columns side by side.
  std::string to_markdown(const std::vector<TaskSpec>& tasks) const;
};

struct BenchmarkOptions {
  int trials = 10;
  unsigned seed = 0;
  int max_calls = 10;
  std::optional<std::vector<int>> task_filter;  // run all tasks when empty
};

// TPSR: % of trials whose first parseable plan scores 1.0. EXESR: % of
// trials ending in Success whose realized placement order respects the gold
// pairs. CALLs and motion time are means over trials. Per-trial backend
// errors are recorded as failures; the sweep never aborts.
EvalReport run_benchmark(const Bench& bench, PipelineMode mode,
                         const BackendConfig& backend_config,
                         const BenchmarkOptions& options);

struct GoldEntry {
  std::string prompt;
  std::optional<TaggedCommand> expected;  // nullopt: tagging must fail
};

// Wall-clock mean extraction time and exact-match accuracy against the gold
// parses, averaged over `trials` repetitions of the corpus.
TaggingStats measure_tagging(const std::vector<GoldEntry>& corpus, int trials);

std::vector<GoldEntry> gold_corpus_from_tasks(const std::vector<TaskSpec>& tasks);
std::vector<GoldEntry> load_gold_corpus(const std::string& json_text);

}  // namespace ontoplan
