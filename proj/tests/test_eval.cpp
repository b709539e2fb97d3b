#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "ontoplan/eval.hpp"

using namespace ontoplan;

namespace {

Bench& bench() {
  static Bench b = Bench::load(testutil::data_dir());
  return b;
}

const TaskSpec& task(int id) {
  for (const TaskSpec& t : bench().tasks)
    if (t.id == id) return t;
  throw std::runtime_error("no such task");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("the task corpus loads with ten tasks and their scenes") {
  CHECK(bench().tasks.size() == 10);
  CHECK(bench().scenes.size() == 4);
  for (const TaskSpec& t : bench().tasks) {
    CHECK_FALSE(t.prompt.empty());
    CHECK_FALSE(t.goal.predicates.empty());
    CHECK(bench().scenes.count(t.scene_id) == 1);
  }
}

TEST_CASE("semantic scoring rewards order and structure") {
  const Scene& scene = bench().scenes.at("scene_a");
  const TaskSpec& t2 = task(2);

  const std::string good =
      "Full Plan =\n"
      "    Pick ([bowl],{})\n    Place ([bowl]),{0.78,0.33,0.02,0.0}\n"
      "    Pick ([banana],{})\n    Place ([banana]),{0.74,0.25,0.04,0.0}\n"
      "    Pick ([apple],{})\n    Place ([apple]),{0.71,0.34,0.04,0.0}\n";
  CHECK(score_semantics(good, scene.state, t2) == doctest::Approx(1.0));

  const std::string reversed =
      "Full Plan =\n"
      "    Pick ([banana],{})\n    Place ([banana]),{0.74,0.25,0.0,0.0}\n"
      "    Pick ([apple],{})\n    Place ([apple]),{0.71,0.34,0.0,0.0}\n"
      "    Pick ([bowl],{})\n    Place ([bowl]),{0.78,0.33,0.0,0.0}\n";
  CHECK(score_semantics(reversed, scene.state, t2) == doctest::Approx(0.1));

  CHECK(score_semantics("nothing to see", scene.state, t2) == 0.0);

  // Structurally broken but semantically ordered: only the 0.9 component.
  const std::string broken =
      "Full Plan =\n"
      "    Place ([bowl]),{0.78,0.33,0.0,0.0}\n"
      "    Place ([banana]),{0.74,0.25,0.0,0.0}\n"
      "    Place ([apple]),{0.71,0.34,0.0,0.0}\n";
  CHECK(score_semantics(broken, scene.state, t2) == doctest::Approx(0.9));
}

TEST_CASE("realized-order checking matches the gold pairs") {
  const TaskSpec& t2 = task(2);
  CHECK(order_respects_gold({"bowl", "banana", "apple"}, t2));
  CHECK_FALSE(order_respects_gold({"banana", "bowl", "apple"}, t2));
  CHECK_FALSE(order_respects_gold({"banana", "apple"}, t2));  // bowl missing
}

TEST_CASE("zero trials are rejected") {
  BackendConfig config;
  BenchmarkOptions opts;
  opts.trials = 0;
  CHECK_THROWS_AS(run_benchmark(bench(), PipelineMode::Onto, config, opts),
                  InvalidTrials);
}

TEST_CASE("benchmark runs are reproducible for mock backends") {
  BackendConfig config;
  config.kind = BackendKind::MockGuided;
  BenchmarkOptions opts;
  opts.trials = 2;
  opts.seed = 5;
  opts.task_filter = std::vector<int>{1, 2};

  const EvalReport a = run_benchmark(bench(), PipelineMode::Onto, config, opts);
  const EvalReport b = run_benchmark(bench(), PipelineMode::Onto, config, opts);
  REQUIRE(a.rows.size() == 2);
  REQUIRE(b.rows.size() == 2);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].tpsr_pct == b.rows[i].tpsr_pct);
    CHECK(a.rows[i].exesr_pct == b.rows[i].exesr_pct);
    CHECK(a.rows[i].mean_calls == b.rows[i].mean_calls);
  }
}

TEST_CASE("execution success never exceeds plan success under mocks") {
  BenchmarkOptions opts;
  opts.trials = 2;
  for (const auto mode : {PipelineMode::Baseline, PipelineMode::Onto}) {
    BackendConfig config;
    config.kind =
        mode == PipelineMode::Onto ? BackendKind::MockGuided : BackendKind::MockNaive;
    const EvalReport report = run_benchmark(bench(), mode, config, opts);
    for (const EvalRow& row : report.rows) {
      CAPTURE(row.task_id);
      CAPTURE(row.mode);
      CHECK(row.exesr_pct <= row.tpsr_pct + 1e-9);
      CHECK(row.tpsr_pct >= 0.0);
      CHECK(row.tpsr_pct <= 100.0);
    }
  }
}

TEST_CASE("per-trial backend errors do not abort the sweep") {
  setenv("ONTOPLAN_EVAL_CRED", "x", 1);
  BackendConfig config;
  config.kind = BackendKind::Http;
  config.endpoint = "http://127.0.0.1:9";  // nothing listens here
  config.model = "m";
  config.credential_env = "ONTOPLAN_EVAL_CRED";
  config.timeout_s = 1;
  BenchmarkOptions opts;
  opts.trials = 1;
  opts.task_filter = std::vector<int>{1};
  const EvalReport report = run_benchmark(bench(), PipelineMode::Onto, config, opts);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].tpsr_pct == 0.0);
  CHECK(report.rows[0].exesr_pct == 0.0);
}

TEST_CASE("CSV carries the schema and one row per task and mode") {
  BackendConfig config;
  config.kind = BackendKind::MockGuided;
  BenchmarkOptions opts;
  opts.trials = 1;
  opts.task_filter = std::vector<int>{1, 8};
  const EvalReport report = run_benchmark(bench(), PipelineMode::Onto, config, opts);
  const std::string csv = report.to_csv();
  CHECK(csv.find("task_id,mode,backend,tpsr,exesr,mean_calls,mean_motion_time_s\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
  CHECK(csv.find("1,onto,mock-guided,100.0,100.0,1.0,") != std::string::npos);

  const std::string md = report.to_markdown(bench().tasks);
  CHECK(md.find("| Task 1: Put bowl, banana and apple in plate |") != std::string::npos);
}

TEST_CASE("tag timing over the canonical corpus is exact and fast") {
  const auto corpus = gold_corpus_from_tasks(bench().tasks);
  const TaggingStats stats = measure_tagging(corpus, 3);
  REQUIRE(stats.accuracy_pct.has_value());
  CHECK(*stats.accuracy_pct == doctest::Approx(100.0));
  CHECK(stats.mean_time_s < 0.01);
}

TEST_CASE("the noise corpus scores below the canonical one, as constructed") {
  const std::string text = slurp(testutil::data_dir() + "/noise_prompts.json");
  const auto corpus = load_gold_corpus(text);
  REQUIRE(corpus.size() == 20);

  // The corpus is self-documenting: entries flagged expect_mismatch must
  // disagree with the tagger, all others must agree.
  const auto doc = nlohmann::json::parse(text);
  size_t expected_matches = 0;
  size_t i = 0;
  for (const auto& entry : doc.at("prompts")) {
    const bool expect_mismatch = entry.value("expect_mismatch", false);
    std::optional<TaggedCommand> got;
    try {
      got = extract_command(corpus[i].prompt);
    } catch (const std::exception&) {
      got.reset();
    }
    const bool matched = got.has_value() == corpus[i].expected.has_value() &&
                         (!got || *got == *corpus[i].expected);
    CAPTURE(corpus[i].prompt);
    CHECK(matched == !expect_mismatch);
    if (matched) ++expected_matches;
    ++i;
  }

  const TaggingStats stats = measure_tagging(corpus, 2);
  REQUIRE(stats.accuracy_pct.has_value());
  CHECK(*stats.accuracy_pct ==
        doctest::Approx(100.0 * expected_matches / corpus.size()));
  CHECK(*stats.accuracy_pct < 100.0);
}

TEST_CASE("an empty corpus reports no accuracy") {
  const TaggingStats stats = measure_tagging({}, 3);
  CHECK_FALSE(stats.accuracy_pct.has_value());
  CHECK(stats.mean_time_s == 0.0);
}
