#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;  // stdout only; stderr is routed to a scratch file
};

CliResult run_cli(const std::string& args) {
  const std::string command =
      std::string(ONTOPLAN_CLI_PATH) + " " + args + " 2>/tmp/ontoplan_cli_stderr";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 4096> chunk{};
  size_t n = 0;
  while ((n = fread(chunk.data(), 1, chunk.size(), pipe)) > 0)
    result.out.append(chunk.data(), n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string data_arg() { return std::string("--data ") + ONTOPLAN_DATA_DIR; }

std::string scene_arg(const char* id) {
  return std::string("--scene ") + ONTOPLAN_DATA_DIR + "/scenes/" + id + ".json";
}

}  // namespace

TEST_CASE("tag prints the parse and exits zero") {
  const CliResult r = run_cli("tag \"put the bowl in plate\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("task=put") != std::string::npos);
  CHECK(r.out.find("objects=[bowl]") != std::string::npos);
  CHECK(r.out.find("destination=plate") != std::string::npos);
}

TEST_CASE("tag without a task verb exits nonzero") {
  const CliResult r = run_cli("tag \"hello\"");
  CHECK(r.exit_code == 1);
  CHECK(r.out.empty());
  std::ifstream err("/tmp/ontoplan_cli_stderr");
  std::ostringstream buf;
  buf << err.rdbuf();
  CHECK(buf.str().find("error:") != std::string::npos);
}

TEST_CASE("tag splits the three-clause benchmark prompt") {
  const CliResult r = run_cli(
      "tag \"Clean table, move plate and cup to the right table, move sugar_box, "
      "tomato_can, and cracker_box to the left table\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("clause 3") != std::string::npos);
}

TEST_CASE("query resolves types and priorities") {
  CHECK(run_cli("query apple " + data_arg()).out.find("FoodItem") != std::string::npos);
  const CliResult rule =
      run_cli("query --action put --object-type Crockery " + data_arg());
  CHECK(rule.exit_code == 0);
  CHECK(rule.out.find("priority 1") != std::string::npos);
}

TEST_CASE("describe prints one line per object plus context") {
  const CliResult r = run_cli("describe " + data_arg() + " " + scene_arg("scene_a"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("apple is a FoodItem located at position") != std::string::npos);
  CHECK(r.out.find("table is a support surface") != std::string::npos);
}

TEST_CASE("plan output is reproducible byte for byte") {
  const std::string args = "plan \"Put banana, apple and bowl in plate\" " +
                           data_arg() + " " + scene_arg("scene_a") +
                           " --backend mock-guided";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("Pick ([bowl]") != std::string::npos);
}

TEST_CASE("a bad scene path fails cleanly") {
  const CliResult r = run_cli("plan \"put the bowl in plate\" " + data_arg() +
                              " --scene /nonexistent.json");
  CHECK(r.exit_code == 1);
}

TEST_CASE("run reports success for the guided backend") {
  const CliResult r = run_cli("run \"Put bowl, banana and apple in plate\" " +
                              data_arg() + " " + scene_arg("scene_a") +
                              " --backend mock-guided --trace-out /tmp/ontoplan_trace.json");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("outcome: Success") != std::string::npos);
  std::ifstream trace("/tmp/ontoplan_trace.json");
  CHECK(trace.good());
}

TEST_CASE("run reports failure when the naive backend saturates") {
  const CliResult r = run_cli("run \"Put banana, apple and bowl in plate\" " +
                              data_arg() + " " + scene_arg("scene_a") +
                              " --backend mock-naive --mode baseline");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("llm_calls: 10") != std::string::npos);
}

TEST_CASE("bench writes CSV and markdown reports") {
  const CliResult r = run_cli("bench " + data_arg() +
                              " --tasks 1,8 --trials 1 --report /tmp/ontoplan_report");
  CHECK(r.exit_code == 0);
  std::ifstream csv("/tmp/ontoplan_report.csv");
  REQUIRE(csv.good());
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);  // header + 2 tasks x 2 modes
  std::ifstream md("/tmp/ontoplan_report.md");
  CHECK(md.good());
}

TEST_CASE("an empty task filter is an error") {
  const CliResult r = run_cli("bench " + data_arg() + " --tasks \"\" --trials 1");
  CHECK(r.exit_code == 1);
}
