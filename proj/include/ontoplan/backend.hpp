#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ontoplan/errors.hpp"

namespace ontoplan {

enum class BackendKind { MockGuided, MockNaive, Http };

struct BackendConfig {
  BackendKind kind = BackendKind::MockGuided;
  std::string endpoint;                            // http kind only
  std::string model;                               // http kind only
  double timeout_s = 30.0;
  std::string credential_env = "ONTOPLAN_API_KEY";
  std::string text_path = "/choices/0/message/content";  // JSON pointer into the reply
  double temperature = 0.0;
  unsigned seed = 0;

  // "mock-guided" | "mock-naive" | "http"; throws ParseError otherwise.
  static BackendKind parse_kind(const std::string& name);
};

std::string to_string(BackendKind kind);

// Black-box plan-text producer.
class PlanBackend {
 public:
  virtual ~PlanBackend() = default;
  virtual std::string request_plan(const std::string& prompt) = 0;
  // Latency of the last request (API timing reports); 0 for mocks.
  virtual double last_latency_s() const { return 0.0; }
};

// Validates config (http needs endpoint and model) and constructs the
// backend.
std::unique_ptr<PlanBackend> make_backend(const BackendConfig& config);

enum class MockMode { Guided, Naive };

// Deterministic stand-in for the LLM. Reads the guidance / environment /
// user-command blocks of the prompt, simulates placements with a grid scan
// over the destination region (cell 0.02 m, theta = 0), and emits a plan in
// the exact output grammar. Guided mode follows the recommended handling
// order from the guidance block; naive mode follows user mention order.
// Throws MockError when the prompt lacks the environment or user blocks.
std::string mock_generate(MockMode mode, const std::string& prompt, unsigned seed = 0);

}  // namespace ontoplan
