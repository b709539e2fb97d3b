#pragma once

#include <stdexcept>
#include <string>

namespace ontoplan {

// Malformed input text (triple documents, scene files, plan text).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, long line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_ = -1;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoTaskFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyObjects : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Action rejected by the simulator; what() is the machine-readable reason
// echoed verbatim into replanning feedback.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidTrials : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ontoplan
