#pragma once

#include <stdexcept>
#include <string>

namespace quav {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg) + " (line " + std::to_string(line_) +
                           ", col " + std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

// Runtime evaluation failures: integer overflow, +inf + -inf, lookups of
// undeclared names. Aborts the enclosing run instead of wrapping around.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ChoiceScript consumed past its end, or the next token has the wrong shape
// for the nondeterministic site that was reached.
struct ScriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Annotation/program well-formedness violations found during VC generation.
struct IllFormedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Derivation does not match its rule schema or fails a side condition.
struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace quav
