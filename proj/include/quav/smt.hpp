#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "quav/resexpr.hpp"
#include "quav/state.hpp"

namespace quav {

struct SolverHandle {
  // Command line, split on spaces; the script path is appended as the last
  // argument. Empty means "no solver available".
  std::string cmd;
  int timeout_ms = 60000;
  std::string logic = "ALL";
};

// Locates a usable default solver: $QUAV_SOLVER, a z3 binary on PATH, or the
// bundled Node wrapper next to the repository root. Returns empty cmd if none.
SolverHandle default_solver();

struct SmtOutcome {
  enum class Kind { Proved, Refuted, Unknown } kind;
  State model;          // Refuted: assignments for the query's free symbols
  bool model_complete = false;
  std::string reason;   // Unknown: timeout/unknown/unavailable detail
};

struct EncodeOpts {
  std::string logic = "ALL";
  // When set, every free integer symbol and every quantified integer is
  // restricted to [-bound, bound]: the bounded-instantiation fallback.
  std::optional<std::int64_t> bound;
};

// Satisfiability query for the negation of lhs <= rhs (pointwise). `unsat`
// proves the claim. Output is byte-stable for fixed inputs.
std::string encode_leq_query(const ResPtr& lhs, const ResPtr& rhs,
                             const EncodeOpts& opts = {});

// Runs the solver on an SMT-LIB 2 script via a fresh subprocess; parses
// sat/unsat/unknown and the model on sat. Throws SolverError when the
// process cannot be launched or produces unreadable output.
SmtOutcome run_solver(const SolverHandle& handle, const std::string& script);

}  // namespace quav
