#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quav/ast.hpp"
#include "quav/bounds.hpp"
#include "quav/resexpr.hpp"
#include "quav/smt.hpp"

namespace quav {

struct VC {
  std::string label;
  Mode mode;
  ResPtr lhs, rhs;        // the claim lhs <= rhs pointwise
  bool encodable_vc = false;
  std::string origin;     // which rule produced it
};

struct Verdict {
  enum class Kind { Valid, ValidBounded, Invalid, Unknown, IllFormed };
  Kind kind;
  std::string vc_label;
  std::optional<State> witness;
  std::string detail;

  static const char* name(Kind k);
};

// Per-VC discharge record, for reports.
struct VcTrace {
  VC vc;
  std::string status;  // proved | proved-bounded | refuted | unknown | skipped
  std::string note;
  double time_ms = 0;
};

// Substitute an expression for a scalar in both parts of a factored assertion.
FactoredAssertion subst_fact(const FactoredAssertion& f, const std::string& x,
                             const ExprPtr& by);

// Loop summary per the subvariant protocol: index 0 / index k instances, with
// 0 <= k conjoined (modes F and B) or 0 <= m < k (mode B-diamond).
std::pair<FactoredAssertion, FactoredAssertion> loop_summary(const LoopSpec& spec,
                                                             Mode mode);

// Verification conditions for a fully annotated program. Deterministic:
// identical input yields an identical list. Throws IllFormedError.
std::vector<VC> gen_vcs(const Program& prog, Mode mode);

// Discharges every VC through the solver; on unknown (or a non-encodable VC)
// with a fallback bound set, re-checks by bounded instantiation and downgrades
// the verdict to ValidBounded.
Verdict check(const Program& prog, Mode mode, const SolverHandle& solver,
              std::optional<std::int64_t> fallback_bound = std::nullopt,
              std::vector<VcTrace>* trace = nullptr);

}  // namespace quav
