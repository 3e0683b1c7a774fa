#pragma once

#include <string>

#include "quav/ast.hpp"
#include "quav/resexpr.hpp"

namespace quav {

// Global per-verification-task fresh-name supply; the '!' cannot appear in
// parsed identifiers, so generated names never collide with program names.
struct FreshNames {
  int counter = 0;
  std::string next(const std::string& base) {
    return base + "!" + std::to_string(++counter);
  }
};

struct TransformerResult {
  ResPtr result;
  bool certifying = false;  // directly encodable for the solver
};

// Quantitative predicate transformers over loop-free core commands, computed
// by structural recursion. Loop nodes raise EvalError; loops are handled by
// the annotation-driven pipeline in verify.
TransformerResult sp(const CmdPtr& loop_free, const ResPtr& P, FreshNames& fresh);
TransformerResult wp(const CmdPtr& loop_free, const ResPtr& Q, FreshNames& fresh);
TransformerResult wp_diamond(const CmdPtr& loop_free, const ResPtr& Q,
                             FreshNames& fresh);

}  // namespace quav
