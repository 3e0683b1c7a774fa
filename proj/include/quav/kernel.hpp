#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "quav/ast.hpp"
#include "quav/bounds.hpp"
#include "quav/resexpr.hpp"
#include "quav/smt.hpp"

namespace quav {

// Rule schemas of the three proof systems. Seq/Loop are the F/B forms;
// SeqL/SeqR/LoopZero exist only in the B-diamond system.
enum class Rule {
  Skip, Assign, Assume, Tick, Seq, SeqL, SeqR, ChoiceL, ChoiceR,
  Loop, LoopZero, Local, Disj, Constancy, Relax, Cons, Subst
};

std::string rule_name(Mode m, Rule r);   // e.g. "b:tick", "bd:seq-l"
bool parse_rule_name(const std::string& s, Mode& m, Rule& r);

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

// One rule application with its instantiation. Which fields are meaningful
// depends on the rule; check_derivation validates the shape.
struct Derivation {
  Mode mode;
  Rule rule;
  ResPtr P, Q;                  // axiom/Cons assertions
  ResPtr F;                     // Relax shift
  BoolPtr B;                    // Assume / Constancy predicate
  ExprPtr e;                    // Tick amount / Assign rhs
  std::string x, y;             // Assign/Local/Subst variables
  CmdPtr cmd;                   // ChoiceL/R other branch; Loop body when k = 0
  std::vector<ResPtr> family;   // Loop subvariant family P(0..k)
  std::int64_t m = -1;          // B-diamond Loop witness index
  std::vector<DerivPtr> premises;
};

struct CheckedTriple {
  Mode mode;
  ResPtr pre;
  CmdPtr cmd;
  ResPtr post;
};

// How <= side conditions are discharged.
struct SideMethod {
  bool use_smt = false;
  SolverHandle solver;
  DomainBounds bounds;  // bounded evaluation domain
};

// Validates the rule schema and every side condition, assembling the
// conclusion triple. Throws KernelError with the failing condition (and a
// witness state for failed <= checks).
CheckedTriple check_derivation(const Derivation& d, const SideMethod& side);

// Text format: (rule-name :key {value} ... premise*), values parsed with the
// annotation grammar.
DerivPtr parse_derivation(const std::string& text);

struct FuzzReport {
  int count = 0;
  int checked = 0;       // derivations that passed the kernel
  int semantic_failures = 0;
  int truncated = 0;
  std::vector<std::string> notes;  // counterexample descriptions
};

// Builds `count` random derivations bottom-up across all three systems,
// checks each through the kernel, and validates every resulting triple
// against the bounded semantics. Soundness demands zero failures.
FuzzReport fuzz_soundness(std::uint64_t seed, int count, const DomainBounds& bounds);

}  // namespace quav
