#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "quav/ast.hpp"
#include "quav/bounds.hpp"
#include "quav/resexpr.hpp"
#include "quav/state.hpp"

namespace quav {

// One resolved run of the big-step semantics.
struct Outcome {
  State state;
  std::int64_t q = 0;  // residual resource
  std::int64_t l = 0;  // minimal level observed during the run
  bool level_nonpos() const { return l <= 0; }

  friend bool operator==(const Outcome& a, const Outcome& b) {
    return a.q == b.q && a.l == b.l && a.state == b.state;
  }
  friend bool operator<(const Outcome& a, const Outcome& b) {
    if (a.q != b.q) return a.q < b.q;
    if (a.l != b.l) return a.l < b.l;
    return a.state < b.state;
  }
};

// Resolves the nondeterminism of choice, loop and local: a finite token
// sequence consumed in order. Left/Right picks a branch, a number gives a
// loop's unroll count or a local's initial value.
struct ScriptTok {
  enum class Kind { Left, Right, Num } kind;
  std::int64_t num = 0;
};

struct ChoiceScript {
  std::vector<ScriptTok> toks;
};

ChoiceScript parse_script(const std::string& csv);  // "L,R,3,-1"
std::string script_str(const ChoiceScript& s);

// Supplies decisions to the interpreter. FixedSource replays a ChoiceScript
// strictly (wrong-shaped or missing tokens raise ScriptError); RandomSource
// draws decisions and records them so the run can be replayed.
struct ScriptSource {
  virtual ~ScriptSource() = default;
  virtual bool next_dir() = 0;             // true = left
  virtual std::int64_t next_num(bool is_unroll) = 0;
};

struct FixedSource final : ScriptSource {
  const ChoiceScript& script;
  size_t pos = 0;
  explicit FixedSource(const ChoiceScript& s) : script(s) {}
  bool next_dir() override;
  std::int64_t next_num(bool is_unroll) override;
};

struct RandomSource final : ScriptSource {
  std::function<std::int64_t(std::int64_t, std::int64_t)> rand_in;  // inclusive
  Interval unroll{0, 4}, local{-2, 2};
  ChoiceScript recorded;
  bool next_dir() override;
  std::int64_t next_num(bool is_unroll) override;
};

struct ExecResult {
  bool stuck = false;
  Outcome out;  // valid when !stuck
};

// Scripted reference interpreter over the core grammar.
ExecResult exec(const CmdPtr& core, const State& init, std::int64_t p,
                const ChoiceScript& script);
ExecResult exec(const CmdPtr& core, const State& init, std::int64_t p,
                ScriptSource& src);

struct EnumResult {
  std::vector<Outcome> outcomes;  // deduplicated, deterministic order
  bool truncated = false;         // some loop hit the unroll cap
};

// Exact set of outcomes reachable within the unroll cap, with locals ranged
// over bounds.local_range (collapsed to {0} when the local is provably
// written before read).
EnumResult enumerate_runs(const CmdPtr& core, const State& init, std::int64_t p,
                          const DomainBounds& bounds);

struct HoldsResult {
  enum class Kind { True, False, Truncated } kind;
  std::string note;                // counterexample description when False
  std::optional<State> witness;
};

// Brute-force decision of the bounded triple semantics (states restricted to
// bounds; resource side exact via the shift lemma, anchored at p = 0).
HoldsResult holds_semantically(Mode mode, const ResPtr& P, const CmdPtr& core,
                               const ResPtr& Q, const DomainBounds& bounds);

// First-use classification of a scalar in a command: does some path read x
// before writing it, do all paths write it first, or neither.
enum class UseStatus { Reads, Writes, Neutral };
UseStatus first_use(const CmdPtr& core, const std::string& x);

}  // namespace quav
