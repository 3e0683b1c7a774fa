#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "quav/ast.hpp"
#include "quav/resexpr.hpp"

namespace quav {

// Random program/assertion generator shared by the property-test suites and
// the kernel fuzzer. Quotas keep the bounded oracles exact and cheap: few
// binder sites, unit drift per assignment, small constants.
struct GenOpts {
  int max_depth = 5;
  int max_binders = 2;   // assign + local sites
  int max_choices = 4;
  bool allow_loops = false;
  std::vector<std::string> vars = {"x", "y"};
  std::int64_t cmax = 2;  // constants in [-cmax, cmax]
};

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::int64_t in(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng);
  }
  bool coin() { return in(0, 1) == 1; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(in(0, static_cast<std::int64_t>(v.size()) - 1))];
  }
};

// Drift-bounded right-hand side: c, v, v+c, or v-c with |c| <= cmax.
ExprPtr random_small_expr(Rng& rng, const GenOpts& opts);
BoolPtr random_cmp(Rng& rng, const GenOpts& opts);
CmdPtr random_command(Rng& rng, const GenOpts& opts);

// Random assertion: a min/max tree over guards, variables and constants.
ResPtr random_resexpr(Rng& rng, const GenOpts& opts, int depth = 2);

}  // namespace quav
