#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "quav/state.hpp"

namespace quav {

struct Interval {
  std::int64_t lo = 0, hi = 0;  // inclusive; must satisfy lo <= hi
  std::int64_t size() const { return hi - lo + 1; }
};

struct ArrayBounds {
  std::int64_t idx_lo = 0, idx_hi = 0;  // index window [idx_lo, idx_hi)
  Interval values{0, 0};
};

// Finite enumeration domain: initial-state ranges per variable, loop unroll
// cap, the range of `local` initial values, and array index windows. Names
// not listed default to the singleton {0} / all-default-array.
struct DomainBounds {
  std::map<std::string, Interval> scalars;
  std::map<std::string, ArrayBounds> arrays;
  Interval local_range{0, 0};
  // Window for quantified variables standing for intermediate program values
  // (BinderRange::Wide); must cover every value reachable from the initial
  // ranges for the bounded oracle to be exact.
  Interval wide_range{0, 0};
  std::int64_t unroll_cap = 16;

  Interval scalar_range(const std::string& x) const {
    auto it = scalars.find(x);
    return it == scalars.end() ? Interval{0, 0} : it->second;
  }
  ArrayBounds array_bounds(const std::string& a) const {
    auto it = arrays.find(a);
    return it == arrays.end() ? ArrayBounds{} : it->second;
  }
};

// Enumerates every State assigning the given scalar names and array names
// values from their bounds. Order is deterministic.
std::vector<State> state_space(const DomainBounds& bounds,
                               const std::set<std::string>& scalar_names,
                               const std::set<std::string>& array_names);

}  // namespace quav
