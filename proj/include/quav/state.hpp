#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "quav/diag.hpp"

namespace quav {

// Total function Z -> Z represented as a default plus finitely many
// overrides. Kept canonical (no override equal to the default) so that
// structural comparison is semantic equality.
struct ArrayVal {
  std::int64_t def = 0;
  std::map<std::int64_t, std::int64_t> elems;

  std::int64_t get(std::int64_t i) const {
    auto it = elems.find(i);
    return it == elems.end() ? def : it->second;
  }
  void set(std::int64_t i, std::int64_t v) {
    if (v == def)
      elems.erase(i);
    else
      elems[i] = v;
  }
  friend bool operator==(const ArrayVal& a, const ArrayVal& b) {
    return a.def == b.def && a.elems == b.elems;
  }
  friend bool operator<(const ArrayVal& a, const ArrayVal& b) {
    if (a.def != b.def) return a.def < b.def;
    return a.elems < b.elems;
  }
};

struct State {
  std::map<std::string, std::int64_t> scalars;
  std::map<std::string, ArrayVal> arrays;

  std::int64_t get(const std::string& x) const {
    auto it = scalars.find(x);
    if (it == scalars.end()) throw EvalError("undeclared scalar: " + x);
    return it->second;
  }
  const ArrayVal& get_array(const std::string& a) const {
    auto it = arrays.find(a);
    if (it == arrays.end()) throw EvalError("undeclared array: " + a);
    return it->second;
  }
  bool has(const std::string& x) const { return scalars.count(x) != 0; }

  friend bool operator==(const State& a, const State& b) {
    return a.scalars == b.scalars && a.arrays == b.arrays;
  }
  friend bool operator<(const State& a, const State& b) {
    if (a.scalars != b.scalars) return a.scalars < b.scalars;
    return a.arrays < b.arrays;
  }
};

}  // namespace quav
