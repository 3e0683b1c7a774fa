#include "quav/bounds.hpp"

namespace quav {

std::vector<State> state_space(const DomainBounds& bounds,
                               const std::set<std::string>& scalar_names,
                               const std::set<std::string>& array_names) {
  std::vector<State> out;
  State base;
  for (auto& n : scalar_names) base.scalars[n] = 0;
  for (auto& a : array_names) base.arrays[a] = ArrayVal{};
  out.push_back(base);

  for (auto& n : scalar_names) {
    Interval iv = bounds.scalar_range(n);
    std::vector<State> next;
    next.reserve(out.size() * iv.size());
    for (auto& st : out)
      for (std::int64_t v = iv.lo; v <= iv.hi; ++v) {
        State s = st;
        s.scalars[n] = v;
        next.push_back(std::move(s));
      }
    out = std::move(next);
  }

  for (auto& a : array_names) {
    ArrayBounds ab = bounds.array_bounds(a);
    std::vector<State> next;
    for (auto& st : out) {
      // enumerate contents of the index window; outside it stays default 0
      std::vector<std::int64_t> idx;
      for (std::int64_t i = ab.idx_lo; i < ab.idx_hi; ++i) idx.push_back(i);
      std::vector<std::int64_t> cur(idx.size(), ab.values.lo);
      while (true) {
        State s = st;
        ArrayVal av;
        for (size_t k = 0; k < idx.size(); ++k) av.set(idx[k], cur[k]);
        s.arrays[a] = std::move(av);
        next.push_back(std::move(s));
        size_t k = 0;
        for (; k < cur.size(); ++k) {
          if (cur[k] < ab.values.hi) {
            ++cur[k];
            break;
          }
          cur[k] = ab.values.lo;
        }
        if (k == cur.size()) break;
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace quav
