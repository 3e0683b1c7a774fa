#include "quav/resexpr.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <vector>

namespace quav {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::F: return "f";
    case Mode::B: return "b";
    case Mode::BDiamond: return "bd";
  }
  return "?";
}

std::optional<Mode> mode_from_flag(const std::string& s) {
  if (s == "f") return Mode::F;
  if (s == "b") return Mode::B;
  if (s == "bd") return Mode::BDiamond;
  return std::nullopt;
}

// ---- constructors ----------------------------------------------------------

static std::shared_ptr<ResExpr> mk_r(ResExpr::Kind k) {
  auto r = std::make_shared<ResExpr>();
  r->kind = k;
  return r;
}

ResPtr r_lit(ExtInt v) {
  auto r = mk_r(ResExpr::Kind::Lit);
  r->lit = v;
  return r;
}
ResPtr r_fin(std::int64_t v) { return r_lit(ExtInt::finite(v)); }
ResPtr r_arith(ExprPtr e) {
  if (e->kind == Expr::Kind::Lit) return r_fin(e->lit);
  auto r = mk_r(ResExpr::Kind::Arith);
  r->e = std::move(e);
  return r;
}
ResPtr r_guard(BoolPtr b) {
  if (b->kind == BoolExpr::Kind::True) return r_lit(ExtInt::pos_inf());
  if (b->kind == BoolExpr::Kind::False) return r_lit(ExtInt::neg_inf());
  auto r = mk_r(ResExpr::Kind::Guard);
  r->g = std::move(b);
  return r;
}
ResPtr r_min(ResPtr a, ResPtr b) {
  if (a->kind == ResExpr::Kind::Lit) {
    if (a->lit.is_pos_inf()) return b;
    if (a->lit.is_neg_inf()) return a;
  }
  if (b->kind == ResExpr::Kind::Lit) {
    if (b->lit.is_pos_inf()) return a;
    if (b->lit.is_neg_inf()) return b;
  }
  auto r = mk_r(ResExpr::Kind::Min);
  r->a = std::move(a);
  r->b = std::move(b);
  return r;
}
ResPtr r_max(ResPtr a, ResPtr b) {
  if (a->kind == ResExpr::Kind::Lit) {
    if (a->lit.is_neg_inf()) return b;
    if (a->lit.is_pos_inf()) return a;
  }
  if (b->kind == ResExpr::Kind::Lit) {
    if (b->lit.is_neg_inf()) return a;
    if (b->lit.is_pos_inf()) return b;
  }
  auto r = mk_r(ResExpr::Kind::Max);
  r->a = std::move(a);
  r->b = std::move(b);
  return r;
}
ResPtr r_add(ResPtr a, ResPtr b) {
  auto r = mk_r(ResExpr::Kind::Add);
  r->a = std::move(a);
  r->b = std::move(b);
  return r;
}
ResPtr r_sub(ResPtr a, ExprPtr e) {
  auto r = mk_r(ResExpr::Kind::SubE);
  r->a = std::move(a);
  r->e = std::move(e);
  return r;
}
ResPtr r_sup(std::string x, ResPtr body, bool is_array, BinderRange tag) {
  auto r = mk_r(ResExpr::Kind::Sup);
  r->var = std::move(x);
  r->a = std::move(body);
  r->var_is_array = is_array;
  r->tag = tag;
  return r;
}
ResPtr r_inf(std::string x, ResPtr body, bool is_array, BinderRange tag) {
  auto r = mk_r(ResExpr::Kind::Inf);
  r->var = std::move(x);
  r->a = std::move(body);
  r->var_is_array = is_array;
  r->tag = tag;
  return r;
}

// ---- smart constructors ----------------------------------------------------

ResPtr add_expr(ResPtr r, const ExprPtr& e) {
  switch (r->kind) {
    case ResExpr::Kind::Lit:
      if (!r->lit.is_finite()) return r;
      return r_arith(e_add(e_lit(r->lit.value()), e));
    case ResExpr::Kind::Arith: return r_arith(e_add(r->e, e));
    case ResExpr::Kind::Guard: return r;
    case ResExpr::Kind::Min: return r_min(add_expr(r->a, e), add_expr(r->b, e));
    case ResExpr::Kind::Max: return r_max(add_expr(r->a, e), add_expr(r->b, e));
    case ResExpr::Kind::Add: return r_add(r->a, add_expr(r->b, e));
    case ResExpr::Kind::SubE: return r_sub(add_expr(r->a, e), r->e);
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      if (!free_vars(e).count(r->var)) {
        auto inner = add_expr(r->a, e);
        return r->kind == ResExpr::Kind::Sup
                   ? r_sup(r->var, inner, r->var_is_array, r->tag)
                   : r_inf(r->var, inner, r->var_is_array, r->tag);
      }
      return r_add(r, r_arith(e));
    }
  }
  return r;
}

ResPtr sub_expr(ResPtr r, const ExprPtr& e) {
  switch (r->kind) {
    case ResExpr::Kind::Lit:
      if (!r->lit.is_finite()) return r;
      return r_arith(e_sub(e_lit(r->lit.value()), e));
    case ResExpr::Kind::Arith: return r_arith(e_sub(r->e, e));
    case ResExpr::Kind::Guard: return r;
    case ResExpr::Kind::Min: return r_min(sub_expr(r->a, e), sub_expr(r->b, e));
    case ResExpr::Kind::Max: return r_max(sub_expr(r->a, e), sub_expr(r->b, e));
    case ResExpr::Kind::Add: return r_add(r->a, sub_expr(r->b, e));
    case ResExpr::Kind::SubE: return r_sub(sub_expr(r->a, e), r->e);
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      if (!free_vars(e).count(r->var)) {
        auto inner = sub_expr(r->a, e);
        return r->kind == ResExpr::Kind::Sup
                   ? r_sup(r->var, inner, r->var_is_array, r->tag)
                   : r_inf(r->var, inner, r->var_is_array, r->tag);
      }
      return r_sub(r, e);
    }
  }
  return r;
}

static bool mentions(const ResPtr& r, const std::string& x) {
  return free_vars_res(r).count(x) != 0;
}

// Clause normal form over the (min, max) distributive lattice: `outer` of
// clauses, each clause an `inner` of leaves. Returns false when the
// distribution exceeds the size cap.
static bool to_clauses(const ResPtr& r, ResExpr::Kind outer, ResExpr::Kind inner,
                       std::vector<std::vector<ResPtr>>& out) {
  if (r->kind == outer) {
    return to_clauses(r->a, outer, inner, out) &&
           to_clauses(r->b, outer, inner, out);
  }
  if (r->kind == inner) {
    std::vector<std::vector<ResPtr>> left, right;
    if (!to_clauses(r->a, outer, inner, left) ||
        !to_clauses(r->b, outer, inner, right))
      return false;
    if (out.size() + left.size() * right.size() > 4096) return false;
    for (auto& ca : left)
      for (auto& cb : right) {
        std::vector<ResPtr> merged = ca;
        merged.insert(merged.end(), cb.begin(), cb.end());
        out.push_back(std::move(merged));
      }
    return true;
  }
  out.push_back({r});
  return true;
}

// inf_x min_j max(A_j, [B_j1(x)], ...) = min_j max(A_j, [forall x. B_j1 v ...])
// and dually for sup. Exact over the unbounded domain; the binder survives
// only when x reaches a non-guard leaf (or the normal form explodes).
static ResPtr bind_quant(bool sup, const std::string& x, ResPtr body,
                         bool is_array, BinderRange tag) {
  if (!mentions(body, x)) return body;
  ResExpr::Kind outer = sup ? ResExpr::Kind::Max : ResExpr::Kind::Min;
  ResExpr::Kind inner = sup ? ResExpr::Kind::Min : ResExpr::Kind::Max;
  std::vector<std::vector<ResPtr>> clauses;
  auto bail = [&]() {
    return sup ? r_sup(x, body, is_array, tag) : r_inf(x, body, is_array, tag);
  };
  if (!to_clauses(body, outer, inner, clauses)) return bail();

  std::vector<ResPtr> done;
  done.reserve(clauses.size());
  for (auto& clause : clauses) {
    std::vector<ResPtr> free_comps;
    BoolPtr cond;
    for (auto& c : clause) {
      if (!mentions(c, x)) {
        free_comps.push_back(c);
      } else if (c->kind == ResExpr::Kind::Guard) {
        cond = cond ? b_or(cond, c->g) : c->g;
      } else {
        return bail();  // x reaches an arithmetic leaf
      }
    }
    // sup: min-clause gains [exists x. cond]; inf: max-clause [forall x. cond]
    ResPtr acc;
    if (cond) acc = r_guard(b_quant(sup, x, is_array, tag, cond));
    for (auto& c : free_comps)
      acc = acc ? (sup ? r_min(acc, c) : r_max(acc, c)) : c;
    if (!acc) acc = r_lit(sup ? ExtInt::pos_inf() : ExtInt::neg_inf());
    done.push_back(acc);
  }
  ResPtr out;
  for (auto& c : done) out = out ? (sup ? r_max(out, c) : r_min(out, c)) : c;
  return out;
}

ResPtr bind_sup(const std::string& x, ResPtr body, bool is_array, BinderRange tag) {
  return bind_quant(true, x, std::move(body), is_array, tag);
}
ResPtr bind_inf(const std::string& x, ResPtr body, bool is_array, BinderRange tag) {
  return bind_quant(false, x, std::move(body), is_array, tag);
}

// ---- free vars / substitution / equality ------------------------------------

void free_vars(const ResPtr& r, std::set<std::string>& out) {
  if (!r) return;
  switch (r->kind) {
    case ResExpr::Kind::Lit: return;
    case ResExpr::Kind::Arith: free_vars(r->e, out); return;
    case ResExpr::Kind::Guard: free_vars(r->g, out); return;
    case ResExpr::Kind::Min:
    case ResExpr::Kind::Max:
    case ResExpr::Kind::Add:
      free_vars(r->a, out);
      free_vars(r->b, out);
      return;
    case ResExpr::Kind::SubE:
      free_vars(r->a, out);
      free_vars(r->e, out);
      return;
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      std::set<std::string> inner;
      free_vars(r->a, inner);
      inner.erase(r->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

std::set<std::string> free_vars_res(const ResPtr& r) {
  std::set<std::string> s;
  free_vars(r, s);
  return s;
}

static std::string fresh_res(const std::string& base,
                             const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "!" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

ResPtr res_subst(const ResPtr& r, const std::string& x, const ExprPtr& by) {
  if (!r) return r;
  switch (r->kind) {
    case ResExpr::Kind::Lit: return r;
    case ResExpr::Kind::Arith: return r_arith(subst(r->e, x, by));
    case ResExpr::Kind::Guard: return r_guard(subst(r->g, x, by));
    case ResExpr::Kind::Min:
      return r_min(res_subst(r->a, x, by), res_subst(r->b, x, by));
    case ResExpr::Kind::Max:
      return r_max(res_subst(r->a, x, by), res_subst(r->b, x, by));
    case ResExpr::Kind::Add:
      return r_add(res_subst(r->a, x, by), res_subst(r->b, x, by));
    case ResExpr::Kind::SubE:
      return r_sub(res_subst(r->a, x, by), subst(r->e, x, by));
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      if (r->var == x) return r;
      ResPtr body = r->a;
      std::string var = r->var;
      if (free_vars(by).count(var)) {
        auto avoid = free_vars_res(body);
        auto byv = free_vars(by);
        avoid.insert(byv.begin(), byv.end());
        avoid.insert(x);
        var = fresh_res(var, avoid);
        body = res_subst(body, r->var, e_var(var));
      }
      body = res_subst(body, x, by);
      return r->kind == ResExpr::Kind::Sup
                 ? r_sup(var, body, r->var_is_array, r->tag)
                 : r_inf(var, body, r->var_is_array, r->tag);
    }
  }
  return r;
}

ResPtr res_subst_array(const ResPtr& r, const std::string& a, const ArrExpr& arr) {
  if (!r) return r;
  switch (r->kind) {
    case ResExpr::Kind::Lit: return r;
    case ResExpr::Kind::Arith: return r_arith(subst_array(r->e, a, arr));
    case ResExpr::Kind::Guard: return r_guard(subst_array(r->g, a, arr));
    case ResExpr::Kind::Min:
      return r_min(res_subst_array(r->a, a, arr), res_subst_array(r->b, a, arr));
    case ResExpr::Kind::Max:
      return r_max(res_subst_array(r->a, a, arr), res_subst_array(r->b, a, arr));
    case ResExpr::Kind::Add:
      return r_add(res_subst_array(r->a, a, arr), res_subst_array(r->b, a, arr));
    case ResExpr::Kind::SubE:
      return r_sub(res_subst_array(r->a, a, arr), subst_array(r->e, a, arr));
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      if (r->var_is_array && r->var == a) return r;
      auto body = res_subst_array(r->a, a, arr);
      return r->kind == ResExpr::Kind::Sup
                 ? r_sup(r->var, body, r->var_is_array, r->tag)
                 : r_inf(r->var, body, r->var_is_array, r->tag);
    }
  }
  return r;
}

bool res_equal(const ResPtr& a, const ResPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case ResExpr::Kind::Lit: return a->lit == b->lit;
    case ResExpr::Kind::Arith: return equal(a->e, b->e);
    case ResExpr::Kind::Guard: return equal(a->g, b->g);
    case ResExpr::Kind::Min:
    case ResExpr::Kind::Max:
    case ResExpr::Kind::Add:
      return res_equal(a->a, b->a) && res_equal(a->b, b->b);
    case ResExpr::Kind::SubE: return res_equal(a->a, b->a) && equal(a->e, b->e);
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf:
      return a->var == b->var && a->var_is_array == b->var_is_array &&
             res_equal(a->a, b->a);
  }
  return false;
}

bool encodable(const ResPtr& r) {
  if (!r) return false;
  switch (r->kind) {
    case ResExpr::Kind::Lit:
    case ResExpr::Kind::Arith:
    case ResExpr::Kind::Guard: return true;
    case ResExpr::Kind::Min:
    case ResExpr::Kind::Max: return encodable(r->a) && encodable(r->b);
    case ResExpr::Kind::Add:
    case ResExpr::Kind::SubE:
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: return false;
  }
  return false;
}

std::string pretty_res(const ResPtr& r) {
  switch (r->kind) {
    case ResExpr::Kind::Lit: return r->lit.str();
    case ResExpr::Kind::Arith: return pretty(r->e);
    case ResExpr::Kind::Guard: return "[" + pretty(r->g) + "]";
    case ResExpr::Kind::Min:
      return "min(" + pretty_res(r->a) + ", " + pretty_res(r->b) + ")";
    case ResExpr::Kind::Max:
      return "max(" + pretty_res(r->a) + ", " + pretty_res(r->b) + ")";
    case ResExpr::Kind::Add:
      return "(" + pretty_res(r->a) + " + " + pretty_res(r->b) + ")";
    case ResExpr::Kind::SubE:
      return "(" + pretty_res(r->a) + " - (" + pretty(r->e) + "))";
    case ResExpr::Kind::Sup:
      return "sup " + r->var + ". (" + pretty_res(r->a) + ")";
    case ResExpr::Kind::Inf:
      return "inf " + r->var + ". (" + pretty_res(r->a) + ")";
  }
  return "?";
}

// ---- evaluation ------------------------------------------------------------

const DomainBounds& empty_bounds() {
  static const DomainBounds b{};
  return b;
}

static std::int64_t eval_read(const State& s, const ArrExpr& a, std::int64_t idx);

std::int64_t eval_expr(const State& s, const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Lit: return e->lit;
    case Expr::Kind::Var: return s.get(e->var);
    case Expr::Kind::Read: return eval_read(s, e->arr, eval_expr(s, e->a));
    case Expr::Kind::Add: return checked_add(eval_expr(s, e->a), eval_expr(s, e->b));
    case Expr::Kind::Sub: return checked_sub(eval_expr(s, e->a), eval_expr(s, e->b));
    case Expr::Kind::Mul: return checked_mul(eval_expr(s, e->a), eval_expr(s, e->b));
    case Expr::Kind::Div: return euclid_div(eval_expr(s, e->a), e->lit);
    case Expr::Kind::Neg: return checked_sub(0, eval_expr(s, e->a));
    case Expr::Kind::Ite:
      return eval_bool(s, e->cond, empty_bounds()) ? eval_expr(s, e->a)
                                                   : eval_expr(s, e->b);
  }
  throw EvalError("bad expression");
}

static std::int64_t eval_read(const State& s, const ArrExpr& a, std::int64_t idx) {
  // last store wins
  for (auto it = a.stores.rbegin(); it != a.stores.rend(); ++it)
    if (eval_expr(s, it->first) == idx) return eval_expr(s, it->second);
  return s.get_array(a.base).get(idx);
}

static bool cmp_holds(CmpOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

// Concrete value of an array-valued term in a state.
static ArrayVal eval_arr(const State& s, const ArrExpr& a) {
  ArrayVal v = s.get_array(a.base);
  for (auto& [i, e] : a.stores) v.set(eval_expr(s, i), eval_expr(s, e));
  return v;
}

static Interval quant_window(const DomainBounds& bounds, BinderRange tag) {
  switch (tag) {
    case BinderRange::Local: return bounds.local_range;
    case BinderRange::Wide: return bounds.wide_range;
    case BinderRange::Initial: {
      // hull of the declared initial ranges
      bool any = false;
      Interval h{0, 0};
      for (auto& [_, iv] : bounds.scalars) {
        if (!any) {
          h = iv;
          any = true;
        } else {
          h.lo = std::min(h.lo, iv.lo);
          h.hi = std::max(h.hi, iv.hi);
        }
      }
      return any ? h : Interval{0, 0};
    }
  }
  return {0, 0};
}

static ArrayBounds array_hull(const DomainBounds& bounds) {
  bool any = false;
  ArrayBounds h;
  for (auto& [_, ab] : bounds.arrays) {
    if (!any) {
      h = ab;
      any = true;
    } else {
      h.idx_lo = std::min(h.idx_lo, ab.idx_lo);
      h.idx_hi = std::max(h.idx_hi, ab.idx_hi);
      h.values.lo = std::min(h.values.lo, ab.values.lo);
      h.values.hi = std::max(h.values.hi, ab.values.hi);
    }
  }
  return h;
}

template <typename Fn>
static bool for_each_array_content(const ArrayBounds& ab, Fn&& fn) {
  std::vector<std::int64_t> idx;
  for (std::int64_t i = ab.idx_lo; i < ab.idx_hi; ++i) idx.push_back(i);
  std::vector<std::int64_t> cur(idx.size(), ab.values.lo);
  while (true) {
    ArrayVal av;
    for (size_t k = 0; k < idx.size(); ++k) av.set(idx[k], cur[k]);
    if (!fn(av)) return false;
    size_t k = 0;
    for (; k < cur.size(); ++k) {
      if (cur[k] < ab.values.hi) {
        ++cur[k];
        break;
      }
      cur[k] = ab.values.lo;
    }
    if (k == cur.size()) return true;
  }
}

bool eval_bool(const State& s, const BoolPtr& b, const DomainBounds& bounds) {
  switch (b->kind) {
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::Cmp:
      return cmp_holds(b->op, eval_expr(s, b->e1), eval_expr(s, b->e2));
    case BoolExpr::Kind::And:
      return eval_bool(s, b->l, bounds) && eval_bool(s, b->r, bounds);
    case BoolExpr::Kind::Or:
      return eval_bool(s, b->l, bounds) || eval_bool(s, b->r, bounds);
    case BoolExpr::Kind::Not: return !eval_bool(s, b->l, bounds);
    case BoolExpr::Kind::ForallRange: {
      std::int64_t lo = eval_expr(s, b->e1), hi = eval_expr(s, b->e2);
      State t = s;
      for (std::int64_t v = lo; v < hi; ++v) {
        t.scalars[b->var] = v;
        if (!eval_bool(t, b->l, bounds)) return false;
      }
      return true;
    }
    case BoolExpr::Kind::Quant: {
      if (b->var_is_array) {
        ArrayBounds ab = array_hull(bounds);
        State t = s;
        bool found_all = for_each_array_content(ab, [&](const ArrayVal& av) {
          t.arrays[b->var] = av;
          bool holds = eval_bool(t, b->l, bounds);
          if (b->exists && holds) return false;   // stop: witness found
          if (!b->exists && !holds) return false; // stop: counterexample
          return true;
        });
        return b->exists ? !found_all : found_all;
      }
      Interval w = quant_window(bounds, b->tag);
      State t = s;
      for (std::int64_t v = w.lo; v <= w.hi; ++v) {
        t.scalars[b->var] = v;
        bool holds = eval_bool(t, b->l, bounds);
        if (b->exists && holds) return true;
        if (!b->exists && !holds) return false;
      }
      return !b->exists;
    }
    case BoolExpr::Kind::ArrEq:
      return eval_arr(s, b->a1) == eval_arr(s, b->a2);
  }
  throw EvalError("bad boolean expression");
}

ExtInt eval_res(const ResPtr& r, const State& s, const DomainBounds& bounds) {
  switch (r->kind) {
    case ResExpr::Kind::Lit: return r->lit;
    case ResExpr::Kind::Arith: return ExtInt::finite(eval_expr(s, r->e));
    case ResExpr::Kind::Guard:
      return eval_bool(s, r->g, bounds) ? ExtInt::pos_inf() : ExtInt::neg_inf();
    case ResExpr::Kind::Min:
      return min(eval_res(r->a, s, bounds), eval_res(r->b, s, bounds));
    case ResExpr::Kind::Max:
      return max(eval_res(r->a, s, bounds), eval_res(r->b, s, bounds));
    case ResExpr::Kind::Add:
      return eval_res(r->a, s, bounds) + eval_res(r->b, s, bounds);
    case ResExpr::Kind::SubE:
      return eval_res(r->a, s, bounds).minus(eval_expr(s, r->e));
    case ResExpr::Kind::Sup:
    case ResExpr::Kind::Inf: {
      bool is_sup = r->kind == ResExpr::Kind::Sup;
      ExtInt acc = is_sup ? ExtInt::neg_inf() : ExtInt::pos_inf();
      State t = s;
      if (r->var_is_array) {
        ArrayBounds ab = array_hull(bounds);
        for_each_array_content(ab, [&](const ArrayVal& av) {
          t.arrays[r->var] = av;
          ExtInt v = eval_res(r->a, t, bounds);
          acc = is_sup ? max(acc, v) : min(acc, v);
          // short-circuit at the absorbing element
          return !(is_sup ? acc.is_pos_inf() : acc.is_neg_inf());
        });
        return acc;
      }
      Interval w = quant_window(bounds, r->tag);
      for (std::int64_t v = w.lo; v <= w.hi; ++v) {
        t.scalars[r->var] = v;
        ExtInt x = eval_res(r->a, t, bounds);
        acc = is_sup ? max(acc, x) : min(acc, x);
        if (is_sup ? acc.is_pos_inf() : acc.is_neg_inf()) break;
      }
      return acc;
    }
  }
  throw EvalError("bad resource expression");
}

// ---- lift ------------------------------------------------------------------

ResPtr lift(const FactoredAssertion& f, Mode mode) {
  if (mode == Mode::F) return r_max(r_guard(b_not(f.spec)), r_arith(f.res));
  return r_min(r_guard(f.spec), r_arith(f.res));
}

// ---- bounded pointwise order -------------------------------------------------

static void collect_array_names(const BoolPtr& b, std::set<std::string>& out);

void collect_arrays(const ResPtr& r, std::set<std::string>& out);

static void collect_array_names(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Read) {
    out.insert(e->arr.base);
    for (auto& [i, v] : e->arr.stores) {
      collect_array_names(i, out);
      collect_array_names(v, out);
    }
  }
  if (e->cond) collect_array_names(e->cond, out);
  collect_array_names(e->a, out);
  collect_array_names(e->b, out);
}

static void collect_array_names(const BoolPtr& b, std::set<std::string>& out) {
  if (!b) return;
  collect_array_names(b->e1, out);
  collect_array_names(b->e2, out);
  collect_array_names(b->l, out);
  collect_array_names(b->r, out);
  if (b->kind == BoolExpr::Kind::ArrEq) {
    out.insert(b->a1.base);
    out.insert(b->a2.base);
    for (auto& st : {b->a1.stores, b->a2.stores})
      for (auto& [i, v] : st) {
        collect_array_names(i, out);
        collect_array_names(v, out);
      }
  }
  if (b->kind == BoolExpr::Kind::Quant && b->var_is_array) out.erase(b->var);
}

void collect_arrays(const ResPtr& r, std::set<std::string>& out) {
  if (!r) return;
  collect_array_names(r->e, out);
  collect_array_names(r->g, out);
  collect_arrays(r->a, out);
  collect_arrays(r->b, out);
  if ((r->kind == ResExpr::Kind::Sup || r->kind == ResExpr::Kind::Inf) &&
      r->var_is_array)
    out.erase(r->var);
}

LeqResult leq_bounded(const ResPtr& p, const ResPtr& q, const DomainBounds& bounds) {
  std::set<std::string> names = free_vars_res(p);
  auto qn = free_vars_res(q);
  names.insert(qn.begin(), qn.end());
  std::set<std::string> arrays;
  collect_arrays(p, arrays);
  collect_arrays(q, arrays);
  std::set<std::string> scalars;
  for (auto& n : names)
    if (!arrays.count(n)) scalars.insert(n);

  for (const State& s : state_space(bounds, scalars, arrays)) {
    ExtInt vp = eval_res(p, s, bounds);
    ExtInt vq = eval_res(q, s, bounds);
    if (!(vp <= vq))
      return {LeqResult::Kind::False, s,
              pretty_res(p) + " = " + vp.str() + " > " + vq.str() + " = " +
                  pretty_res(q)};
  }
  return {LeqResult::Kind::True, std::nullopt, ""};
}

// ---- simplification --------------------------------------------------------

static ExprPtr fold_expr(const ExprPtr& e) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Lit:
    case Expr::Kind::Var: return e;
    case Expr::Kind::Read: {
      ArrExpr a;
      a.base = e->arr.base;
      for (auto& [i, v] : e->arr.stores)
        a.stores.emplace_back(fold_expr(i), fold_expr(v));
      return e_read(std::move(a), fold_expr(e->a));
    }
    case Expr::Kind::Neg: {
      auto x = fold_expr(e->a);
      if (x->kind == Expr::Kind::Lit) return e_lit(checked_sub(0, x->lit));
      return e_neg(x);
    }
    case Expr::Kind::Div: {
      auto x = fold_expr(e->a);
      if (x->kind == Expr::Kind::Lit) return e_lit(euclid_div(x->lit, e->lit));
      return e_div(x, e->lit);
    }
    case Expr::Kind::Ite: return e_ite(e->cond, fold_expr(e->a), fold_expr(e->b));
    default: {
      auto a = fold_expr(e->a), b = fold_expr(e->b);
      bool lits = a->kind == Expr::Kind::Lit && b->kind == Expr::Kind::Lit;
      switch (e->kind) {
        case Expr::Kind::Add:
          if (lits) return e_lit(checked_add(a->lit, b->lit));
          if (b->kind == Expr::Kind::Lit && b->lit == 0) return a;
          if (a->kind == Expr::Kind::Lit && a->lit == 0) return b;
          // (x - c) + c
          if (b->kind == Expr::Kind::Lit && a->kind == Expr::Kind::Sub &&
              a->b->kind == Expr::Kind::Lit && a->b->lit == b->lit)
            return a->a;
          return e_add(a, b);
        case Expr::Kind::Sub:
          if (lits) return e_lit(checked_sub(a->lit, b->lit));
          if (b->kind == Expr::Kind::Lit && b->lit == 0) return a;
          // (x + c) - c
          if (b->kind == Expr::Kind::Lit && a->kind == Expr::Kind::Add &&
              a->b->kind == Expr::Kind::Lit && a->b->lit == b->lit)
            return a->a;
          return e_sub(a, b);
        case Expr::Kind::Mul:
          if (lits) return e_lit(checked_mul(a->lit, b->lit));
          if ((a->kind == Expr::Kind::Lit && a->lit == 1)) return b;
          if ((b->kind == Expr::Kind::Lit && b->lit == 1)) return a;
          return e_mul(a, b);
        default: return e;
      }
    }
  }
}

static BoolPtr fold_bool(const BoolPtr& b) {
  if (!b) return b;
  switch (b->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return b;
    case BoolExpr::Kind::Cmp: {
      auto x = fold_expr(b->e1), y = fold_expr(b->e2);
      if (x->kind == Expr::Kind::Lit && y->kind == Expr::Kind::Lit)
        return cmp_holds(b->op, x->lit, y->lit) ? b_true() : b_false();
      return b_cmp(b->op, x, y);
    }
    case BoolExpr::Kind::And: {
      auto l = fold_bool(b->l), r = fold_bool(b->r);
      if (l->kind == BoolExpr::Kind::False || r->kind == BoolExpr::Kind::False)
        return b_false();
      if (l->kind == BoolExpr::Kind::True) return r;
      if (r->kind == BoolExpr::Kind::True) return l;
      return b_and(l, r);
    }
    case BoolExpr::Kind::Or: {
      auto l = fold_bool(b->l), r = fold_bool(b->r);
      if (l->kind == BoolExpr::Kind::True || r->kind == BoolExpr::Kind::True)
        return b_true();
      if (l->kind == BoolExpr::Kind::False) return r;
      if (r->kind == BoolExpr::Kind::False) return l;
      return b_or(l, r);
    }
    case BoolExpr::Kind::Not: {
      auto l = fold_bool(b->l);
      if (l->kind == BoolExpr::Kind::True) return b_false();
      if (l->kind == BoolExpr::Kind::False) return b_true();
      if (l->kind == BoolExpr::Kind::Not) return l->l;
      return b_not(l);
    }
    case BoolExpr::Kind::ForallRange:
      return b_forall_range(b->var, fold_expr(b->e1), fold_expr(b->e2),
                            fold_bool(b->l));
    case BoolExpr::Kind::Quant: {
      auto body = fold_bool(b->l);
      if (body->kind == BoolExpr::Kind::True) return b_true();
      if (body->kind == BoolExpr::Kind::False) return b_false();
      if (!free_vars(body).count(b->var)) return body;
      return b_quant(b->exists, b->var, b->var_is_array, b->tag, body);
    }
    case BoolExpr::Kind::ArrEq: return b;
  }
  return b;
}

ResPtr simplify(const ResPtr& r) {
  if (!r) return r;
  switch (r->kind) {
    case ResExpr::Kind::Lit: return r;
    case ResExpr::Kind::Arith: return r_arith(fold_expr(r->e));
    case ResExpr::Kind::Guard: return r_guard(fold_bool(r->g));
    case ResExpr::Kind::Min: {
      auto a = simplify(r->a), b = simplify(r->b);
      if (res_equal(a, b)) return a;
      if (a->kind == ResExpr::Kind::Lit && b->kind == ResExpr::Kind::Lit)
        return r_lit(min(a->lit, b->lit));
      return r_min(a, b);
    }
    case ResExpr::Kind::Max: {
      auto a = simplify(r->a), b = simplify(r->b);
      if (res_equal(a, b)) return a;
      if (a->kind == ResExpr::Kind::Lit && b->kind == ResExpr::Kind::Lit)
        return r_lit(max(a->lit, b->lit));
      return r_max(a, b);
    }
    case ResExpr::Kind::Add: {
      auto a = simplify(r->a), b = simplify(r->b);
      if (b->kind == ResExpr::Kind::Lit && b->lit.is_finite())
        return add_expr(a, e_lit(b->lit.value()));
      if (a->kind == ResExpr::Kind::Lit && a->lit.is_finite())
        return add_expr(b, e_lit(a->lit.value()));
      if (a->kind == ResExpr::Kind::Arith) return add_expr(b, a->e);
      if (b->kind == ResExpr::Kind::Arith) return add_expr(a, b->e);
      return r_add(a, b);
    }
    case ResExpr::Kind::SubE: {
      auto a = simplify(r->a);
      return sub_expr(a, fold_expr(r->e));
    }
    case ResExpr::Kind::Sup:
      return bind_sup(r->var, simplify(r->a), r->var_is_array, r->tag);
    case ResExpr::Kind::Inf:
      return bind_inf(r->var, simplify(r->a), r->var_is_array, r->tag);
  }
  return r;
}

}  // namespace quav
