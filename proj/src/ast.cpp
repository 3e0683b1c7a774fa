#include "quav/ast.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "quav/diag.hpp"

namespace quav {

bool Program::declared(const std::string& n) const {
  return std::any_of(decls.begin(), decls.end(),
                     [&](const Decl& d) { return d.name == n; });
}

bool Program::declared_array(const std::string& n) const {
  return std::any_of(decls.begin(), decls.end(),
                     [&](const Decl& d) { return d.name == n && d.is_array; });
}

// ---- constructors ----------------------------------------------------------

static std::shared_ptr<Expr> mk_e(Expr::Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

ExprPtr e_lit(std::int64_t v) {
  auto e = mk_e(Expr::Kind::Lit);
  e->lit = v;
  return e;
}
ExprPtr e_var(std::string name) {
  auto e = mk_e(Expr::Kind::Var);
  e->var = std::move(name);
  return e;
}
ExprPtr e_read(ArrExpr a, ExprPtr idx) {
  auto e = mk_e(Expr::Kind::Read);
  e->arr = std::move(a);
  e->a = std::move(idx);
  return e;
}
ExprPtr e_add(ExprPtr a, ExprPtr b) {
  auto e = mk_e(Expr::Kind::Add);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
ExprPtr e_sub(ExprPtr a, ExprPtr b) {
  auto e = mk_e(Expr::Kind::Sub);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
ExprPtr e_mul(ExprPtr a, ExprPtr b) {
  auto e = mk_e(Expr::Kind::Mul);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
ExprPtr e_div(ExprPtr a, std::int64_t divisor) {
  assert(divisor != 0);
  auto e = mk_e(Expr::Kind::Div);
  e->a = std::move(a);
  e->lit = divisor;
  return e;
}
ExprPtr e_neg(ExprPtr a) {
  auto e = mk_e(Expr::Kind::Neg);
  e->a = std::move(a);
  return e;
}
ExprPtr e_ite(BoolPtr c, ExprPtr a, ExprPtr b) {
  auto e = mk_e(Expr::Kind::Ite);
  e->cond = std::move(c);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

static std::shared_ptr<BoolExpr> mk_b(BoolExpr::Kind k) {
  auto b = std::make_shared<BoolExpr>();
  b->kind = k;
  return b;
}

BoolPtr b_true() { return mk_b(BoolExpr::Kind::True); }
BoolPtr b_false() { return mk_b(BoolExpr::Kind::False); }
BoolPtr b_cmp(CmpOp op, ExprPtr a, ExprPtr b) {
  auto x = mk_b(BoolExpr::Kind::Cmp);
  x->op = op;
  x->e1 = std::move(a);
  x->e2 = std::move(b);
  return x;
}
BoolPtr b_and(BoolPtr a, BoolPtr b) {
  auto x = mk_b(BoolExpr::Kind::And);
  x->l = std::move(a);
  x->r = std::move(b);
  return x;
}
BoolPtr b_or(BoolPtr a, BoolPtr b) {
  auto x = mk_b(BoolExpr::Kind::Or);
  x->l = std::move(a);
  x->r = std::move(b);
  return x;
}
BoolPtr b_not(BoolPtr a) {
  auto x = mk_b(BoolExpr::Kind::Not);
  x->l = std::move(a);
  return x;
}
BoolPtr b_forall_range(std::string var, ExprPtr lo, ExprPtr hi, BoolPtr body) {
  auto x = mk_b(BoolExpr::Kind::ForallRange);
  x->var = std::move(var);
  x->e1 = std::move(lo);
  x->e2 = std::move(hi);
  x->l = std::move(body);
  return x;
}
BoolPtr b_quant(bool exists, std::string var, bool is_array, BinderRange tag,
                BoolPtr body) {
  auto x = mk_b(BoolExpr::Kind::Quant);
  x->exists = exists;
  x->var = std::move(var);
  x->var_is_array = is_array;
  x->tag = tag;
  x->l = std::move(body);
  return x;
}
BoolPtr b_arr_eq(ArrExpr a, ArrExpr b) {
  auto x = mk_b(BoolExpr::Kind::ArrEq);
  x->a1 = std::move(a);
  x->a2 = std::move(b);
  return x;
}

static std::shared_ptr<Command> mk_c(Command::Kind k) {
  auto c = std::make_shared<Command>();
  c->kind = k;
  return c;
}

CmdPtr c_skip() { return mk_c(Command::Kind::Skip); }
CmdPtr c_assign(std::string x, ExprPtr e) {
  auto c = mk_c(Command::Kind::Assign);
  c->var = std::move(x);
  c->e1 = std::move(e);
  return c;
}
CmdPtr c_arr_assign(std::string a, ExprPtr idx, ExprPtr val) {
  auto c = mk_c(Command::Kind::ArrAssign);
  c->var = std::move(a);
  c->e1 = std::move(idx);
  c->e2 = std::move(val);
  return c;
}
CmdPtr c_assume(BoolPtr b) {
  auto c = mk_c(Command::Kind::Assume);
  c->cond = std::move(b);
  return c;
}
CmdPtr c_tick(ExprPtr e) {
  auto c = mk_c(Command::Kind::Tick);
  c->e1 = std::move(e);
  return c;
}
CmdPtr c_seq(CmdPtr a, CmdPtr b) {
  auto c = mk_c(Command::Kind::Seq);
  c->c1 = std::move(a);
  c->c2 = std::move(b);
  return c;
}
CmdPtr c_choice(CmdPtr a, CmdPtr b) {
  auto c = mk_c(Command::Kind::Choice);
  c->c1 = std::move(a);
  c->c2 = std::move(b);
  return c;
}
CmdPtr c_loop(CmdPtr body, LoopSpecPtr spec) {
  auto c = mk_c(Command::Kind::Loop);
  c->c1 = std::move(body);
  c->loop_spec = std::move(spec);
  return c;
}
CmdPtr c_local(std::string x, CmdPtr body) {
  auto c = mk_c(Command::Kind::Local);
  c->var = std::move(x);
  c->c1 = std::move(body);
  return c;
}
CmdPtr c_if(BoolPtr b, CmdPtr t, CmdPtr e, bool demon) {
  auto c = mk_c(Command::Kind::If);
  c->cond = std::move(b);
  c->c1 = std::move(t);
  c->c2 = std::move(e);
  c->demon = demon;
  return c;
}
CmdPtr c_while(BoolPtr b, CmdPtr body, LoopSpecPtr spec) {
  auto c = mk_c(Command::Kind::While);
  c->cond = std::move(b);
  c->c1 = std::move(body);
  c->loop_spec = std::move(spec);
  return c;
}

// ---- free variables --------------------------------------------------------

static void fv_arr(const ArrExpr& a, std::set<std::string>& out) {
  out.insert(a.base);
  for (auto& [i, v] : a.stores) {
    free_vars(i, out);
    free_vars(v, out);
  }
}

void free_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::Lit: return;
    case Expr::Kind::Var: out.insert(e->var); return;
    case Expr::Kind::Read:
      fv_arr(e->arr, out);
      free_vars(e->a, out);
      return;
    case Expr::Kind::Neg: free_vars(e->a, out); return;
    case Expr::Kind::Div: free_vars(e->a, out); return;
    case Expr::Kind::Ite:
      free_vars(e->cond, out);
      free_vars(e->a, out);
      free_vars(e->b, out);
      return;
    default:
      free_vars(e->a, out);
      free_vars(e->b, out);
      return;
  }
}

void free_vars(const BoolPtr& b, std::set<std::string>& out) {
  if (!b) return;
  switch (b->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return;
    case BoolExpr::Kind::Cmp:
      free_vars(b->e1, out);
      free_vars(b->e2, out);
      return;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
      free_vars(b->l, out);
      free_vars(b->r, out);
      return;
    case BoolExpr::Kind::Not: free_vars(b->l, out); return;
    case BoolExpr::Kind::ForallRange: {
      free_vars(b->e1, out);
      free_vars(b->e2, out);
      std::set<std::string> inner;
      free_vars(b->l, inner);
      inner.erase(b->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case BoolExpr::Kind::Quant: {
      std::set<std::string> inner;
      free_vars(b->l, inner);
      inner.erase(b->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case BoolExpr::Kind::ArrEq:
      fv_arr(b->a1, out);
      fv_arr(b->a2, out);
      return;
  }
}

void free_vars(const CmdPtr& c, std::set<std::string>& out) {
  if (!c) return;
  switch (c->kind) {
    case Command::Kind::Skip: return;
    case Command::Kind::Assign:
      out.insert(c->var);
      free_vars(c->e1, out);
      return;
    case Command::Kind::ArrAssign:
      out.insert(c->var);
      free_vars(c->e1, out);
      free_vars(c->e2, out);
      return;
    case Command::Kind::Assume: free_vars(c->cond, out); return;
    case Command::Kind::Tick: free_vars(c->e1, out); return;
    case Command::Kind::Seq:
    case Command::Kind::Choice:
      free_vars(c->c1, out);
      free_vars(c->c2, out);
      return;
    case Command::Kind::Loop: free_vars(c->c1, out); return;
    case Command::Kind::Local: {
      std::set<std::string> inner;
      free_vars(c->c1, inner);
      inner.erase(c->var);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Command::Kind::If:
      free_vars(c->cond, out);
      free_vars(c->c1, out);
      free_vars(c->c2, out);
      return;
    case Command::Kind::While:
      free_vars(c->cond, out);
      free_vars(c->c1, out);
      return;
  }
}

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> s;
  free_vars(e, s);
  return s;
}
std::set<std::string> free_vars(const BoolPtr& b) {
  std::set<std::string> s;
  free_vars(b, s);
  return s;
}
std::set<std::string> free_vars(const CmdPtr& c) {
  std::set<std::string> s;
  free_vars(c, s);
  return s;
}

std::set<std::string> mod_set(const CmdPtr& c) {
  if (!c) return {};
  switch (c->kind) {
    case Command::Kind::Assign:
    case Command::Kind::ArrAssign: return {c->var};
    case Command::Kind::Seq:
    case Command::Kind::Choice:
    case Command::Kind::If: {
      auto s = mod_set(c->c1);
      auto t = mod_set(c->c2);
      s.insert(t.begin(), t.end());
      return s;
    }
    case Command::Kind::Loop:
    case Command::Kind::While: return mod_set(c->c1);
    case Command::Kind::Local: {
      auto s = mod_set(c->c1);
      s.erase(c->var);
      return s;
    }
    default: return {};
  }
}

// ---- substitution ----------------------------------------------------------

static std::string fresh_avoiding(const std::string& base,
                                  const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "!" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

ArrExpr subst(const ArrExpr& a, const std::string& x, const ExprPtr& by) {
  ArrExpr r;
  r.base = a.base;
  for (auto& [i, v] : a.stores) r.stores.emplace_back(subst(i, x, by), subst(v, x, by));
  return r;
}

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& by) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Lit: return e;
    case Expr::Kind::Var: return e->var == x ? by : e;
    case Expr::Kind::Read:
      return e_read(subst(e->arr, x, by), subst(e->a, x, by));
    case Expr::Kind::Add: return e_add(subst(e->a, x, by), subst(e->b, x, by));
    case Expr::Kind::Sub: return e_sub(subst(e->a, x, by), subst(e->b, x, by));
    case Expr::Kind::Mul: return e_mul(subst(e->a, x, by), subst(e->b, x, by));
    case Expr::Kind::Div: return e_div(subst(e->a, x, by), e->lit);
    case Expr::Kind::Neg: return e_neg(subst(e->a, x, by));
    case Expr::Kind::Ite:
      return e_ite(subst(e->cond, x, by), subst(e->a, x, by), subst(e->b, x, by));
  }
  return e;
}

BoolPtr subst(const BoolPtr& b, const std::string& x, const ExprPtr& by) {
  if (!b) return b;
  switch (b->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return b;
    case BoolExpr::Kind::Cmp:
      return b_cmp(b->op, subst(b->e1, x, by), subst(b->e2, x, by));
    case BoolExpr::Kind::And: return b_and(subst(b->l, x, by), subst(b->r, x, by));
    case BoolExpr::Kind::Or: return b_or(subst(b->l, x, by), subst(b->r, x, by));
    case BoolExpr::Kind::Not: return b_not(subst(b->l, x, by));
    case BoolExpr::Kind::ForallRange: {
      auto lo = subst(b->e1, x, by), hi = subst(b->e2, x, by);
      if (b->var == x) return b_forall_range(b->var, lo, hi, b->l);
      if (free_vars(by).count(b->var)) {
        auto avoid = free_vars(b->l);
        auto byv = free_vars(by);
        avoid.insert(byv.begin(), byv.end());
        avoid.insert(x);
        std::string nv = fresh_avoiding(b->var, avoid);
        auto body = subst(b->l, b->var, e_var(nv));
        return b_forall_range(nv, lo, hi, subst(body, x, by));
      }
      return b_forall_range(b->var, lo, hi, subst(b->l, x, by));
    }
    case BoolExpr::Kind::Quant: {
      if (b->var == x) return b;
      if (free_vars(by).count(b->var)) {
        auto avoid = free_vars(b->l);
        auto byv = free_vars(by);
        avoid.insert(byv.begin(), byv.end());
        avoid.insert(x);
        std::string nv = fresh_avoiding(b->var, avoid);
        auto body = subst(b->l, b->var, e_var(nv));
        return b_quant(b->exists, nv, b->var_is_array, b->tag, subst(body, x, by));
      }
      return b_quant(b->exists, b->var, b->var_is_array, b->tag, subst(b->l, x, by));
    }
    case BoolExpr::Kind::ArrEq:
      return b_arr_eq(subst(b->a1, x, by), subst(b->a2, x, by));
  }
  return b;
}

ArrExpr subst_array(const ArrExpr& e, const std::string& a, const ArrExpr& arr) {
  ArrExpr r;
  std::vector<std::pair<ExprPtr, ExprPtr>> stores;
  for (auto& [i, v] : e.stores)
    stores.emplace_back(subst_array(i, a, arr), subst_array(v, a, arr));
  if (e.base == a) {
    r.base = arr.base;
    r.stores = arr.stores;
    r.stores.insert(r.stores.end(), stores.begin(), stores.end());
  } else {
    r.base = e.base;
    r.stores = std::move(stores);
  }
  return r;
}

ExprPtr subst_array(const ExprPtr& e, const std::string& a, const ArrExpr& arr) {
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Lit:
    case Expr::Kind::Var: return e;
    case Expr::Kind::Read:
      return e_read(subst_array(e->arr, a, arr), subst_array(e->a, a, arr));
    case Expr::Kind::Add:
      return e_add(subst_array(e->a, a, arr), subst_array(e->b, a, arr));
    case Expr::Kind::Sub:
      return e_sub(subst_array(e->a, a, arr), subst_array(e->b, a, arr));
    case Expr::Kind::Mul:
      return e_mul(subst_array(e->a, a, arr), subst_array(e->b, a, arr));
    case Expr::Kind::Div: return e_div(subst_array(e->a, a, arr), e->lit);
    case Expr::Kind::Neg: return e_neg(subst_array(e->a, a, arr));
    case Expr::Kind::Ite:
      return e_ite(subst_array(e->cond, a, arr), subst_array(e->a, a, arr),
                   subst_array(e->b, a, arr));
  }
  return e;
}

BoolPtr subst_array(const BoolPtr& b, const std::string& a, const ArrExpr& arr) {
  if (!b) return b;
  switch (b->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return b;
    case BoolExpr::Kind::Cmp:
      return b_cmp(b->op, subst_array(b->e1, a, arr), subst_array(b->e2, a, arr));
    case BoolExpr::Kind::And:
      return b_and(subst_array(b->l, a, arr), subst_array(b->r, a, arr));
    case BoolExpr::Kind::Or:
      return b_or(subst_array(b->l, a, arr), subst_array(b->r, a, arr));
    case BoolExpr::Kind::Not: return b_not(subst_array(b->l, a, arr));
    case BoolExpr::Kind::ForallRange:
      // Scalar binder; array substitution cannot capture it.
      return b_forall_range(b->var, subst_array(b->e1, a, arr),
                            subst_array(b->e2, a, arr), subst_array(b->l, a, arr));
    case BoolExpr::Kind::Quant:
      if (b->var_is_array && b->var == a) return b;
      return b_quant(b->exists, b->var, b->var_is_array, b->tag,
                     subst_array(b->l, a, arr));
    case BoolExpr::Kind::ArrEq:
      return b_arr_eq(subst_array(b->a1, a, arr), subst_array(b->a2, a, arr));
  }
  return b;
}

CmdPtr rename_var(const CmdPtr& c, const std::string& y, const std::string& x) {
  if (!c) return c;
  auto re = [&](const ExprPtr& e) { return subst(e, x, e_var(y)); };
  auto rb = [&](const BoolPtr& b) { return subst(b, x, e_var(y)); };
  auto rspec = [&](const LoopSpecPtr& s) -> LoopSpecPtr {
    if (!s) return s;
    auto ns = std::make_shared<LoopSpec>(*s);
    ns->iters = re(s->iters);
    ns->subvar = {rb(s->subvar.spec), re(s->subvar.res)};
    if (s->prefix) ns->prefix = FactoredAssertion{rb(s->prefix->spec), re(s->prefix->res)};
    if (s->exhaust) ns->exhaust = re(s->exhaust);
    return ns;
  };
  switch (c->kind) {
    case Command::Kind::Skip: return c;
    case Command::Kind::Assign:
      return c_assign(c->var == x ? y : c->var, re(c->e1));
    case Command::Kind::ArrAssign:
      return c_arr_assign(c->var == x ? y : c->var, re(c->e1), re(c->e2));
    case Command::Kind::Assume: return c_assume(rb(c->cond));
    case Command::Kind::Tick: return c_tick(re(c->e1));
    case Command::Kind::Seq:
      return c_seq(rename_var(c->c1, y, x), rename_var(c->c2, y, x));
    case Command::Kind::Choice:
      return c_choice(rename_var(c->c1, y, x), rename_var(c->c2, y, x));
    case Command::Kind::Loop:
      return c_loop(rename_var(c->c1, y, x), rspec(c->loop_spec));
    case Command::Kind::Local:
      if (c->var == x) return c;  // bound occurrences stay put
      if (c->var == y && free_vars(c->c1).count(x))
        throw EvalError("renaming " + x + " to " + y + " would be captured by local " + y);
      return c_local(c->var, rename_var(c->c1, y, x));
    case Command::Kind::If:
      return c_if(rb(c->cond), rename_var(c->c1, y, x), rename_var(c->c2, y, x),
                  c->demon);
    case Command::Kind::While:
      return c_while(rb(c->cond), rename_var(c->c1, y, x), rspec(c->loop_spec));
  }
  return c;
}

// ---- desugaring ------------------------------------------------------------

CmdPtr desugar(const CmdPtr& c) {
  if (!c) return c;
  switch (c->kind) {
    case Command::Kind::Seq: return c_seq(desugar(c->c1), desugar(c->c2));
    case Command::Kind::Choice: return c_choice(desugar(c->c1), desugar(c->c2));
    case Command::Kind::Loop: return c_loop(desugar(c->c1), c->loop_spec);
    case Command::Kind::Local: return c_local(c->var, desugar(c->c1));
    case Command::Kind::If: {
      auto t = desugar(c->c1), e = desugar(c->c2);
      if (c->demon) return c_choice(t, e);
      return c_choice(c_seq(c_assume(c->cond), t),
                      c_seq(c_assume(b_not(c->cond)), e));
    }
    case Command::Kind::While: {
      auto body = c_seq(c_assume(c->cond), desugar(c->c1));
      return c_seq(c_loop(body, c->loop_spec), c_assume(b_not(c->cond)));
    }
    default: return c;
  }
}

bool is_core(const CmdPtr& c) {
  if (!c) return true;
  switch (c->kind) {
    case Command::Kind::If:
    case Command::Kind::While: return false;
    case Command::Kind::Seq:
    case Command::Kind::Choice: return is_core(c->c1) && is_core(c->c2);
    case Command::Kind::Loop:
    case Command::Kind::Local: return is_core(c->c1);
    default: return true;
  }
}

// ---- structural equality ---------------------------------------------------

bool equal(const ArrExpr& a, const ArrExpr& b) {
  if (a.base != b.base || a.stores.size() != b.stores.size()) return false;
  for (size_t i = 0; i < a.stores.size(); ++i)
    if (!equal(a.stores[i].first, b.stores[i].first) ||
        !equal(a.stores[i].second, b.stores[i].second))
      return false;
  return true;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Lit: return a->lit == b->lit;
    case Expr::Kind::Var: return a->var == b->var;
    case Expr::Kind::Read: return equal(a->arr, b->arr) && equal(a->a, b->a);
    case Expr::Kind::Div: return a->lit == b->lit && equal(a->a, b->a);
    case Expr::Kind::Neg: return equal(a->a, b->a);
    case Expr::Kind::Ite:
      return equal(a->cond, b->cond) && equal(a->a, b->a) && equal(a->b, b->b);
    default: return equal(a->a, b->a) && equal(a->b, b->b);
  }
}

bool equal(const BoolPtr& a, const BoolPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return true;
    case BoolExpr::Kind::Cmp:
      return a->op == b->op && equal(a->e1, b->e1) && equal(a->e2, b->e2);
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or: return equal(a->l, b->l) && equal(a->r, b->r);
    case BoolExpr::Kind::Not: return equal(a->l, b->l);
    case BoolExpr::Kind::ForallRange:
      return a->var == b->var && equal(a->e1, b->e1) && equal(a->e2, b->e2) &&
             equal(a->l, b->l);
    case BoolExpr::Kind::Quant:
      return a->exists == b->exists && a->var == b->var &&
             a->var_is_array == b->var_is_array && equal(a->l, b->l);
    case BoolExpr::Kind::ArrEq: return equal(a->a1, b->a1) && equal(a->a2, b->a2);
  }
  return false;
}

bool equal_cmd(const CmdPtr& a, const CmdPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Command::Kind::Skip: return true;
    case Command::Kind::Assign:
      return a->var == b->var && equal(a->e1, b->e1);
    case Command::Kind::ArrAssign:
      return a->var == b->var && equal(a->e1, b->e1) && equal(a->e2, b->e2);
    case Command::Kind::Assume: return equal(a->cond, b->cond);
    case Command::Kind::Tick: return equal(a->e1, b->e1);
    case Command::Kind::Seq:
    case Command::Kind::Choice:
      return equal_cmd(a->c1, b->c1) && equal_cmd(a->c2, b->c2);
    case Command::Kind::Loop: return equal_cmd(a->c1, b->c1);
    case Command::Kind::Local: {
      if (a->var == b->var) return equal_cmd(a->c1, b->c1);
      // alpha: rename both binders to a name fresh for both bodies
      auto avoid = free_vars(a->c1);
      auto fb = free_vars(b->c1);
      avoid.insert(fb.begin(), fb.end());
      avoid.insert(a->var);
      avoid.insert(b->var);
      std::string f = fresh_avoiding("alpha", avoid);
      return equal_cmd(rename_var(a->c1, f, a->var), rename_var(b->c1, f, b->var));
    }
    case Command::Kind::If:
      return a->demon == b->demon && equal(a->cond, b->cond) &&
             equal_cmd(a->c1, b->c1) && equal_cmd(a->c2, b->c2);
    case Command::Kind::While:
      return equal(a->cond, b->cond) && equal_cmd(a->c1, b->c1);
  }
  return false;
}

// ---- printing --------------------------------------------------------------

static const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

static void print_expr(std::ostringstream& os, const ExprPtr& e, int parent_prec);

std::string pretty(const ArrExpr& a) {
  std::ostringstream os;
  os << a.base;
  for (auto& [i, v] : a.stores)
    os << "{" << pretty(i) << " -> " << pretty(v) << "}";
  return os.str();
}

static void print_expr(std::ostringstream& os, const ExprPtr& e, int parent_prec) {
  // precedence: 1 = + -, 2 = * /, 3 = unary
  switch (e->kind) {
    case Expr::Kind::Lit:
      if (e->lit < 0) {
        if (parent_prec > 1) os << "(";
        os << e->lit;
        if (parent_prec > 1) os << ")";
      } else {
        os << e->lit;
      }
      return;
    case Expr::Kind::Var: os << e->var; return;
    case Expr::Kind::Read:
      os << pretty(e->arr) << "[";
      print_expr(os, e->a, 0);
      os << "]";
      return;
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      bool paren = parent_prec > 1;
      if (paren) os << "(";
      print_expr(os, e->a, 1);
      os << (e->kind == Expr::Kind::Add ? " + " : " - ");
      print_expr(os, e->b, 2);
      if (paren) os << ")";
      return;
    }
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      bool paren = parent_prec > 2;
      if (paren) os << "(";
      print_expr(os, e->a, 2);
      if (e->kind == Expr::Kind::Mul) {
        os << " * ";
        print_expr(os, e->b, 3);
      } else {
        os << " / " << e->lit;
      }
      if (paren) os << ")";
      return;
    }
    case Expr::Kind::Neg: {
      bool paren = parent_prec > 2;
      if (paren) os << "(";
      os << "-";
      print_expr(os, e->a, 3);
      if (paren) os << ")";
      return;
    }
    case Expr::Kind::Ite:
      os << "ite(" << pretty(e->cond) << ", ";
      print_expr(os, e->a, 0);
      os << ", ";
      print_expr(os, e->b, 0);
      os << ")";
      return;
  }
}

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

static void print_bool(std::ostringstream& os, const BoolPtr& b, int parent_prec) {
  // precedence: 1 = ||, 2 = &&, 3 = atoms/!
  switch (b->kind) {
    case BoolExpr::Kind::True: os << "true"; return;
    case BoolExpr::Kind::False: os << "false"; return;
    case BoolExpr::Kind::Cmp:
      os << pretty(b->e1) << " " << cmp_str(b->op) << " " << pretty(b->e2);
      return;
    case BoolExpr::Kind::And: {
      bool paren = parent_prec > 2;
      if (paren) os << "(";
      print_bool(os, b->l, 2);
      os << " && ";
      print_bool(os, b->r, 2);
      if (paren) os << ")";
      return;
    }
    case BoolExpr::Kind::Or: {
      bool paren = parent_prec > 1;
      if (paren) os << "(";
      print_bool(os, b->l, 1);
      os << " || ";
      print_bool(os, b->r, 1);
      if (paren) os << ")";
      return;
    }
    case BoolExpr::Kind::Not:
      os << "!(";
      print_bool(os, b->l, 0);
      os << ")";
      return;
    case BoolExpr::Kind::ForallRange:
      os << "forall " << b->var << " in [" << pretty(b->e1) << ","
         << pretty(b->e2) << "). (";
      print_bool(os, b->l, 0);
      os << ")";
      return;
    case BoolExpr::Kind::Quant:
      os << (b->exists ? "exists " : "forall ") << b->var << ". (";
      print_bool(os, b->l, 0);
      os << ")";
      return;
    case BoolExpr::Kind::ArrEq:
      os << pretty(b->a1) << " == " << pretty(b->a2);
      return;
  }
}

std::string pretty(const BoolPtr& b) {
  std::ostringstream os;
  print_bool(os, b, 0);
  return os.str();
}

std::string pretty(const FactoredAssertion& f) {
  return "[" + pretty(f.spec) + "; " + pretty(f.res) + "]";
}

// Comparison atoms need parentheses inside cmp-in-cmp? Grammar forbids it, so
// the Cmp case above never nests.

static void print_loop_pragma(std::ostringstream& os, const LoopSpec& s,
                              const std::string& pad) {
  os << pad << "//@ loop iters: " << pretty(s.iters) << "; subvar "
     << s.index_var << " -> " << pretty(s.subvar);
  if (s.prefix) os << "; prefix " << pretty(*s.prefix);
  if (s.exhaust) os << "; exhaust: " << pretty(s.exhaust);
  os << "\n";
}

static void print_stmts(std::ostringstream& os, const CmdPtr& c, int indent);

static void print_block(std::ostringstream& os, const CmdPtr& c, int indent) {
  std::string pad(indent * 2, ' ');
  os << "{\n";
  print_stmts(os, c, indent + 1);
  os << pad << "}";
}

static void print_stmts(std::ostringstream& os, const CmdPtr& c, int indent) {
  std::string pad(indent * 2, ' ');
  switch (c->kind) {
    case Command::Kind::Seq:
      print_stmts(os, c->c1, indent);
      print_stmts(os, c->c2, indent);
      return;
    case Command::Kind::Local:
      os << pad << "int " << c->var << ";\n";
      print_stmts(os, c->c1, indent);
      return;
    case Command::Kind::Skip: os << pad << "skip;\n"; return;
    case Command::Kind::Assign:
      os << pad << c->var << " = " << pretty(c->e1) << ";\n";
      return;
    case Command::Kind::ArrAssign:
      os << pad << c->var << "[" << pretty(c->e1) << "] = " << pretty(c->e2)
         << ";\n";
      return;
    case Command::Kind::Assume:
      os << pad << "assume(" << pretty(c->cond) << ");\n";
      return;
    case Command::Kind::Tick:
      os << pad << "tick(" << pretty(c->e1) << ");\n";
      return;
    case Command::Kind::If:
      os << pad << "if (" << (c->demon ? "demon" : pretty(c->cond)) << ") ";
      print_block(os, c->c1, indent);
      os << " else ";
      print_block(os, c->c2, indent);
      os << "\n";
      return;
    case Command::Kind::While:
      if (c->loop_spec) print_loop_pragma(os, *c->loop_spec, pad);
      os << pad << "while (" << pretty(c->cond) << ") ";
      print_block(os, c->c1, indent);
      os << "\n";
      return;
    case Command::Kind::Choice:
      // core-only form; debug rendering, not part of the surface grammar
      os << pad << "choice ";
      print_block(os, c->c1, indent);
      os << " or ";
      print_block(os, c->c2, indent);
      os << "\n";
      return;
    case Command::Kind::Loop:
      if (c->loop_spec) print_loop_pragma(os, *c->loop_spec, pad);
      os << pad << "loop ";
      print_block(os, c->c1, indent);
      os << "\n";
      return;
  }
}

std::string pretty_cmd(const CmdPtr& c, int indent) {
  std::ostringstream os;
  print_stmts(os, c, indent);
  return os.str();
}

std::string pretty_program(const Program& p) {
  std::ostringstream os;
  for (auto& d : p.decls)
    os << "int " << d.name << (d.is_array ? "[];" : ";") << "\n";
  if (p.annot.pre) os << "//@ pre " << pretty(*p.annot.pre) << "\n";
  print_stmts(os, p.body, 0);
  if (p.annot.post) os << "//@ post " << pretty(*p.annot.post) << "\n";
  return os.str();
}

}  // namespace quav
