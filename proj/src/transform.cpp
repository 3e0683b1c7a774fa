#include "quav/transform.hpp"

#include <map>

#include "quav/diag.hpp"
#include "quav/semantics.hpp"

namespace quav {

namespace {

// How a variable's pre-value relates to the enumeration windows: a global
// not yet assigned stands for an initial-state value, a fresh local for a
// local initial value, anything after an assignment for an intermediate one.
enum class VarOrigin { Global, Local, Assigned };

struct Ctx {
  FreshNames& fresh;
  std::map<std::string, VarOrigin> origin;

  BinderRange pre_tag(const std::string& x) const {
    auto it = origin.find(x);
    if (it == origin.end() || it->second == VarOrigin::Global)
      return BinderRange::Initial;
    return it->second == VarOrigin::Local ? BinderRange::Local
                                          : BinderRange::Wide;
  }
  void mark_assigned(const std::string& x) { origin[x] = VarOrigin::Assigned; }
  void merge(const Ctx& other) {
    for (auto& [k, v] : other.origin)
      if (v == VarOrigin::Assigned) origin[k] = v;
  }
};

[[noreturn]] void no_loops() {
  throw EvalError("predicate transformers require a loop-free command");
}

ResPtr sp_rec(const CmdPtr& c, ResPtr P, Ctx& ctx) {
  switch (c->kind) {
    case Command::Kind::Skip: return P;
    case Command::Kind::Assign: {
      const std::string& x = c->var;
      std::string xp = ctx.fresh.next(x);
      BinderRange tag = ctx.pre_tag(x);
      ResPtr body = r_max(res_subst(P, x, e_var(xp)),
                          r_guard(b_cmp(CmpOp::Ne, e_var(x),
                                        subst(c->e1, x, e_var(xp)))));
      ctx.mark_assigned(x);
      return bind_inf(xp, body, false, tag);
    }
    case Command::Kind::ArrAssign: {
      // whole-array view: a := a{i -> v}
      const std::string& a = c->var;
      std::string ap = ctx.fresh.next(a);
      ArrExpr fresh_arr{ap, {}};
      ArrExpr update{ap,
                     {{subst_array(c->e1, a, fresh_arr),
                       subst_array(c->e2, a, fresh_arr)}}};
      ResPtr body = r_max(res_subst_array(P, a, fresh_arr),
                          r_guard(b_not(b_arr_eq(ArrExpr{a, {}}, update))));
      ctx.mark_assigned(a);
      return bind_inf(ap, body, true, BinderRange::Wide);
    }
    case Command::Kind::Assume:
      return r_max(P, r_guard(b_not(c->cond)));
    case Command::Kind::Tick: return sub_expr(P, c->e1);
    case Command::Kind::Seq: return sp_rec(c->c2, sp_rec(c->c1, P, ctx), ctx);
    case Command::Kind::Choice: {
      Ctx right = ctx;
      ResPtr r1 = sp_rec(c->c1, P, ctx);
      ResPtr r2 = sp_rec(c->c2, P, right);
      ctx.merge(right);
      return r_min(r1, r2);
    }
    case Command::Kind::Local: {
      std::string xl = ctx.fresh.next(c->var);
      CmdPtr body = rename_var(c->c1, xl, c->var);
      ctx.origin[xl] = VarOrigin::Local;
      ResPtr R = sp_rec(body, P, ctx);
      BinderRange tag = first_use(body, xl) == UseStatus::Writes
                            ? BinderRange::Wide
                            : BinderRange::Local;
      return bind_inf(xl, R, false, tag);
    }
    default: no_loops();
  }
}

ResPtr wp_rec(const CmdPtr& c, ResPtr Q, Ctx& ctx);

ResPtr wp_local(const CmdPtr& c, ResPtr Q, Ctx& ctx,
                ResPtr (*rec)(const CmdPtr&, ResPtr, Ctx&)) {
  std::string xl = ctx.fresh.next(c->var);
  CmdPtr body = rename_var(c->c1, xl, c->var);
  ctx.origin[xl] = VarOrigin::Local;
  ResPtr R = rec(body, std::move(Q), ctx);
  BinderRange tag = first_use(body, xl) == UseStatus::Writes ? BinderRange::Wide
                                                             : BinderRange::Local;
  return bind_sup(xl, R, false, tag);
}

ResPtr wp_rec(const CmdPtr& c, ResPtr Q, Ctx& ctx) {
  switch (c->kind) {
    case Command::Kind::Skip: return Q;
    case Command::Kind::Assign: return res_subst(Q, c->var, c->e1);
    case Command::Kind::ArrAssign:
      return res_subst_array(Q, c->var, ArrExpr{c->var, {{c->e1, c->e2}}});
    case Command::Kind::Assume: return r_min(Q, r_guard(c->cond));
    case Command::Kind::Tick: return add_expr(Q, c->e1);
    case Command::Kind::Seq: return wp_rec(c->c1, wp_rec(c->c2, Q, ctx), ctx);
    case Command::Kind::Choice: {
      Ctx right = ctx;
      ResPtr r1 = wp_rec(c->c1, Q, ctx);
      ResPtr r2 = wp_rec(c->c2, Q, right);
      ctx.merge(right);
      return r_max(r1, r2);
    }
    case Command::Kind::Local: return wp_local(c, std::move(Q), ctx, wp_rec);
    default: no_loops();
  }
}

ResPtr wpd_rec(const CmdPtr& c, ResPtr Q, Ctx& ctx) {
  switch (c->kind) {
    case Command::Kind::Skip: return r_min(Q, r_fin(0));
    case Command::Kind::Assign:
      return r_min(res_subst(Q, c->var, c->e1), r_fin(0));
    case Command::Kind::ArrAssign:
      return r_min(
          res_subst_array(Q, c->var, ArrExpr{c->var, {{c->e1, c->e2}}}),
          r_fin(0));
    case Command::Kind::Assume:
      return r_min(r_min(Q, r_guard(c->cond)), r_fin(0));
    case Command::Kind::Tick:
      // sup{p : p <= Q + e and min(p, p - e) <= 0} = (Q + e) ^ (0 v e)
      return r_min(add_expr(Q, c->e1), r_max(r_fin(0), r_arith(c->e1)));
    case Command::Kind::Seq: {
      // the level drop occurs in c1 or in c2
      Ctx right = ctx;
      ResPtr via_c1 = wpd_rec(c->c1, wp_rec(c->c2, Q, ctx), ctx);
      ResPtr via_c2 = wp_rec(c->c1, wpd_rec(c->c2, Q, right), right);
      ctx.merge(right);
      return r_max(via_c1, via_c2);
    }
    case Command::Kind::Choice: {
      Ctx right = ctx;
      ResPtr r1 = wpd_rec(c->c1, Q, ctx);
      ResPtr r2 = wpd_rec(c->c2, Q, right);
      ctx.merge(right);
      return r_max(r1, r2);
    }
    case Command::Kind::Local: return wp_local(c, std::move(Q), ctx, wpd_rec);
    default: no_loops();
  }
}

}  // namespace

TransformerResult sp(const CmdPtr& loop_free, const ResPtr& P, FreshNames& fresh) {
  Ctx ctx{fresh, {}};
  ResPtr r = sp_rec(loop_free, P, ctx);
  return {r, encodable(r)};
}

TransformerResult wp(const CmdPtr& loop_free, const ResPtr& Q, FreshNames& fresh) {
  Ctx ctx{fresh, {}};
  ResPtr r = wp_rec(loop_free, Q, ctx);
  return {r, encodable(r)};
}

TransformerResult wp_diamond(const CmdPtr& loop_free, const ResPtr& Q,
                             FreshNames& fresh) {
  Ctx ctx{fresh, {}};
  ResPtr r = wpd_rec(loop_free, Q, ctx);
  return {r, encodable(r)};
}

}  // namespace quav
