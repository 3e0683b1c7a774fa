#include "quav/randgen.hpp"

namespace quav {

ExprPtr random_small_expr(Rng& rng, const GenOpts& opts) {
  std::int64_t c = rng.in(-opts.cmax, opts.cmax);
  switch (rng.in(0, 3)) {
    case 0: return e_lit(c);
    case 1: return e_var(rng.pick(opts.vars));
    case 2: return e_add(e_var(rng.pick(opts.vars)), e_lit(c));
    default: return e_sub(e_var(rng.pick(opts.vars)), e_lit(c));
  }
}

BoolPtr random_cmp(Rng& rng, const GenOpts& opts) {
  static const std::vector<CmpOp> ops = {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt,
                                         CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
  ExprPtr lhs = e_var(rng.pick(opts.vars));
  ExprPtr rhs = rng.coin() ? e_lit(rng.in(-opts.cmax, opts.cmax))
                           : e_var(rng.pick(opts.vars));
  return b_cmp(rng.pick(ops), lhs, rhs);
}

namespace {

struct Quota {
  int binders;
  int choices;
};

CmdPtr gen(Rng& rng, const GenOpts& opts, Quota& quota, int depth) {
  bool leaf = depth >= opts.max_depth || rng.in(0, 2) == 0;
  if (leaf) {
    switch (rng.in(0, 3)) {
      case 0: return c_skip();
      case 1: return c_tick(random_small_expr(rng, opts));
      case 2:
        if (quota.binders > 0) {
          --quota.binders;
          return c_assign(rng.pick(opts.vars), random_small_expr(rng, opts));
        }
        return c_tick(e_lit(rng.in(-opts.cmax, opts.cmax)));
      default: return c_assume(random_cmp(rng, opts));
    }
  }
  switch (rng.in(0, opts.allow_loops ? 4 : 3)) {
    case 0:
      return c_seq(gen(rng, opts, quota, depth + 1),
                   gen(rng, opts, quota, depth + 1));
    case 1:
      if (quota.choices > 0) {
        --quota.choices;
        return c_choice(gen(rng, opts, quota, depth + 1),
                        gen(rng, opts, quota, depth + 1));
      }
      return gen(rng, opts, quota, depth + 1);
    case 2:
      if (quota.binders > 0) {
        --quota.binders;
        std::string v = "t" + std::to_string(rng.in(0, 99));
        GenOpts inner = opts;
        inner.vars.push_back(v);
        return c_local(v, gen(rng, inner, quota, depth + 1));
      }
      return gen(rng, opts, quota, depth + 1);
    default:
      return c_loop(gen(rng, opts, quota, depth + 1));
  }
}

}  // namespace

CmdPtr random_command(Rng& rng, const GenOpts& opts) {
  Quota quota{opts.max_binders, opts.max_choices};
  return gen(rng, opts, quota, 0);
}

ResPtr random_resexpr(Rng& rng, const GenOpts& opts, int depth) {
  if (depth <= 0 || rng.in(0, 2) == 0) {
    switch (rng.in(0, 3)) {
      case 0: return r_fin(rng.in(-opts.cmax - 2, opts.cmax + 2));
      case 1: return r_arith(e_var(rng.pick(opts.vars)));
      case 2:
        return r_arith(e_add(e_var(rng.pick(opts.vars)),
                             e_lit(rng.in(-opts.cmax, opts.cmax))));
      default: return r_guard(random_cmp(rng, opts));
    }
  }
  ResPtr a = random_resexpr(rng, opts, depth - 1);
  ResPtr b = random_resexpr(rng, opts, depth - 1);
  return rng.coin() ? r_min(a, b) : r_max(a, b);
}

}  // namespace quav
