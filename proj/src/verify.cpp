#include "quav/verify.hpp"

#include <chrono>

#include "quav/diag.hpp"
#include "quav/semantics.hpp"
#include "quav/transform.hpp"

namespace quav {

const char* Verdict::name(Kind k) {
  switch (k) {
    case Kind::Valid: return "valid";
    case Kind::ValidBounded: return "valid-bounded";
    case Kind::Invalid: return "invalid";
    case Kind::Unknown: return "unknown";
    case Kind::IllFormed: return "ill-formed";
  }
  return "?";
}

FactoredAssertion subst_fact(const FactoredAssertion& f, const std::string& x,
                             const ExprPtr& by) {
  return {subst(f.spec, x, by), subst(f.res, x, by)};
}

std::pair<FactoredAssertion, FactoredAssertion> loop_summary(const LoopSpec& spec,
                                                             Mode mode) {
  FactoredAssertion p0 = subst_fact(spec.subvar, spec.index_var, e_lit(0));
  FactoredAssertion pk = subst_fact(spec.subvar, spec.index_var, spec.iters);
  BoolPtr side;
  if (mode == Mode::BDiamond) {
    if (!spec.exhaust)
      throw IllFormedError("loop " + std::to_string(spec.loop_id) +
                           " needs an exhaust annotation in mode bd");
    side = b_and(b_cmp(CmpOp::Le, e_lit(0), spec.exhaust),
                 b_cmp(CmpOp::Lt, spec.exhaust, spec.iters));
  } else {
    side = b_cmp(CmpOp::Le, e_lit(0), spec.iters);
  }
  p0.spec = b_and(p0.spec, side);
  pk.spec = b_and(pk.spec, side);
  return {p0, pk};
}

namespace {

// Conjoin the constant prefix: spec parts via Constancy, resource via Relax.
FactoredAssertion apply_prefix(const FactoredAssertion& f,
                               const std::optional<FactoredAssertion>& prefix) {
  if (!prefix) return f;
  return {b_and(f.spec, prefix->spec), e_add(f.res, prefix->res)};
}

struct VcGen {
  Mode mode;
  FreshNames fresh;
  std::vector<BoolPtr> hyps;
  std::vector<VC> out;

  Mode lift_mode() const { return mode == Mode::F ? Mode::F : Mode::B; }

  void emit(const std::string& label, ResPtr lhs, ResPtr rhs,
            const std::string& origin) {
    // a hypothesis H folds into the pointwise claim: lhs ^ [H]  <=  rhs v [!H]
    for (auto& h : hyps) {
      lhs = r_min(lhs, r_guard(h));
      rhs = r_max(rhs, r_guard(b_not(h)));
    }
    lhs = simplify(lhs);
    rhs = simplify(rhs);
    bool enc = encodable(lhs) && encodable(rhs);
    out.push_back({label, mode, lhs, rhs, enc, origin});
  }

  void validate_spec(const LoopSpec& s, const CmdPtr& body) {
    auto mods = mod_set(body);
    auto check_const = [&](const ExprPtr& e, const std::string& what) {
      if (!e) return;
      for (auto& v : free_vars(e))
        if (mods.count(v))
          throw IllFormedError("loop " + std::to_string(s.loop_id) + ": " + what +
                               " mentions the modified variable '" + v + "'");
    };
    check_const(s.iters, "the iteration count");
    check_const(s.exhaust, "the exhaustion point");
    if (s.prefix) {
      check_const(s.prefix->res, "the constant prefix");
      for (auto& v : free_vars(s.prefix->spec))
        if (mods.count(v))
          throw IllFormedError("loop " + std::to_string(s.loop_id) +
                               ": the constant prefix mentions the modified "
                               "variable '" +
                               v + "'");
    }
    if (mods.count(s.index_var))
      throw IllFormedError("loop " + std::to_string(s.loop_id) +
                           ": the subvariant index collides with a program "
                           "variable");
  }

  const LoopSpec& spec_of(const CmdPtr& loop) {
    if (!loop->loop_spec)
      throw IllFormedError("a loop lacks its //@ loop annotation");
    validate_spec(*loop->loop_spec, loop->c1);
    return *loop->loop_spec;
  }

  BoolPtr index_hyp(const LoopSpec& s) {
    return b_and(b_cmp(CmpOp::Le, e_lit(0), e_var(s.index_var)),
                 b_cmp(CmpOp::Lt, e_var(s.index_var), s.iters));
  }

  // ---- backward pass (modes B and B-diamond chain through this for plain
  // segments) ----

  ResPtr wp_verified(const CmdPtr& c, ResPtr Q) {
    switch (c->kind) {
      case Command::Kind::Skip: return Q;
      case Command::Kind::Assign: return res_subst(Q, c->var, c->e1);
      case Command::Kind::ArrAssign:
        return res_subst_array(Q, c->var, ArrExpr{c->var, {{c->e1, c->e2}}});
      case Command::Kind::Assume: return r_min(Q, r_guard(c->cond));
      case Command::Kind::Tick: return add_expr(Q, c->e1);
      case Command::Kind::Seq:
        return wp_verified(c->c1, wp_verified(c->c2, Q));
      case Command::Kind::Choice:
        return r_max(wp_verified(c->c1, Q), wp_verified(c->c2, Q));
      case Command::Kind::Local: {
        std::string xl = fresh.next(c->var);
        CmdPtr body = rename_var(c->c1, xl, c->var);
        ResPtr R = wp_verified(body, Q);
        return bind_sup(xl, R, false,
                        first_use(body, xl) == UseStatus::Writes
                            ? BinderRange::Wide
                            : BinderRange::Local);
      }
      case Command::Kind::Loop: {
        const LoopSpec& s = spec_of(c);
        std::string lid = "loop" + std::to_string(s.loop_id);
        FactoredAssertion pn = s.subvar;
        FactoredAssertion pn1 =
            subst_fact(s.subvar, s.index_var,
                       e_add(e_var(s.index_var), e_lit(1)));
        hyps.push_back(index_hyp(s));
        ResPtr body_wp = wp_verified(c->c1, lift(pn1, Mode::B));
        emit(lid + ".step", lift(pn, Mode::B), body_wp, "loop inductive step");
        hyps.pop_back();

        auto [sum_pre, sum_post] = loop_summary(s, Mode::B);
        sum_pre = apply_prefix(sum_pre, s.prefix);
        sum_post = apply_prefix(sum_post, s.prefix);
        emit(lid + ".exit", lift(sum_post, Mode::B), Q,
             "loop summary feeds the continuation");
        return lift(sum_pre, Mode::B);
      }
      default:
        throw IllFormedError("verification requires a desugared program");
    }
  }

  // ---- forward pass (mode F) ----

  ResPtr sp_verified(const CmdPtr& c, ResPtr P) {
    switch (c->kind) {
      case Command::Kind::Skip: return P;
      case Command::Kind::Assign: {
        std::string xp = fresh.next(c->var);
        ResPtr body = r_max(res_subst(P, c->var, e_var(xp)),
                            r_guard(b_cmp(CmpOp::Ne, e_var(c->var),
                                          subst(c->e1, c->var, e_var(xp)))));
        return bind_inf(xp, body, false, BinderRange::Wide);
      }
      case Command::Kind::ArrAssign: {
        std::string ap = fresh.next(c->var);
        ArrExpr fresh_arr{ap, {}};
        ArrExpr update{ap,
                       {{subst_array(c->e1, c->var, fresh_arr),
                         subst_array(c->e2, c->var, fresh_arr)}}};
        ResPtr body = r_max(res_subst_array(P, c->var, fresh_arr),
                            r_guard(b_not(b_arr_eq(ArrExpr{c->var, {}}, update))));
        return bind_inf(ap, body, true, BinderRange::Wide);
      }
      case Command::Kind::Assume: return r_max(P, r_guard(b_not(c->cond)));
      case Command::Kind::Tick: return sub_expr(P, c->e1);
      case Command::Kind::Seq:
        return sp_verified(c->c2, sp_verified(c->c1, P));
      case Command::Kind::Choice:
        return r_min(sp_verified(c->c1, P), sp_verified(c->c2, P));
      case Command::Kind::Local: {
        std::string xl = fresh.next(c->var);
        CmdPtr body = rename_var(c->c1, xl, c->var);
        ResPtr R = sp_verified(body, P);
        return bind_inf(xl, R, false,
                        first_use(body, xl) == UseStatus::Writes
                            ? BinderRange::Wide
                            : BinderRange::Local);
      }
      case Command::Kind::Loop: {
        const LoopSpec& s = spec_of(c);
        std::string lid = "loop" + std::to_string(s.loop_id);
        FactoredAssertion pn = s.subvar;
        FactoredAssertion pn1 =
            subst_fact(s.subvar, s.index_var,
                       e_add(e_var(s.index_var), e_lit(1)));
        hyps.push_back(index_hyp(s));
        ResPtr body_sp = sp_verified(c->c1, lift(pn, Mode::F));
        emit(lid + ".step", body_sp, lift(pn1, Mode::F), "loop inductive step");
        hyps.pop_back();

        auto [sum_pre, sum_post] = loop_summary(s, Mode::F);
        sum_pre = apply_prefix(sum_pre, s.prefix);
        sum_post = apply_prefix(sum_post, s.prefix);
        emit(lid + ".entry", P, lift(sum_pre, Mode::F),
             "arriving assertion meets the loop summary");
        return lift(sum_post, Mode::F);
      }
      default:
        throw IllFormedError("verification requires a desugared program");
    }
  }

  // ---- high-water pass (mode B-diamond) ----

  static bool contains_designated(const CmdPtr& c) {
    if (!c) return false;
    if (c->kind == Command::Kind::Loop && c->loop_spec && c->loop_spec->exhaust)
      return true;
    return contains_designated(c->c1) || contains_designated(c->c2);
  }

  ResPtr wpd_verified(const CmdPtr& c, ResPtr Q) {
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
        return r_min(add_expr(Q, c->e1), r_max(r_fin(0), r_arith(c->e1)));
      case Command::Kind::Seq: {
        bool d1 = contains_designated(c->c1), d2 = contains_designated(c->c2);
        if (d1 && d2)
          throw IllFormedError(
              "two exhaust-designated loops on one sequential path");
        if (d1) return wpd_verified(c->c1, wp_verified(c->c2, Q));
        if (d2) return wp_verified(c->c1, wpd_verified(c->c2, Q));
        // loop-free segment: the drop may occur on either side
        return r_max(wpd_verified(c->c1, wp_verified(c->c2, Q)),
                     wp_verified(c->c1, wpd_verified(c->c2, Q)));
      }
      case Command::Kind::Choice:
        return r_max(wpd_verified(c->c1, Q), wpd_verified(c->c2, Q));
      case Command::Kind::Local: {
        std::string xl = fresh.next(c->var);
        CmdPtr body = rename_var(c->c1, xl, c->var);
        ResPtr R = wpd_verified(body, Q);
        return bind_sup(xl, R, false,
                        first_use(body, xl) == UseStatus::Writes
                            ? BinderRange::Wide
                            : BinderRange::Local);
      }
      case Command::Kind::Loop: {
        const LoopSpec& s = spec_of(c);
        if (!s.exhaust)
          throw IllFormedError(
              "loop " + std::to_string(s.loop_id) +
              " lies on the high-water path but has no exhaust annotation");
        std::string lid = "loop" + std::to_string(s.loop_id);

        // inductive B step for all n < k
        FactoredAssertion pn = s.subvar;
        FactoredAssertion pn1 =
            subst_fact(s.subvar, s.index_var,
                       e_add(e_var(s.index_var), e_lit(1)));
        hyps.push_back(index_hyp(s));
        ResPtr body_wp = wp_verified(c->c1, lift(pn1, Mode::B));
        emit(lid + ".step", lift(pn, Mode::B), body_wp, "loop inductive step");
        hyps.pop_back();

        // the drop occurs during iteration m
        FactoredAssertion pm = subst_fact(s.subvar, s.index_var, s.exhaust);
        FactoredAssertion pm1 = subst_fact(
            s.subvar, s.index_var, e_add(s.exhaust, e_lit(1)));
        hyps.push_back(b_and(b_cmp(CmpOp::Le, e_lit(0), s.exhaust),
                             b_cmp(CmpOp::Lt, s.exhaust, s.iters)));
        ResPtr body_wpd = wpd_verified(c->c1, lift(pm1, Mode::B));
        emit(lid + ".step.hwm", lift(pm, Mode::B), body_wpd,
             "resource drops to zero during iteration m");
        hyps.pop_back();

        if (s.prefix)
          emit(lid + ".prefix", r_arith(s.prefix->res), r_fin(0),
               "a relaxation prefix must be non-positive in mode bd");

        auto [sum_pre, sum_post] = loop_summary(s, Mode::BDiamond);
        sum_pre = apply_prefix(sum_pre, s.prefix);
        sum_post = apply_prefix(sum_post, s.prefix);
        emit(lid + ".exit", lift(sum_post, Mode::B), Q,
             "loop summary feeds the continuation");
        return lift(sum_pre, Mode::B);
      }
      default:
        throw IllFormedError("verification requires a desugared program");
    }
  }
};

}  // namespace

std::vector<VC> gen_vcs(const Program& prog, Mode mode) {
  if (!prog.annot.pre || !prog.annot.post)
    throw IllFormedError("both a //@ pre and a //@ post annotation are required");
  CmdPtr core = desugar(prog.body);
  VcGen gen{mode, {}, {}, {}};
  switch (mode) {
    case Mode::F: {
      ResPtr total = gen.sp_verified(core, lift(*prog.annot.pre, Mode::F));
      gen.emit("exit", total, lift(*prog.annot.post, Mode::F),
               "computed postcondition meets the annotation");
      break;
    }
    case Mode::B: {
      ResPtr total = gen.wp_verified(core, lift(*prog.annot.post, Mode::B));
      gen.emit("entry", lift(*prog.annot.pre, Mode::B), total,
               "annotated precondition meets the computed one");
      break;
    }
    case Mode::BDiamond: {
      ResPtr total = gen.wpd_verified(core, lift(*prog.annot.post, Mode::B));
      gen.emit("entry", lift(*prog.annot.pre, Mode::B), total,
               "annotated precondition meets the computed one");
      break;
    }
  }
  return gen.out;
}

namespace {

// Windows for replaying a countermodel through eval_res.
DomainBounds replay_bounds(const State& model) {
  std::int64_t m = 8;
  auto widen = [&m](std::int64_t v) {
    m = std::max(m, (v < 0 ? -v : v) + 1);
  };
  for (auto& [_, v] : model.scalars) widen(v);
  for (auto& [_, av] : model.arrays) {
    widen(av.def);
    for (auto& [i, v] : av.elems) {
      widen(i);
      widen(v);
    }
  }
  DomainBounds b;
  b.local_range = b.wide_range = {-2 * m, 2 * m};
  for (auto& [n, _] : model.scalars) b.scalars[n] = {-m, m};
  for (auto& [a, av] : model.arrays) {
    std::int64_t lo = 0, hi = 0;
    if (!av.elems.empty()) {
      lo = av.elems.begin()->first;
      hi = av.elems.rbegin()->first + 1;
    }
    b.arrays[a] = {lo, hi, {-m, m}};
  }
  return b;
}

// Fill VC symbols the model does not mention (the solver may omit don't-cares).
void complete_model(State& model, const VC& vc) {
  std::set<std::string> names = free_vars_res(vc.lhs);
  auto n2 = free_vars_res(vc.rhs);
  names.insert(n2.begin(), n2.end());
  std::set<std::string> arrays;
  collect_arrays(vc.lhs, arrays);
  collect_arrays(vc.rhs, arrays);
  for (auto& n : names) {
    if (arrays.count(n)) {
      if (!model.arrays.count(n)) model.arrays[n] = ArrayVal{};
    } else if (!model.scalars.count(n)) {
      model.scalars[n] = 0;
    }
  }
}

bool replay_refutation(const VC& vc, const State& model) {
  try {
    DomainBounds rb = replay_bounds(model);
    ExtInt l = eval_res(vc.lhs, model, rb);
    ExtInt r = eval_res(vc.rhs, model, rb);
    return !(l <= r);
  } catch (const EvalError&) {
    return false;
  }
}

}  // namespace

Verdict check(const Program& prog, Mode mode, const SolverHandle& solver,
              std::optional<std::int64_t> fallback_bound,
              std::vector<VcTrace>* trace) {
  std::vector<VC> vcs;
  try {
    vcs = gen_vcs(prog, mode);
  } catch (const IllFormedError& e) {
    return {Verdict::Kind::IllFormed, "", std::nullopt, e.what()};
  }

  bool any_unknown = false, any_bounded = false;
  std::string first_unknown;
  for (const VC& vc : vcs) {
    auto t0 = std::chrono::steady_clock::now();
    VcTrace row{vc, "unknown", "", 0};
    auto record = [&]() {
      row.time_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      if (trace) trace->push_back(row);
    };

    std::string unknown_note;
    bool settled = false;
    if (vc.encodable_vc && !solver.cmd.empty()) {
      try {
        EncodeOpts opts;
        opts.logic = solver.logic;
        SmtOutcome out = run_solver(solver, encode_leq_query(vc.lhs, vc.rhs, opts));
        if (out.kind == SmtOutcome::Kind::Proved) {
          row.status = "proved";
          settled = true;
        } else if (out.kind == SmtOutcome::Kind::Refuted) {
          State model = out.model;
          complete_model(model, vc);
          if (replay_refutation(vc, model)) {
            row.status = "refuted";
            record();
            return {Verdict::Kind::Invalid, vc.label, model,
                    "countermodel violates " + vc.label};
          }
          unknown_note = "refutation model failed replay";
        } else {
          unknown_note = out.reason;
        }
      } catch (const SolverError& e) {
        unknown_note = e.what();
      }
    } else if (!vc.encodable_vc) {
      unknown_note = "not directly encodable";
    } else {
      unknown_note = "no solver configured";
    }

    if (!settled && fallback_bound && vc.encodable_vc && !solver.cmd.empty()) {
      // bounded instantiation: all free and quantified integers in [-N, N]
      try {
        EncodeOpts opts;
        opts.logic = solver.logic;
        opts.bound = *fallback_bound;
        SmtOutcome out = run_solver(solver, encode_leq_query(vc.lhs, vc.rhs, opts));
        if (out.kind == SmtOutcome::Kind::Proved) {
          row.status = "proved-bounded";
          row.note = unknown_note;
          any_bounded = true;
          settled = true;
        } else if (out.kind == SmtOutcome::Kind::Refuted) {
          State model = out.model;
          complete_model(model, vc);
          if (replay_refutation(vc, model)) {
            row.status = "refuted";
            record();
            return {Verdict::Kind::Invalid, vc.label, model,
                    "countermodel violates " + vc.label};
          }
          unknown_note += "; bounded refutation failed replay";
        } else {
          unknown_note += "; bounded: " + out.reason;
        }
      } catch (const SolverError& e) {
        unknown_note += std::string("; bounded: ") + e.what();
      }
    }
    if (!settled && fallback_bound) {
      // last resort: exhaustive evaluation over small domains
      std::set<std::string> names = free_vars_res(vc.lhs);
      auto n2 = free_vars_res(vc.rhs);
      names.insert(n2.begin(), n2.end());
      std::set<std::string> arrays;
      collect_arrays(vc.lhs, arrays);
      collect_arrays(vc.rhs, arrays);
      std::int64_t n_scalars = 0;
      for (auto& n : names)
        if (!arrays.count(n)) ++n_scalars;
      double space = 1;
      std::int64_t w = 2 * *fallback_bound + 1;
      for (std::int64_t i = 0; i < n_scalars; ++i) space *= double(w);
      for (size_t i = 0; i < arrays.size(); ++i)
        for (std::int64_t k = 0; k < *fallback_bound; ++k) space *= double(w);
      if (space <= 2e6) {
        DomainBounds db;
        for (auto& n : names)
          if (!arrays.count(n))
            db.scalars[n] = {-*fallback_bound, *fallback_bound};
        for (auto& a : arrays)
          db.arrays[a] = {0, *fallback_bound,
                          {-*fallback_bound, *fallback_bound}};
        db.local_range = db.wide_range = {-*fallback_bound, *fallback_bound};
        LeqResult lr = leq_bounded(vc.lhs, vc.rhs, db);
        if (lr.kind == LeqResult::Kind::True) {
          row.status = "proved-bounded";
          row.note = unknown_note + "; exhaustive evaluation";
          any_bounded = true;
          settled = true;
        } else if (lr.kind == LeqResult::Kind::False) {
          row.status = "refuted";
          row.note = lr.note;
          record();
          return {Verdict::Kind::Invalid, vc.label, lr.witness, lr.note};
        }
      } else {
        unknown_note += "; domain too large for exhaustive evaluation";
      }
    }

    if (!settled) {
      row.status = "unknown";
      row.note = unknown_note;
      if (!any_unknown) first_unknown = vc.label + ": " + unknown_note;
      any_unknown = true;
    }
    record();
  }

  if (any_unknown)
    return {Verdict::Kind::Unknown, first_unknown, std::nullopt, first_unknown};
  if (any_bounded)
    return {Verdict::Kind::ValidBounded, "", std::nullopt,
            "some conditions verified by bounded instantiation only"};
  return {Verdict::Kind::Valid, "", std::nullopt, ""};
}

}  // namespace quav
