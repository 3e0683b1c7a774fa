#include "quav/kernel.hpp"

#include "quav/diag.hpp"
#include "quav/randgen.hpp"
#include "quav/semantics.hpp"

namespace quav {

namespace {

// Bottom-up random derivation builder. Constructions are designed so side
// conditions hold by shape; the kernel still validates everything.
struct Fuzzer {
  Rng rng;
  GenOpts opts;
  SideMethod side;
  int fresh = 0;

  explicit Fuzzer(std::uint64_t seed, const DomainBounds& bounds)
      : rng(seed) {
    opts.vars = {"x", "y"};
    opts.cmax = 2;
    side.use_smt = false;
    side.bounds = bounds;
  }

  ResPtr rand_res() { return random_resexpr(rng, opts); }
  ResPtr rand_res_nonpos() { return r_min(rand_res(), r_fin(0)); }

  std::shared_ptr<Derivation> mk(Mode m, Rule r) {
    auto d = std::make_shared<Derivation>();
    d->mode = m;
    d->rule = r;
    return d;
  }

  CheckedTriple concl(const DerivPtr& d) { return check_derivation(*d, side); }

  // ---- axioms -----------------------------------------------------------

  DerivPtr axiom(Mode m, ResPtr P) {
    bool dia = m == Mode::BDiamond;
    if (dia) P = r_min(P, r_fin(0));
    switch (rng.in(0, 3)) {
      case 0: {
        auto d = mk(m, Rule::Skip);
        d->P = P;
        return d;
      }
      case 1: {
        auto d = mk(m, Rule::Tick);
        d->P = P;
        d->e = e_lit(rng.in(-2, 2));
        return d;
      }
      case 2: {
        auto d = mk(m, Rule::Assign);
        d->P = P;
        d->x = rng.pick(opts.vars);
        d->e = random_small_expr(rng, opts);
        return d;
      }
      default: {
        auto d = mk(m, Rule::Assume);
        d->P = P;
        d->B = random_cmp(rng, opts);
        return d;
      }
    }
  }

  // Derivation whose conclusion precondition is exactly `pre` (after
  // constant folding); used to chain sequences together.
  DerivPtr with_pre(Mode m, ResPtr pre, int budget) {
    if (budget <= 0 || rng.in(0, 2) == 0) {
      switch (rng.in(0, 2)) {
        case 0: {
          auto d = mk(m, Rule::Skip);
          d->P = pre;
          return d;
        }
        case 1: {
          auto d = mk(m, Rule::Tick);
          d->P = pre;
          d->e = e_lit(rng.in(-2, 2));
          return d;
        }
        default: {
          auto d = mk(m, Rule::Assign);
          d->P = pre;
          d->x = rng.pick(opts.vars);
          d->e = random_small_expr(rng, opts);
          return d;
        }
      }
    }
    switch (rng.in(0, 2)) {
      case 0: {  // Seq
        DerivPtr d1 = with_pre(m, pre, budget - 1);
        DerivPtr d2 = with_pre(m, concl(d1).post, budget - 1);
        auto d = mk(m, Rule::Seq);
        d->premises = {d1, d2};
        return d;
      }
      case 1: {  // ChoiceL/R
        DerivPtr p = with_pre(m, pre, budget - 1);
        auto d = mk(m, rng.coin() ? Rule::ChoiceL : Rule::ChoiceR);
        d->premises = {p};
        d->cmd = desugar(random_command(rng, opts));
        return d;
      }
      default: {  // Loop with the family grown forward from `pre`
        auto d = mk(m, Rule::Loop);
        std::int64_t k = rng.in(0, 3);
        d->family.push_back(pre);
        CmdPtr body = c_tick(e_lit(rng.in(-1, 2)));
        d->cmd = body;
        for (std::int64_t i = 0; i < k; ++i) {
          auto prem = mk(m, Rule::Tick);
          prem->P = d->family.back();
          prem->e = body->e1;
          d->premises.push_back(prem);
          d->family.push_back(concl(prem).post);
        }
        return d;
      }
    }
  }

  // ---- general builder ----------------------------------------------------

  DerivPtr build(Mode m, int budget) {
    bool dia = m == Mode::BDiamond;
    if (budget <= 0) return axiom(m, rand_res());
    switch (rng.in(0, 9)) {
      case 0: {  // Seq / SeqL / SeqR
        if (!dia) {
          DerivPtr d1 = build(m, budget - 1);
          DerivPtr d2 = with_pre(m, concl(d1).post, budget - 1);
          auto d = mk(m, Rule::Seq);
          d->premises = {d1, d2};
          return d;
        }
        if (rng.coin()) {  // SeqL: the drop happens first
          DerivPtr d1 = build(Mode::BDiamond, budget - 1);
          DerivPtr d2 = with_pre(Mode::B, concl(d1).post, budget - 1);
          auto d = mk(m, Rule::SeqL);
          d->premises = {d1, d2};
          return d;
        }
        // SeqR: glue a backward tick in front of a diamond derivation
        DerivPtr d2 = build(Mode::BDiamond, budget - 1);
        std::int64_t c = rng.in(-2, 2);
        auto d1 = mk(Mode::B, Rule::Tick);
        d1->P = add_expr(concl(d2).pre, e_lit(c));
        d1->e = e_lit(c);
        auto d = mk(m, Rule::SeqR);
        d->premises = {d1, d2};
        return d;
      }
      case 1: {  // Choice
        DerivPtr p = build(m, budget - 1);
        auto d = mk(m, rng.coin() ? Rule::ChoiceL : Rule::ChoiceR);
        d->premises = {p};
        d->cmd = desugar(random_command(rng, opts));
        return d;
      }
      case 2: {  // Loop
        if (!dia) {
          auto d = mk(m, Rule::Loop);
          std::int64_t k = rng.in(0, 3);
          d->family.push_back(rand_res());
          CmdPtr body = c_tick(e_lit(rng.in(-1, 2)));
          d->cmd = body;
          for (std::int64_t i = 0; i < k; ++i) {
            auto prem = mk(m, Rule::Tick);
            prem->P = d->family.back();
            prem->e = body->e1;
            d->premises.push_back(prem);
            d->family.push_back(concl(prem).post);
          }
          return d;
        }
        // B-diamond loop: family (m+1), m, ..., descending through zero
        std::int64_t k = rng.in(1, 3);
        std::int64_t mi = rng.in(0, k - 1);
        auto d = mk(m, Rule::Loop);
        d->m = mi;
        CmdPtr body = c_tick(e_lit(1));
        d->cmd = body;
        for (std::int64_t i = 0; i <= k; ++i)
          d->family.push_back(r_fin(mi + 1 - i));
        for (std::int64_t i = 0; i < k; ++i) {
          auto prem = mk(Mode::B, Rule::Tick);
          prem->P = d->family[i];
          prem->e = e_lit(1);
          d->premises.push_back(prem);
        }
        auto wit = mk(Mode::BDiamond, Rule::Tick);
        wit->P = d->family[mi];
        wit->e = e_lit(1);
        d->premises.push_back(wit);
        return d;
      }
      case 3: {  // LoopZero (diamond) or plain axiom
        if (dia) {
          auto d = mk(m, Rule::LoopZero);
          d->P = rand_res_nonpos();
          d->cmd = desugar(random_command(rng, opts));
          return d;
        }
        return axiom(m, rand_res());
      }
      case 4: {  // Local
        DerivPtr p = build(m, budget - 1);
        auto d = mk(m, Rule::Local);
        d->premises = {p};
        d->x = rng.pick(opts.vars);
        return d;
      }
      case 5: {  // Disj: second premise is a consequence-weakened copy
        DerivPtr p1 = build(m, budget - 1);
        CheckedTriple t1 = concl(p1);
        auto p2 = mk(m, Rule::Cons);
        p2->premises = {p1};
        p2->P = r_min(t1.pre, r_fin(rng.in(-3, 3)));
        p2->Q = r_max(t1.post, r_fin(rng.in(-3, 3)));
        auto d = mk(m, Rule::Disj);
        d->premises = {p1, p2};
        return d;
      }
      case 6: {  // Constancy over a variable no command mentions
        DerivPtr p = build(m, budget - 1);
        auto d = mk(m, Rule::Constancy);
        d->premises = {p};
        d->B = b_cmp(rng.coin() ? CmpOp::Le : CmpOp::Gt, e_var("z"),
                     e_lit(rng.in(-2, 2)));
        return d;
      }
      case 7: {  // Relax
        DerivPtr p = build(m, budget - 1);
        auto d = mk(m, Rule::Relax);
        d->premises = {p};
        d->F = dia ? r_fin(rng.in(-3, 0))
                   : (rng.coin() ? r_fin(rng.in(-3, 3))
                                 : r_arith(e_var("z")));
        return d;
      }
      case 8: {  // Cons
        DerivPtr p = build(m, budget - 1);
        CheckedTriple t = concl(p);
        auto d = mk(m, Rule::Cons);
        d->premises = {p};
        d->P = r_min(t.pre, r_fin(rng.in(-3, 3)));
        d->Q = r_max(t.post, r_fin(rng.in(-3, 3)));
        return d;
      }
      default: {  // Subst with a fresh name
        DerivPtr p = build(m, budget - 1);
        auto d = mk(m, Rule::Subst);
        d->premises = {p};
        d->x = rng.pick(opts.vars);
        d->y = "w" + std::to_string(++fresh);
        return d;
      }
    }
  }
};

}  // namespace

FuzzReport fuzz_soundness(std::uint64_t seed, int count,
                          const DomainBounds& bounds) {
  Fuzzer fz(seed, bounds);
  FuzzReport report;
  static const Mode kModes[] = {Mode::F, Mode::B, Mode::BDiamond};

  int attempts = 0;
  while (report.checked < count && attempts < count * 20) {
    ++attempts;
    Mode m = kModes[fz.rng.in(0, 2)];
    DerivPtr d;
    CheckedTriple t;
    try {
      d = fz.build(m, static_cast<int>(fz.rng.in(1, 3)));
      t = check_derivation(*d, fz.side);
    } catch (const KernelError&) {
      continue;  // randomness violated a side condition; try again
    } catch (const EvalError&) {
      continue;
    }
    ++report.count;
    ++report.checked;

    // widen the state space to every variable the triple mentions
    DomainBounds eb = bounds;
    std::set<std::string> names = free_vars_res(t.pre);
    auto n2 = free_vars_res(t.post);
    auto n3 = free_vars(t.cmd);
    names.insert(n2.begin(), n2.end());
    names.insert(n3.begin(), n3.end());
    Interval var_range = bounds.local_range;
    for (auto& v : names)
      if (!eb.scalars.count(v)) eb.scalars[v] = var_range;

    try {
      HoldsResult h = holds_semantically(t.mode, t.pre, t.cmd, t.post, eb);
      if (h.kind == HoldsResult::Kind::False) {
        ++report.semantic_failures;
        report.notes.push_back(rule_name(t.mode, d->rule) + " triple [" +
                               pretty_res(t.pre) + "] ... [" +
                               pretty_res(t.post) + "] refuted: " + h.note);
      } else if (h.kind == HoldsResult::Kind::Truncated) {
        ++report.truncated;
        report.notes.push_back("inconclusive (cap) on a " +
                               rule_name(t.mode, d->rule) + " triple");
      }
    } catch (const EvalError& e) {
      ++report.semantic_failures;
      report.notes.push_back(std::string("evaluation error: ") + e.what());
    }
  }
  return report;
}

}  // namespace quav
