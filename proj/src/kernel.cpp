#include "quav/kernel.hpp"

#include <cctype>
#include <map>

#include "quav/diag.hpp"
#include "quav/parser.hpp"

namespace quav {

std::string rule_name(Mode m, Rule r) {
  std::string p = mode_name(m);
  switch (r) {
    case Rule::Skip: return p + ":skip";
    case Rule::Assign: return p + ":assign";
    case Rule::Assume: return p + ":assume";
    case Rule::Tick: return p + ":tick";
    case Rule::Seq: return p + ":seq";
    case Rule::SeqL: return p + ":seq-l";
    case Rule::SeqR: return p + ":seq-r";
    case Rule::ChoiceL: return p + ":choice-l";
    case Rule::ChoiceR: return p + ":choice-r";
    case Rule::Loop: return p + ":loop";
    case Rule::LoopZero: return p + ":loop-zero";
    case Rule::Local: return p + ":local";
    case Rule::Disj: return p + ":disj";
    case Rule::Constancy: return p + ":constancy";
    case Rule::Relax: return p + ":relax";
    case Rule::Cons: return p + ":cons";
    case Rule::Subst: return p + ":subst";
  }
  return p + ":?";
}

bool parse_rule_name(const std::string& s, Mode& m, Rule& r) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return false;
  auto mm = mode_from_flag(s.substr(0, colon));
  if (!mm) return false;
  m = *mm;
  std::string name = s.substr(colon + 1);
  static const std::map<std::string, Rule> names = {
      {"skip", Rule::Skip},         {"assign", Rule::Assign},
      {"assume", Rule::Assume},     {"tick", Rule::Tick},
      {"seq", Rule::Seq},           {"seq-l", Rule::SeqL},
      {"seq-r", Rule::SeqR},        {"choice-l", Rule::ChoiceL},
      {"choice-r", Rule::ChoiceR},  {"loop", Rule::Loop},
      {"loop-zero", Rule::LoopZero},{"local", Rule::Local},
      {"disj", Rule::Disj},         {"constancy", Rule::Constancy},
      {"relax", Rule::Relax},       {"cons", Rule::Cons},
      {"subst", Rule::Subst}};
  auto it = names.find(name);
  if (it == names.end()) return false;
  r = it->second;
  // B-diamond-only vs shared rule names
  bool diamond_only = r == Rule::SeqL || r == Rule::SeqR || r == Rule::LoopZero;
  if (diamond_only && m != Mode::BDiamond) return false;
  if (r == Rule::Seq && m == Mode::BDiamond) return false;
  return true;
}

// ---- checking --------------------------------------------------------------

namespace {

std::string fresh_for(const std::string& base, const std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string cand = base + "!" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

struct Checker {
  const SideMethod& side;

  void require_leq(const ResPtr& p, const ResPtr& q, const std::string& what) {
    if (side.use_smt && encodable(p) && encodable(q)) {
      SmtOutcome out = run_solver(side.solver, encode_leq_query(p, q));
      if (out.kind == SmtOutcome::Kind::Proved) return;
      if (out.kind == SmtOutcome::Kind::Refuted)
        throw KernelError(what + " fails: " + pretty_res(p) +
                          " <= " + pretty_res(q) + " refuted by the solver");
      throw KernelError(what + ": solver returned unknown");
    }
    LeqResult r = leq_bounded(p, q, side.bounds);
    if (r.kind == LeqResult::Kind::True) return;
    throw KernelError(what + " fails: " + r.note);
  }

  void require(bool cond, const std::string& msg) {
    if (!cond) throw KernelError(msg);
  }

  void require_premises(const Derivation& d, size_t n) {
    require(d.premises.size() == n,
            rule_name(d.mode, d.rule) + " expects " + std::to_string(n) +
                " premise(s), got " + std::to_string(d.premises.size()));
  }

  // premises must align exactly up to constant folding
  bool same(const ResPtr& a, const ResPtr& b) {
    return res_equal(simplify(a), simplify(b));
  }

  void require_mode(const CheckedTriple& t, Mode m, const std::string& what) {
    require(t.mode == m, what + " premise has the wrong judgment form");
  }

  CheckedTriple check(const Derivation& d) {
    Mode m = d.mode;
    bool dia = m == Mode::BDiamond;
    switch (d.rule) {
      case Rule::Skip: {
        require_premises(d, 0);
        require(d.P != nullptr, "skip rule needs :P");
        if (dia) require_leq(d.P, r_fin(0), "side condition P <= 0");
        return {m, d.P, c_skip(), d.P};
      }
      case Rule::Tick: {
        require_premises(d, 0);
        require(d.P && d.e, "tick rule needs :P and :e");
        ResPtr post = sub_expr(d.P, d.e);
        if (dia)
          require_leq(r_min(d.P, post), r_fin(0),
                      "side condition min(P, P - e) <= 0");
        return {m, d.P, c_tick(d.e), post};
      }
      case Rule::Assign: {
        require_premises(d, 0);
        require(d.P && !d.x.empty() && d.e, "assign rule needs :P, :x and :e");
        if (dia) require_leq(d.P, r_fin(0), "side condition P <= 0");
        auto avoid = free_vars_res(d.P);
        auto fe = free_vars(d.e);
        avoid.insert(fe.begin(), fe.end());
        avoid.insert(d.x);
        std::string xp = fresh_for(d.x, avoid);
        ExprPtr esub = subst(d.e, d.x, e_var(xp));
        ResPtr shifted = res_subst(d.P, d.x, e_var(xp));
        ResPtr post;
        if (m == Mode::F)
          post = bind_inf(xp,
                          r_max(shifted, r_guard(b_cmp(CmpOp::Ne, e_var(d.x), esub))),
                          false, BinderRange::Wide);
        else
          post = bind_sup(xp,
                          r_min(shifted, r_guard(b_cmp(CmpOp::Eq, e_var(d.x), esub))),
                          false, BinderRange::Wide);
        return {m, d.P, c_assign(d.x, d.e), post};
      }
      case Rule::Assume: {
        require_premises(d, 0);
        require(d.P && d.B, "assume rule needs :P and :B");
        if (dia) require_leq(d.P, r_fin(0), "side condition P <= 0");
        ResPtr a = m == Mode::F ? r_max(d.P, r_guard(b_not(d.B)))
                                : r_min(d.P, r_guard(d.B));
        return {m, a, c_assume(d.B), a};
      }
      case Rule::Seq: {
        require_premises(d, 2);
        CheckedTriple t1 = check(*d.premises[0]);
        CheckedTriple t2 = check(*d.premises[1]);
        require_mode(t1, m, "first");
        require_mode(t2, m, "second");
        require(same(t1.post, t2.pre), "sequence premises do not chain");
        return {m, t1.pre, c_seq(t1.cmd, t2.cmd), t2.post};
      }
      case Rule::SeqL:
      case Rule::SeqR: {
        require_premises(d, 2);
        CheckedTriple t1 = check(*d.premises[0]);
        CheckedTriple t2 = check(*d.premises[1]);
        require_mode(t1, d.rule == Rule::SeqL ? Mode::BDiamond : Mode::B, "first");
        require_mode(t2, d.rule == Rule::SeqL ? Mode::B : Mode::BDiamond, "second");
        require(same(t1.post, t2.pre), "sequence premises do not chain");
        return {m, t1.pre, c_seq(t1.cmd, t2.cmd), t2.post};
      }
      case Rule::ChoiceL:
      case Rule::ChoiceR: {
        require_premises(d, 1);
        require(d.cmd != nullptr, "choice rule needs :cmd (the other branch)");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "choice");
        CmdPtr whole = d.rule == Rule::ChoiceL ? c_choice(t.cmd, d.cmd)
                                               : c_choice(d.cmd, t.cmd);
        return {m, t.pre, whole, t.post};
      }
      case Rule::Loop: {
        require(d.family.size() >= 1, "loop rule needs a :family");
        size_t k = d.family.size() - 1;
        if (!dia) {
          require_premises(d, k);
          CmdPtr body = d.cmd;
          for (size_t i = 0; i < k; ++i) {
            CheckedTriple t = check(*d.premises[i]);
            require_mode(t, m, "loop");
            require(same(t.pre, d.family[i]) && same(t.post, d.family[i + 1]),
                    "loop premise " + std::to_string(i) +
                        " does not match the family");
            if (!body) body = t.cmd;
            require(equal_cmd(body, t.cmd),
                    "loop premises range over different bodies");
          }
          require(body != nullptr, "loop with k = 0 needs :cmd (the body)");
          return {m, d.family[0], c_loop(body), d.family[k]};
        }
        // B-diamond: k backward premises plus one diamond premise at index m
        require(d.m >= 0 && static_cast<size_t>(d.m) < k,
                "b-diamond loop needs a witness index :m with 0 <= m < k");
        require_premises(d, k + 1);
        CmdPtr body = d.cmd;
        for (size_t i = 0; i < k; ++i) {
          CheckedTriple t = check(*d.premises[i]);
          require_mode(t, Mode::B, "loop");
          require(same(t.pre, d.family[i]) && same(t.post, d.family[i + 1]),
                  "loop premise " + std::to_string(i) +
                      " does not match the family");
          if (!body) body = t.cmd;
          require(equal_cmd(body, t.cmd),
                  "loop premises range over different bodies");
        }
        CheckedTriple td = check(*d.premises[k]);
        require_mode(td, Mode::BDiamond, "loop witness");
        require(same(td.pre, d.family[d.m]) && same(td.post, d.family[d.m + 1]),
                "the witness premise does not match the family at index m");
        require(body && equal_cmd(body, td.cmd),
                "the witness premise ranges over a different body");
        return {m, d.family[0], c_loop(body), d.family[k]};
      }
      case Rule::LoopZero: {
        require_premises(d, 0);
        require(d.P && d.cmd, "loop-zero needs :P and :cmd");
        require(dia, "loop-zero exists only in the b-diamond system");
        require_leq(d.P, r_fin(0), "side condition P <= 0");
        return {m, d.P, c_loop(d.cmd), d.P};
      }
      case Rule::Local: {
        require_premises(d, 1);
        require(!d.x.empty(), "local rule needs :x");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "local");
        ResPtr pre, post;
        if (m == Mode::F) {
          pre = bind_inf(d.x, t.pre, false, BinderRange::Wide);
          post = bind_inf(d.x, t.post, false, BinderRange::Wide);
        } else {
          pre = bind_sup(d.x, t.pre, false, BinderRange::Wide);
          post = bind_sup(d.x, t.post, false, BinderRange::Wide);
        }
        return {m, pre, c_local(d.x, t.cmd), post};
      }
      case Rule::Disj: {
        require(!d.premises.empty(), "disjunction needs at least one premise");
        CheckedTriple first = check(*d.premises[0]);
        require_mode(first, m, "disjunction");
        ResPtr pre = first.pre, post = first.post;
        for (size_t i = 1; i < d.premises.size(); ++i) {
          CheckedTriple t = check(*d.premises[i]);
          require_mode(t, m, "disjunction");
          require(equal_cmd(first.cmd, t.cmd),
                  "disjunction premises range over different commands");
          if (m == Mode::F) {
            pre = r_min(pre, t.pre);
            post = r_min(post, t.post);
          } else {
            pre = r_max(pre, t.pre);
            post = r_max(post, t.post);
          }
        }
        return {m, pre, first.cmd, post};
      }
      case Rule::Constancy: {
        require_premises(d, 1);
        require(d.B != nullptr, "constancy needs :B");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "constancy");
        auto mods = mod_set(t.cmd);
        for (auto& v : free_vars(d.B))
          require(!mods.count(v),
                  "constancy: fv(B) meets mod(C) at '" + v + "'");
        ResPtr pre, post;
        if (m == Mode::F) {
          pre = r_max(t.pre, r_guard(d.B));
          post = r_max(t.post, r_guard(d.B));
        } else {
          pre = r_min(t.pre, r_guard(d.B));
          post = r_min(t.post, r_guard(d.B));
        }
        return {m, pre, t.cmd, post};
      }
      case Rule::Relax: {
        require_premises(d, 1);
        require(d.F != nullptr, "relax needs :F");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "relax");
        auto mods = mod_set(t.cmd);
        for (auto& v : free_vars_res(d.F))
          require(!mods.count(v), "relax: fv(F) meets mod(C) at '" + v + "'");
        if (dia) require_leq(d.F, r_fin(0), "side condition F <= 0");
        auto shift = [&](const ResPtr& r) -> ResPtr {
          if (d.F->kind == ResExpr::Kind::Arith) return add_expr(r, d.F->e);
          if (d.F->kind == ResExpr::Kind::Lit && d.F->lit.is_finite())
            return add_expr(r, e_lit(d.F->lit.value()));
          return r_add(r, d.F);
        };
        return {m, shift(t.pre), t.cmd, shift(t.post)};
      }
      case Rule::Cons: {
        require_premises(d, 1);
        require(d.P && d.Q, "consequence needs :P and :Q");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "consequence");
        require_leq(d.P, t.pre, "consequence requires P <= P'");
        require_leq(t.post, d.Q, "consequence requires Q' <= Q");
        return {m, d.P, t.cmd, d.Q};
      }
      case Rule::Subst: {
        require_premises(d, 1);
        require(!d.x.empty() && !d.y.empty(), "substitution needs :x and :y");
        CheckedTriple t = check(*d.premises[0]);
        require_mode(t, m, "substitution");
        auto fp = free_vars_res(t.pre);
        auto fq = free_vars_res(t.post);
        auto fc = free_vars(t.cmd);
        require(!fp.count(d.y) && !fq.count(d.y) && !fc.count(d.y),
                "substitution: '" + d.y + "' must be fresh for P, Q and C");
        return {m, res_subst(t.pre, d.x, e_var(d.y)),
                rename_var(t.cmd, d.y, d.x),
                res_subst(t.post, d.x, e_var(d.y))};
      }
    }
    throw KernelError("unhandled rule");
  }
};

}  // namespace

CheckedTriple check_derivation(const Derivation& d, const SideMethod& side) {
  Checker chk{side};
  return chk.check(d);
}

// ---- derivation files --------------------------------------------------------

namespace {

struct DerivParser {
  const std::string& s;
  size_t i = 0;
  explicit DerivParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else if (s[i] == ';') {  // comment to end of line
        while (i < s.size() && s[i] != '\n') ++i;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("derivation: " + msg, 1, static_cast<int>(i) + 1);
  }

  std::string braced() {
    skip_ws();
    if (i >= s.size() || s[i] != '{') fail("expected '{'");
    ++i;
    int depth = 1;
    std::string out;
    while (i < s.size()) {
      char c = s[i++];
      if (c == '{') ++depth;
      if (c == '}') {
        if (--depth == 0) return out;
      }
      out += c;
    }
    fail("unterminated '{'");
  }

  std::string word() {
    skip_ws();
    std::string w;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
           s[i] != '(' && s[i] != ')' && s[i] != '{')
      w += s[i++];
    return w;
  }

  DerivPtr parse() {
    skip_ws();
    if (i >= s.size() || s[i] != '(') fail("expected '('");
    ++i;
    auto d = std::make_shared<Derivation>();
    std::string rn = word();
    if (!parse_rule_name(rn, d->mode, d->rule)) fail("unknown rule: " + rn);
    while (true) {
      skip_ws();
      if (i >= s.size()) fail("unterminated derivation");
      if (s[i] == ')') {
        ++i;
        return d;
      }
      if (s[i] == '(') {
        d->premises.push_back(parse());
        continue;
      }
      std::string key = word();
      if (key.empty() || key[0] != ':') fail("expected :key or premise");
      std::string val = braced();
      if (key == ":x" || key == ":y" || key == ":m") {
        size_t b = val.find_first_not_of(" \t\n");
        size_t e = val.find_last_not_of(" \t\n");
        val = b == std::string::npos ? "" : val.substr(b, e - b + 1);
      }
      if (key == ":P") d->P = parse_res_string(val);
      else if (key == ":Q") d->Q = parse_res_string(val);
      else if (key == ":F") d->F = parse_res_string(val);
      else if (key == ":B") d->B = parse_bool_string(val);
      else if (key == ":e") d->e = parse_expr_string(val);
      else if (key == ":x") d->x = val;
      else if (key == ":y") d->y = val;
      else if (key == ":m") d->m = std::stoll(val);
      else if (key == ":cmd") d->cmd = desugar(parse_command_string(val));
      else if (key == ":fam") d->family.push_back(parse_res_string(val));
      else fail("unknown binding " + key);
    }
  }
};

}  // namespace

DerivPtr parse_derivation(const std::string& text) {
  DerivParser p(text);
  DerivPtr d = p.parse();
  p.skip_ws();
  if (p.i < text.size()) p.fail("trailing input after the derivation");
  return d;
}

}  // namespace quav
