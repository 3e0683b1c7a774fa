#include "quav/semantics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace quav {

// ---- scripts ----------------------------------------------------------------

ChoiceScript parse_script(const std::string& csv) {
  ChoiceScript s;
  if (csv.empty()) return s;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim
    size_t b = item.find_first_not_of(" \t");
    size_t e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ScriptError("empty script token");
    item = item.substr(b, e - b + 1);
    if (item == "L" || item == "l") {
      s.toks.push_back({ScriptTok::Kind::Left, 0});
    } else if (item == "R" || item == "r") {
      s.toks.push_back({ScriptTok::Kind::Right, 0});
    } else {
      try {
        s.toks.push_back({ScriptTok::Kind::Num, std::stoll(item)});
      } catch (const std::exception&) {
        throw ScriptError("bad script token: " + item);
      }
    }
  }
  return s;
}

std::string script_str(const ChoiceScript& s) {
  std::string out;
  for (auto& t : s.toks) {
    if (!out.empty()) out += ",";
    switch (t.kind) {
      case ScriptTok::Kind::Left: out += "L"; break;
      case ScriptTok::Kind::Right: out += "R"; break;
      case ScriptTok::Kind::Num: out += std::to_string(t.num); break;
    }
  }
  return out;
}

bool FixedSource::next_dir() {
  if (pos >= script.toks.size()) throw ScriptError("script exhausted at a choice");
  auto& t = script.toks[pos++];
  if (t.kind == ScriptTok::Kind::Num)
    throw ScriptError("script misshapen: number where L/R expected");
  return t.kind == ScriptTok::Kind::Left;
}

std::int64_t FixedSource::next_num(bool is_unroll) {
  if (pos >= script.toks.size())
    throw ScriptError(std::string("script exhausted at a ") +
                      (is_unroll ? "loop" : "local"));
  auto& t = script.toks[pos++];
  if (t.kind != ScriptTok::Kind::Num)
    throw ScriptError("script misshapen: L/R where a number was expected");
  if (is_unroll && t.num < 0)
    throw ScriptError("script misshapen: negative unroll count");
  return t.num;
}

bool RandomSource::next_dir() {
  bool left = rand_in(0, 1) == 0;
  recorded.toks.push_back({left ? ScriptTok::Kind::Left : ScriptTok::Kind::Right, 0});
  return left;
}

std::int64_t RandomSource::next_num(bool is_unroll) {
  Interval iv = is_unroll ? unroll : local;
  std::int64_t v = rand_in(iv.lo, iv.hi);
  recorded.toks.push_back({ScriptTok::Kind::Num, v});
  return v;
}

// ---- scripted interpreter ----------------------------------------------------

namespace {

struct Cfg {
  State s;
  std::int64_t q, l;
};

std::optional<Cfg> run(const CmdPtr& c, Cfg in, ScriptSource& src) {
  switch (c->kind) {
    case Command::Kind::Skip: return in;
    case Command::Kind::Assign: {
      in.s.scalars[c->var] = eval_expr(in.s, c->e1);
      return in;
    }
    case Command::Kind::ArrAssign: {
      // a[i] := v is whole-array update a := a{i -> v}
      std::int64_t i = eval_expr(in.s, c->e1);
      std::int64_t v = eval_expr(in.s, c->e2);
      auto it = in.s.arrays.find(c->var);
      if (it == in.s.arrays.end()) throw EvalError("undeclared array: " + c->var);
      it->second.set(i, v);
      return in;
    }
    case Command::Kind::Assume:
      if (!eval_bool(in.s, c->cond, empty_bounds())) return std::nullopt;
      return in;
    case Command::Kind::Tick: {
      std::int64_t v = eval_expr(in.s, c->e1);
      in.q = checked_sub(in.q, v);
      in.l = std::min(in.l, in.q);
      return in;
    }
    case Command::Kind::Seq: {
      auto mid = run(c->c1, std::move(in), src);
      if (!mid) return std::nullopt;
      return run(c->c2, std::move(*mid), src);
    }
    case Command::Kind::Choice:
      return run(src.next_dir() ? c->c1 : c->c2, std::move(in), src);
    case Command::Kind::Loop: {
      std::int64_t k = src.next_num(true);
      Cfg cur = std::move(in);
      for (std::int64_t i = 0; i < k; ++i) {
        auto next = run(c->c1, std::move(cur), src);
        if (!next) return std::nullopt;
        cur = std::move(*next);
      }
      return cur;
    }
    case Command::Kind::Local: {
      std::int64_t v = src.next_num(false);
      std::optional<std::int64_t> saved;
      auto it = in.s.scalars.find(c->var);
      if (it != in.s.scalars.end()) saved = it->second;
      in.s.scalars[c->var] = v;
      auto out = run(c->c1, std::move(in), src);
      if (!out) return std::nullopt;
      if (saved)
        out->s.scalars[c->var] = *saved;
      else
        out->s.scalars.erase(c->var);
      return out;
    }
    default:
      throw EvalError("exec requires a desugared command");
  }
}

}  // namespace

ExecResult exec(const CmdPtr& core, const State& init, std::int64_t p,
                ScriptSource& src) {
  auto r = run(core, Cfg{init, p, p}, src);
  if (!r) return {true, {}};
  return {false, Outcome{std::move(r->s), r->q, r->l}};
}

ExecResult exec(const CmdPtr& core, const State& init, std::int64_t p,
                const ChoiceScript& script) {
  FixedSource src(script);
  return exec(core, init, p, src);
}

// ---- first-use analysis -------------------------------------------------------

UseStatus first_use(const CmdPtr& c, const std::string& x) {
  switch (c->kind) {
    case Command::Kind::Skip: return UseStatus::Neutral;
    case Command::Kind::Assign:
      if (free_vars(c->e1).count(x)) return UseStatus::Reads;
      return c->var == x ? UseStatus::Writes : UseStatus::Neutral;
    case Command::Kind::ArrAssign: {
      auto f1 = free_vars(c->e1);
      auto f2 = free_vars(c->e2);
      return f1.count(x) || f2.count(x) ? UseStatus::Reads : UseStatus::Neutral;
    }
    case Command::Kind::Assume:
      return free_vars(c->cond).count(x) ? UseStatus::Reads : UseStatus::Neutral;
    case Command::Kind::Tick:
      return free_vars(c->e1).count(x) ? UseStatus::Reads : UseStatus::Neutral;
    case Command::Kind::Seq: {
      UseStatus s1 = first_use(c->c1, x);
      return s1 != UseStatus::Neutral ? s1 : first_use(c->c2, x);
    }
    case Command::Kind::Choice: {
      UseStatus s1 = first_use(c->c1, x), s2 = first_use(c->c2, x);
      if (s1 == UseStatus::Reads || s2 == UseStatus::Reads) return UseStatus::Reads;
      if (s1 == UseStatus::Writes && s2 == UseStatus::Writes)
        return UseStatus::Writes;
      return UseStatus::Neutral;
    }
    case Command::Kind::Loop:
      return first_use(c->c1, x) == UseStatus::Reads ? UseStatus::Reads
                                                     : UseStatus::Neutral;
    case Command::Kind::Local:
      if (c->var == x) return UseStatus::Neutral;
      return first_use(c->c1, x);
    default:
      throw EvalError("first_use requires a desugared command");
  }
}

// ---- enumeration ---------------------------------------------------------------

namespace {

struct CfgLess {
  bool operator()(const Cfg& a, const Cfg& b) const {
    if (a.q != b.q) return a.q < b.q;
    if (a.l != b.l) return a.l < b.l;
    return a.s < b.s;
  }
};
using CfgSet = std::set<Cfg, CfgLess>;

struct EnumCtx {
  const DomainBounds& bounds;
  bool truncated = false;
};

CfgSet step(const CmdPtr& c, const CfgSet& in, EnumCtx& ctx) {
  CfgSet out;
  switch (c->kind) {
    case Command::Kind::Skip: return in;
    case Command::Kind::Assign:
      for (auto cfg : in) {
        cfg.s.scalars[c->var] = eval_expr(cfg.s, c->e1);
        out.insert(std::move(cfg));
      }
      return out;
    case Command::Kind::ArrAssign:
      for (auto cfg : in) {
        std::int64_t i = eval_expr(cfg.s, c->e1);
        std::int64_t v = eval_expr(cfg.s, c->e2);
        auto it = cfg.s.arrays.find(c->var);
        if (it == cfg.s.arrays.end())
          throw EvalError("undeclared array: " + c->var);
        it->second.set(i, v);
        out.insert(std::move(cfg));
      }
      return out;
    case Command::Kind::Assume:
      for (auto& cfg : in)
        if (eval_bool(cfg.s, c->cond, empty_bounds())) out.insert(cfg);
      return out;
    case Command::Kind::Tick:
      for (auto cfg : in) {
        std::int64_t v = eval_expr(cfg.s, c->e1);
        cfg.q = checked_sub(cfg.q, v);
        cfg.l = std::min(cfg.l, cfg.q);
        out.insert(std::move(cfg));
      }
      return out;
    case Command::Kind::Seq: return step(c->c2, step(c->c1, in, ctx), ctx);
    case Command::Kind::Choice: {
      out = step(c->c1, in, ctx);
      CfgSet r = step(c->c2, in, ctx);
      out.insert(r.begin(), r.end());
      return out;
    }
    case Command::Kind::Loop: {
      CfgSet visited = in;
      CfgSet frontier = in;
      out = in;  // zero iterations
      for (std::int64_t k = 1;; ++k) {
        CfgSet next = step(c->c1, frontier, ctx);
        CfgSet fresh;
        for (auto& cfg : next)
          if (!visited.count(cfg)) fresh.insert(cfg);
        if (fresh.empty()) break;  // closure reached, exact
        if (k > ctx.bounds.unroll_cap) {
          ctx.truncated = true;
          break;
        }
        visited.insert(fresh.begin(), fresh.end());
        out.insert(fresh.begin(), fresh.end());
        frontier = std::move(fresh);
      }
      return out;
    }
    case Command::Kind::Local: {
      Interval vals = ctx.bounds.local_range;
      if (first_use(c->c1, c->var) == UseStatus::Writes) vals = {0, 0};
      for (auto& cfg : in) {
        std::optional<std::int64_t> saved;
        auto it = cfg.s.scalars.find(c->var);
        if (it != cfg.s.scalars.end()) saved = it->second;
        for (std::int64_t v = vals.lo; v <= vals.hi; ++v) {
          Cfg entry = cfg;
          entry.s.scalars[c->var] = v;
          CfgSet res = step(c->c1, CfgSet{entry}, ctx);
          for (auto o : res) {
            if (saved)
              o.s.scalars[c->var] = *saved;
            else
              o.s.scalars.erase(c->var);
            out.insert(std::move(o));
          }
        }
      }
      return out;
    }
    default:
      throw EvalError("enumerate requires a desugared command");
  }
}

}  // namespace

EnumResult enumerate_runs(const CmdPtr& core, const State& init, std::int64_t p,
                          const DomainBounds& bounds) {
  EnumCtx ctx{bounds};
  CfgSet res = step(core, CfgSet{Cfg{init, p, p}}, ctx);
  EnumResult out;
  out.truncated = ctx.truncated;
  for (auto& cfg : res) out.outcomes.push_back(Outcome{cfg.s, cfg.q, cfg.l});
  return out;
}

// ---- bounded triple semantics ---------------------------------------------------

namespace {

void arrays_in_bool(const BoolPtr& b, std::set<std::string>& out);

void arrays_in_expr(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Read) {
    out.insert(e->arr.base);
    for (auto& [i, v] : e->arr.stores) {
      arrays_in_expr(i, out);
      arrays_in_expr(v, out);
    }
  }
  if (e->cond) arrays_in_bool(e->cond, out);
  arrays_in_expr(e->a, out);
  arrays_in_expr(e->b, out);
}

void arrays_in_bool(const BoolPtr& b, std::set<std::string>& out) {
  if (!b) return;
  arrays_in_expr(b->e1, out);
  arrays_in_expr(b->e2, out);
  arrays_in_bool(b->l, out);
  arrays_in_bool(b->r, out);
  if (b->kind == BoolExpr::Kind::ArrEq) {
    out.insert(b->a1.base);
    out.insert(b->a2.base);
    for (auto& st : {b->a1.stores, b->a2.stores})
      for (auto& [i, v] : st) {
        arrays_in_expr(i, out);
        arrays_in_expr(v, out);
      }
  }
}

void arrays_in_res(const ResPtr& r, std::set<std::string>& out) {
  if (!r) return;
  arrays_in_expr(r->e, out);
  arrays_in_bool(r->g, out);
  arrays_in_res(r->a, out);
  arrays_in_res(r->b, out);
}

void arrays_in_cmd(const CmdPtr& c, std::set<std::string>& out) {
  if (!c) return;
  if (c->kind == Command::Kind::ArrAssign) out.insert(c->var);
  arrays_in_expr(c->e1, out);
  arrays_in_expr(c->e2, out);
  arrays_in_bool(c->cond, out);
  arrays_in_cmd(c->c1, out);
  arrays_in_cmd(c->c2, out);
}

}  // namespace

HoldsResult holds_semantically(Mode mode, const ResPtr& P, const CmdPtr& core,
                               const ResPtr& Q, const DomainBounds& bounds) {
  std::set<std::string> names = free_vars(core);
  for (auto& r : {P, Q}) {
    auto f = free_vars_res(r);
    names.insert(f.begin(), f.end());
  }
  std::set<std::string> arrays;
  arrays_in_cmd(core, arrays);
  arrays_in_res(P, arrays);
  arrays_in_res(Q, arrays);
  std::set<std::string> scalars;
  for (auto& n : names)
    if (!arrays.count(n)) scalars.insert(n);

  std::vector<State> space = state_space(bounds, scalars, arrays);

  // Anchor every enumeration at p = 0; by the relax-shift lemma a run from
  // (sigma, p) is the p-shift of a run from (sigma, 0).
  std::vector<EnumResult> runs;
  runs.reserve(space.size());
  bool truncated = false;
  for (auto& s : space) {
    runs.push_back(enumerate_runs(core, s, 0, bounds));
    truncated |= runs.back().truncated;
  }
  auto result = [&](HoldsResult r) {
    if (truncated && r.kind == HoldsResult::Kind::False) {
      // a missing witness may appear beyond the unroll cap
      return HoldsResult{HoldsResult::Kind::Truncated, r.note, r.witness};
    }
    return r;
  };

  if (mode == Mode::F) {
    for (auto& tau : space) {
      ExtInt qt = eval_res(Q, tau, bounds);
      if (qt.is_pos_inf()) continue;  // no integer q is >= +oo
      bool found = false;
      for (size_t i = 0; i < space.size() && !found; ++i) {
        ExtInt ps = eval_res(P, space[i], bounds);
        if (ps.is_pos_inf()) continue;
        for (auto& o : runs[i].outcomes) {
          if (!(o.state == tau)) continue;
          if (qt.is_neg_inf()) {
            // q unbounded below: demands P(sigma) = -oo
            if (ps.is_neg_inf()) { found = true; break; }
          } else if (ps.is_neg_inf() ||
                     checked_sub(qt.value(), o.q) >= ps.value()) {
            found = true;
            break;
          }
        }
      }
      if (!found)
        return result({HoldsResult::Kind::False,
                       "post-state with q = " + qt.str() + " is not covered",
                       tau});
    }
    // every required witness was found within the cap, so a hit cap cannot
    // change the answer
    return {HoldsResult::Kind::True, "", std::nullopt};
  }

  // B and B-diamond
  for (size_t i = 0; i < space.size(); ++i) {
    ExtInt ps = eval_res(P, space[i], bounds);
    if (ps.is_neg_inf()) continue;  // no integer p is <= -oo
    bool found = false;
    for (auto& o : runs[i].outcomes) {
      ExtInt qt = eval_res(Q, o.state, bounds);
      if (ps.is_pos_inf()) {
        // every p must be coverable; possible only with q unconstrained and,
        // for B-diamond, never (l = p + dl grows with p)
        if (mode == Mode::B && qt.is_pos_inf()) { found = true; break; }
        continue;
      }
      std::int64_t q = checked_add(ps.value(), o.q);
      bool q_ok = qt.is_pos_inf() || (!qt.is_neg_inf() && q <= qt.value());
      if (!q_ok) continue;
      if (mode == Mode::BDiamond && checked_add(ps.value(), o.l) > 0) continue;
      found = true;
      break;
    }
    if (!found)
      return result({HoldsResult::Kind::False,
                     "pre-state with p = " + ps.str() + " has no witnessing run",
                     space[i]});
  }
  return {HoldsResult::Kind::True, "", std::nullopt};
}

}  // namespace quav
