#include "quav/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "quav/diag.hpp"

namespace quav {

// ---- encoding ----------------------------------------------------------------

namespace {

struct Enc {
  const EncodeOpts& opts;
  std::ostringstream out;

  std::string num(std::int64_t v) {
    if (v < 0) return "(- " + std::to_string(-v) + ")";
    return std::to_string(v);
  }

  std::string arr(const ArrExpr& a) {
    std::string t = a.base;
    for (auto& [i, v] : a.stores)
      t = "(store " + t + " " + expr(i) + " " + expr(v) + ")";
    return t;
  }

  std::string expr(const ExprPtr& e) {
    switch (e->kind) {
      case Expr::Kind::Lit: return num(e->lit);
      case Expr::Kind::Var: return e->var;
      case Expr::Kind::Read:
        return "(select " + arr(e->arr) + " " + expr(e->a) + ")";
      case Expr::Kind::Add: return "(+ " + expr(e->a) + " " + expr(e->b) + ")";
      case Expr::Kind::Sub: return "(- " + expr(e->a) + " " + expr(e->b) + ")";
      case Expr::Kind::Mul: return "(* " + expr(e->a) + " " + expr(e->b) + ")";
      case Expr::Kind::Div:
        return "(div " + expr(e->a) + " " + num(e->lit) + ")";
      case Expr::Kind::Neg: return "(- " + expr(e->a) + ")";
      case Expr::Kind::Ite:
        return "(ite " + boolean(e->cond) + " " + expr(e->a) + " " + expr(e->b) +
               ")";
    }
    throw SolverError("bad expression in encoding");
  }

  std::string boolean(const BoolPtr& b) {
    switch (b->kind) {
      case BoolExpr::Kind::True: return "true";
      case BoolExpr::Kind::False: return "false";
      case BoolExpr::Kind::Cmp: {
        std::string a = expr(b->e1), c = expr(b->e2);
        switch (b->op) {
          case CmpOp::Eq: return "(= " + a + " " + c + ")";
          case CmpOp::Ne: return "(not (= " + a + " " + c + "))";
          case CmpOp::Lt: return "(< " + a + " " + c + ")";
          case CmpOp::Le: return "(<= " + a + " " + c + ")";
          case CmpOp::Gt: return "(> " + a + " " + c + ")";
          case CmpOp::Ge: return "(>= " + a + " " + c + ")";
        }
        break;
      }
      case BoolExpr::Kind::And:
        return "(and " + boolean(b->l) + " " + boolean(b->r) + ")";
      case BoolExpr::Kind::Or:
        return "(or " + boolean(b->l) + " " + boolean(b->r) + ")";
      case BoolExpr::Kind::Not: return "(not " + boolean(b->l) + ")";
      case BoolExpr::Kind::ForallRange:
        return "(forall ((" + b->var + " Int)) (=> (and (<= " + expr(b->e1) +
               " " + b->var + ") (< " + b->var + " " + expr(b->e2) + ")) " +
               boolean(b->l) + "))";
      case BoolExpr::Kind::Quant: {
        std::string sort = b->var_is_array ? "(Array Int Int)" : "Int";
        std::string body = boolean(b->l);
        if (opts.bound && !b->var_is_array) {
          std::string range = "(and (<= " + num(-*opts.bound) + " " + b->var +
                              ") (<= " + b->var + " " + num(*opts.bound) + "))";
          body = b->exists ? "(and " + range + " " + body + ")"
                           : "(=> " + range + " " + body + ")";
        }
        return std::string(b->exists ? "(exists" : "(forall") + " ((" + b->var +
               " " + sort + ")) " + body + ")";
      }
      case BoolExpr::Kind::ArrEq:
        return "(= " + arr(b->a1) + " " + arr(b->a2) + ")";
    }
    throw SolverError("bad boolean in encoding");
  }

  bool is_base(const ResPtr& r) {
    return r->kind == ResExpr::Kind::Lit || r->kind == ResExpr::Kind::Arith ||
           r->kind == ResExpr::Kind::Guard;
  }

  // "R equals +oo", for base R
  std::string geq_posinf(const ResPtr& r) {
    switch (r->kind) {
      case ResExpr::Kind::Lit: return r->lit.is_pos_inf() ? "true" : "false";
      case ResExpr::Kind::Arith: return "false";
      case ResExpr::Kind::Guard: return boolean(r->g);
      default: break;
    }
    throw SolverError("non-encodable resource expression");
  }

  // formula for L(s) <= R(s); distributes min/max, then compares leaves
  std::string le(const ResPtr& L, const ResPtr& R) {
    if (L->kind == ResExpr::Kind::Min)
      return "(or " + le(L->a, R) + " " + le(L->b, R) + ")";
    if (L->kind == ResExpr::Kind::Max)
      return "(and " + le(L->a, R) + " " + le(L->b, R) + ")";
    if (R->kind == ResExpr::Kind::Min)
      return "(and " + le(L, R->a) + " " + le(L, R->b) + ")";
    if (R->kind == ResExpr::Kind::Max)
      return "(or " + le(L, R->a) + " " + le(L, R->b) + ")";
    if (!is_base(L) || !is_base(R))
      throw SolverError("non-encodable resource expression");

    if (L->kind == ResExpr::Kind::Lit && L->lit.is_neg_inf()) return "true";
    if (L->kind == ResExpr::Kind::Lit && L->lit.is_pos_inf())
      return geq_posinf(R);
    if (L->kind == ResExpr::Kind::Guard)
      return "(or (not " + boolean(L->g) + ") " + geq_posinf(R) + ")";
    // L is finite arithmetic
    std::string lt = L->kind == ResExpr::Kind::Lit ? num(L->lit.value())
                                                   : expr(L->e);
    switch (R->kind) {
      case ResExpr::Kind::Lit:
        if (R->lit.is_pos_inf()) return "true";
        if (R->lit.is_neg_inf()) return "false";
        return "(<= " + lt + " " + num(R->lit.value()) + ")";
      case ResExpr::Kind::Arith: return "(<= " + lt + " " + expr(R->e) + ")";
      case ResExpr::Kind::Guard: return boolean(R->g);
      default: break;
    }
    throw SolverError("non-encodable resource expression");
  }
};

void free_symbols(const ResPtr& r, std::set<std::string>& names,
                  std::set<std::string>& arrays) {
  auto f = free_vars_res(r);
  names.insert(f.begin(), f.end());
  collect_arrays(r, arrays);
}

}  // namespace

std::string encode_leq_query(const ResPtr& lhs, const ResPtr& rhs,
                             const EncodeOpts& opts) {
  Enc enc{opts};
  std::set<std::string> names, arrays;
  free_symbols(lhs, names, arrays);
  free_symbols(rhs, names, arrays);

  std::ostringstream out;
  out << "(set-logic " << opts.logic << ")\n";
  for (auto& n : names) {
    if (arrays.count(n)) continue;
    out << "(declare-const " << n << " Int)\n";
  }
  for (auto& a : arrays) out << "(declare-const " << a << " (Array Int Int))\n";
  if (opts.bound)
    for (auto& n : names) {
      if (arrays.count(n)) continue;
      out << "(assert (and (<= " << enc.num(-*opts.bound) << " " << n
          << ") (<= " << n << " " << enc.num(*opts.bound) << ")))\n";
    }
  out << "(assert (not " << enc.le(lhs, rhs) << "))\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

// ---- model parsing --------------------------------------------------------------

namespace {

struct Sexp {
  std::string atom;            // when leaf
  std::vector<Sexp> items;     // when list
  bool is_list = false;
};

struct SexpParser {
  const std::string& s;
  size_t i = 0;
  explicit SexpParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i]))))
      ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  Sexp parse() {
    skip_ws();
    if (i >= s.size()) throw SolverError("unexpected end of solver output");
    if (s[i] == '(') {
      ++i;
      Sexp e;
      e.is_list = true;
      while (true) {
        skip_ws();
        if (i >= s.size()) throw SolverError("unbalanced solver output");
        if (s[i] == ')') {
          ++i;
          return e;
        }
        e.items.push_back(parse());
      }
    }
    Sexp e;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) &&
           s[i] != '(' && s[i] != ')')
      e.atom += s[i++];
    return e;
  }
};

std::optional<std::int64_t> sexp_int(const Sexp& e) {
  if (!e.is_list) {
    try {
      size_t used = 0;
      std::int64_t v = std::stoll(e.atom, &used);
      if (used == e.atom.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  if (e.items.size() == 2 && !e.items[0].is_list && e.items[0].atom == "-") {
    auto inner = sexp_int(e.items[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

// const arrays, store chains and ite-lambdas
bool sexp_array(const Sexp& e, const std::string& lambda_var, ArrayVal& out) {
  if (e.is_list && e.items.size() == 2 && e.items[0].is_list &&
      e.items[0].items.size() >= 2 && e.items[0].items[0].atom == "as" &&
      e.items[0].items[1].atom == "const") {
    auto d = sexp_int(e.items[1]);
    if (!d) return false;
    out = ArrayVal{};
    out.def = *d;
    return true;
  }
  if (e.is_list && e.items.size() == 4 && e.items[0].atom == "store") {
    if (!sexp_array(e.items[1], lambda_var, out)) return false;
    auto i = sexp_int(e.items[2]);
    auto v = sexp_int(e.items[3]);
    if (!i || !v) return false;
    out.set(*i, *v);
    return true;
  }
  if (e.is_list && e.items.size() == 3 && e.items[0].atom == "lambda") {
    // (lambda ((x!0 Int)) body) with body an ite chain over x!0
    if (!e.items[1].is_list || e.items[1].items.empty()) return false;
    std::string var = e.items[1].items[0].items.empty()
                          ? ""
                          : e.items[1].items[0].items[0].atom;
    std::vector<std::pair<std::int64_t, std::int64_t>> cases;
    const Sexp* body = &e.items[2];
    while (body->is_list && body->items.size() == 4 &&
           body->items[0].atom == "ite") {
      const Sexp& cond = body->items[1];
      if (!cond.is_list || cond.items.size() != 3 || cond.items[0].atom != "=")
        return false;
      const Sexp& lhs = cond.items[1];
      const Sexp& rhs = cond.items[2];
      std::optional<std::int64_t> idx;
      if (!lhs.is_list && lhs.atom == var)
        idx = sexp_int(rhs);
      else if (!rhs.is_list && rhs.atom == var)
        idx = sexp_int(lhs);
      auto val = sexp_int(body->items[2]);
      if (!idx || !val) return false;
      cases.emplace_back(*idx, *val);
      body = &body->items[3];
    }
    auto d = sexp_int(*body);
    if (!d) return false;
    out = ArrayVal{};
    out.def = *d;
    for (auto it = cases.rbegin(); it != cases.rend(); ++it)
      out.set(it->first, it->second);
    return true;
  }
  return false;
}

void parse_model(const std::string& text, SmtOutcome& res) {
  SexpParser p(text);
  res.model_complete = true;
  while (!p.done()) {
    Sexp top = p.parse();
    std::vector<Sexp>* defs = &top.items;
    if (!top.is_list) continue;
    if (!top.items.empty() && !top.items[0].is_list &&
        top.items[0].atom == "model")
      ;  // (model (define-fun ...) ...) — defs already points at items
    for (auto& d : *defs) {
      if (!d.is_list || d.items.size() < 5) continue;
      if (d.items[0].atom != "define-fun") continue;
      const std::string& name = d.items[1].atom;
      const Sexp& sort = d.items[3];
      const Sexp& value = d.items[4];
      if (!sort.is_list && sort.atom == "Int") {
        auto v = sexp_int(value);
        if (v)
          res.model.scalars[name] = *v;
        else
          res.model_complete = false;
      } else if (sort.is_list && !sort.items.empty() &&
                 sort.items[0].atom == "Array") {
        ArrayVal av;
        if (sexp_array(value, "", av))
          res.model.arrays[name] = av;
        else
          res.model_complete = false;
      } else {
        res.model_complete = false;
      }
    }
  }
}

}  // namespace

// ---- subprocess driver ------------------------------------------------------------

namespace {

std::vector<std::string> split_cmd(const std::string& cmd) {
  std::vector<std::string> parts;
  std::istringstream ss(cmd);
  std::string w;
  while (ss >> w) parts.push_back(w);
  return parts;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    char tmpl[] = "/tmp/quav_smt_XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw SolverError("cannot create temporary script file");
    path = tmpl;
    ssize_t n = write(fd, contents.data(), contents.size());
    close(fd);
    if (n != static_cast<ssize_t>(contents.size()))
      throw SolverError("cannot write temporary script file");
  }
  ~TempFile() { unlink(path.c_str()); }
};

}  // namespace

SmtOutcome run_solver(const SolverHandle& handle, const std::string& script) {
  if (handle.cmd.empty())
    throw SolverError("no solver configured (see --solver-cmd)");
  TempFile file(script);

  std::vector<std::string> argv_s = split_cmd(handle.cmd);
  argv_s.push_back(file.path);
  std::vector<char*> argv;
  argv.reserve(argv_s.size() + 1);
  for (auto& a : argv_s) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  int out_pipe[2];
  if (pipe(out_pipe) != 0) throw SolverError("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    throw SolverError("fork() failed");
  }
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(out_pipe[1]);

  std::string output;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(handle.timeout_ms);
  bool timed_out = false;
  char buf[4096];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(left));
    if (pr <= 0) {
      timed_out = pr == 0;
      break;
    }
    ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n <= 0) break;  // EOF
    output.append(buf, static_cast<size_t>(n));
  }
  close(out_pipe[0]);
  int status = 0;
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    return {SmtOutcome::Kind::Unknown, {}, false, "timeout"};
  }
  waitpid(pid, &status, 0);
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    throw SolverError("failed to launch solver: " + handle.cmd);

  // first word decides
  std::istringstream ss(output);
  std::string verdict;
  ss >> verdict;
  if (verdict == "unsat") return {SmtOutcome::Kind::Proved, {}, false, ""};
  if (verdict == "unknown")
    return {SmtOutcome::Kind::Unknown, {}, false, "solver returned unknown"};
  if (verdict == "sat") {
    SmtOutcome res{SmtOutcome::Kind::Refuted, {}, false, ""};
    std::string rest = output.substr(output.find("sat") + 3);
    parse_model(rest, res);
    return res;
  }
  std::string head = output.substr(0, std::min<size_t>(output.size(), 400));
  throw SolverError("unparseable solver output: " + head);
}

// ---- solver discovery ---------------------------------------------------------------

namespace {

bool file_exists(const std::string& p) {
  struct stat st{};
  return stat(p.c_str(), &st) == 0;
}

bool on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':'))
    if (!dir.empty() && file_exists(dir + "/" + name)) return true;
  return false;
}

}  // namespace

SolverHandle default_solver() {
  SolverHandle h;
  if (const char* env = std::getenv("QUAV_SOLVER")) {
    h.cmd = env;
    return h;
  }
  if (on_path("z3")) {
    h.cmd = "z3 -smt2";
    return h;
  }
#ifdef QUAV_SOURCE_DIR
  std::string wrapper = std::string(QUAV_SOURCE_DIR) + "/tools/z3cli.mjs";
  if (on_path("node") && file_exists(wrapper) &&
      file_exists(std::string(QUAV_SOURCE_DIR) + "/node_modules/z3-solver")) {
    h.cmd = "node " + wrapper;
    return h;
  }
#endif
  h.cmd = "";
  return h;
}

}  // namespace quav
