#include "quav/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <vector>

#include "quav/diag.hpp"

namespace quav {

namespace {

// ---- lexer -------------------------------------------------------------------

struct Tok {
  enum class Kind { Ident, Int, Punct, End } kind = Kind::End;
  std::string text;
  std::int64_t num = 0;
  int line = 1, col = 1;
  size_t offset = 0;
};

const std::set<std::string> kReserved = {
    "skip", "assume", "tick", "if", "else", "while", "int",    "forall",
    "in",   "ite",    "true", "false", "top", "demon", "exists"};

struct Lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  std::vector<Tok> lex() {
    std::vector<Tok> toks;
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      Tok t;
      t.line = line;
      t.col = col;
      t.offset = pos;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_')) {
          id += src[pos];
          advance();
        }
        t.kind = Tok::Kind::Ident;
        t.text = id;
        toks.push_back(t);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos]))) {
          num += src[pos];
          advance();
        }
        t.kind = Tok::Kind::Int;
        try {
          t.num = std::stoll(num);
        } catch (const std::exception&) {
          throw ParseError("integer literal out of range", t.line, t.col);
        }
        toks.push_back(t);
        continue;
      }
      // multi-char punctuation first
      auto two = src.substr(pos, 2);
      if (two == "==" || two == "!=" || two == "<=" || two == ">=" ||
          two == "&&" || two == "||" || two == "->") {
        t.kind = Tok::Kind::Punct;
        t.text = two;
        advance();
        advance();
        toks.push_back(t);
        continue;
      }
      if (std::string(";,()[]{}=<>+-*/!.:").find(c) != std::string::npos) {
        t.kind = Tok::Kind::Punct;
        t.text = std::string(1, c);
        advance();
        toks.push_back(t);
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Tok end;
    end.kind = Tok::Kind::End;
    end.line = line;
    end.col = col;
    end.offset = pos;
    toks.push_back(end);
    return toks;
  }
};

// ---- pragma extraction ---------------------------------------------------------

struct Pragma {
  std::string kind;  // pre | post | loop
  std::string text;  // content after the keyword, continuation lines joined
  size_t end_offset = 0;  // position just past the pragma in the source
  int line = 1;
  bool used = false;
};

// Blanks comments out of `code` (preserving offsets) and collects pragmas.
std::vector<Pragma> strip_comments(std::string& code) {
  std::vector<Pragma> pragmas;
  size_t i = 0;
  auto blank = [&](size_t from, size_t to) {
    for (size_t k = from; k < to; ++k)
      if (code[k] != '\n') code[k] = ' ';
  };
  int line = 1;
  while (i < code.size()) {
    if (code[i] == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (code.compare(i, 2, "/*") == 0) {
      size_t end = code.find("*/", i + 2);
      if (end == std::string::npos)
        throw ParseError("unterminated block comment", line, 1);
      for (size_t k = i; k < end + 2; ++k)
        if (code[k] == '\n') ++line;
      blank(i, end + 2);
      i = end + 2;
      continue;
    }
    if (code.compare(i, 3, "//@") == 0) {
      size_t eol = code.find('\n', i);
      if (eol == std::string::npos) eol = code.size();
      std::string content = code.substr(i + 3, eol - (i + 3));
      blank(i, eol);
      // first word decides: new pragma or continuation
      size_t w = content.find_first_not_of(" \t");
      std::string word;
      for (size_t k = w; k != std::string::npos && k < content.size() &&
                         (std::isalpha(static_cast<unsigned char>(content[k])));
           ++k)
        word += content[k];
      if (word == "pre" || word == "post" || word == "loop") {
        Pragma p;
        p.kind = word;
        p.text = content.substr(w + word.size());
        p.end_offset = eol;
        p.line = line;
        pragmas.push_back(std::move(p));
      } else {
        if (pragmas.empty())
          throw ParseError("pragma continuation without a pragma", line, 1);
        pragmas.back().text += " " + content;
        pragmas.back().end_offset = eol;
      }
      i = eol;
      continue;
    }
    if (code.compare(i, 2, "//") == 0) {
      size_t eol = code.find('\n', i);
      if (eol == std::string::npos) eol = code.size();
      blank(i, eol);
      i = eol;
      continue;
    }
    ++i;
  }
  return pragmas;
}

// ---- token-stream parser --------------------------------------------------------

struct Scope {
  std::set<std::string> scalars, arrays;
  // annotation-only names (subvariant indices, forall binders)
  std::vector<std::string> extra;
  bool check = true;

  bool knows_scalar(const std::string& n) const {
    if (!check) return true;
    if (scalars.count(n)) return true;
    return std::find(extra.begin(), extra.end(), n) != extra.end();
  }
  bool knows_array(const std::string& n) const { return !check || arrays.count(n); }
};

struct TokParser {
  std::vector<Tok> toks;
  size_t pos = 0;
  Scope* scope = nullptr;
  bool annotation = false;  // allow forall/ite

  const Tok& peek(int k = 0) const {
    size_t i = std::min(pos + k, toks.size() - 1);
    return toks[i];
  }
  const Tok& cur() const { return peek(); }
  Tok next() { return toks[std::min(pos++, toks.size() - 1)]; }
  bool at_punct(const std::string& p) const {
    return cur().kind == Tok::Kind::Punct && cur().text == p;
  }
  bool at_ident(const std::string& id) const {
    return cur().kind == Tok::Kind::Ident && cur().text == id;
  }
  bool eat_punct(const std::string& p) {
    if (!at_punct(p)) return false;
    ++pos;
    return true;
  }
  void expect_punct(const std::string& p) {
    if (!eat_punct(p))
      throw ParseError("expected '" + p + "', found '" + cur().text + "'",
                       cur().line, cur().col);
  }
  void expect_ident(const std::string& id) {
    if (!at_ident(id))
      throw ParseError("expected '" + id + "', found '" + cur().text + "'",
                       cur().line, cur().col);
    ++pos;
  }
  std::string expect_name() {
    if (cur().kind != Tok::Kind::Ident)
      throw ParseError("expected identifier, found '" + cur().text + "'",
                       cur().line, cur().col);
    if (kReserved.count(cur().text))
      throw ParseError("'" + cur().text + "' is reserved", cur().line, cur().col);
    return next().text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }

  // ---- expressions ----

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (at_punct("+") || at_punct("-")) {
      bool add = next().text == "+";
      ExprPtr rhs = parse_term();
      e = add ? e_add(e, rhs) : e_sub(e, rhs);
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    while (at_punct("*") || at_punct("/")) {
      bool mul = next().text == "*";
      Tok at = cur();
      ExprPtr rhs = parse_unary();
      if (mul) {
        e = e_mul(e, rhs);
      } else {
        // denominators must be nonzero integer literals
        std::int64_t d;
        if (rhs->kind == Expr::Kind::Lit) {
          d = rhs->lit;
        } else if (rhs->kind == Expr::Kind::Neg &&
                   rhs->a->kind == Expr::Kind::Lit) {
          d = -rhs->a->lit;
        } else {
          throw ParseError("division denominator must be an integer literal",
                           at.line, at.col);
        }
        if (d == 0) throw ParseError("division by zero literal", at.line, at.col);
        e = e_div(e, d);
      }
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (eat_punct("-")) return e_neg(parse_unary());
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Tok& t = cur();
    if (t.kind == Tok::Kind::Int) {
      ++pos;
      return e_lit(t.num);
    }
    if (eat_punct("(")) {
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Tok::Kind::Ident) {
      if (t.text == "ite") {
        if (!annotation)
          fail("ite(...) is only allowed inside annotations");
        ++pos;
        expect_punct("(");
        BoolPtr c = parse_bool();
        expect_punct(",");
        ExprPtr a = parse_expr();
        expect_punct(",");
        ExprPtr b = parse_expr();
        expect_punct(")");
        return e_ite(c, a, b);
      }
      if (kReserved.count(t.text)) fail("unexpected '" + t.text + "'");
      std::string name = next().text;
      if (eat_punct("[")) {
        if (scope && !scope->knows_array(name))
          throw ParseError("undeclared array: " + name, t.line, t.col);
        ExprPtr idx = parse_expr();
        expect_punct("]");
        return e_read(ArrExpr{name, {}}, idx);
      }
      if (scope && !scope->knows_scalar(name))
        throw ParseError("undeclared identifier: " + name, t.line, t.col);
      return e_var(name);
    }
    fail("expected expression");
  }

  // ---- booleans ----

  BoolPtr parse_bool() {
    BoolPtr b = parse_and();
    while (at_punct("||")) {
      ++pos;
      b = b_or(b, parse_and());
    }
    return b;
  }

  BoolPtr parse_and() {
    BoolPtr b = parse_batom();
    while (at_punct("&&")) {
      ++pos;
      b = b_and(b, parse_batom());
    }
    return b;
  }

  BoolPtr parse_batom() {
    if (eat_punct("!")) return b_not(parse_batom());
    if (at_ident("true")) {
      ++pos;
      return b_true();
    }
    if (at_ident("false")) {
      ++pos;
      return b_false();
    }
    if (at_ident("top")) {
      if (!annotation) fail("'top' is only allowed inside annotations");
      ++pos;
      return b_true();
    }
    if (at_ident("forall")) {
      if (!annotation) fail("quantifiers are only allowed inside annotations");
      ++pos;
      std::string v = expect_name();
      expect_ident("in");
      expect_punct("[");
      ExprPtr lo = parse_expr();
      expect_punct(",");
      ExprPtr hi = parse_expr();
      expect_punct(")");
      expect_punct(".");
      if (scope) scope->extra.push_back(v);
      BoolPtr body = parse_batom();
      if (scope) scope->extra.pop_back();
      return b_forall_range(v, lo, hi, body);
    }
    if (at_punct("(")) {
      // '(' may open a parenthesized boolean or the lhs of a comparison;
      // try boolean first, fall back to comparison on failure
      size_t save = pos;
      ++pos;
      try {
        BoolPtr b = parse_bool();
        expect_punct(")");
        if (at_cmp_op()) throw ParseError("cmp", cur().line, cur().col);
        return b;
      } catch (const ParseError&) {
        pos = save;
      }
    }
    ExprPtr lhs = parse_expr();
    CmpOp op = parse_cmp_op();
    ExprPtr rhs = parse_expr();
    return b_cmp(op, lhs, rhs);
  }

  bool at_cmp_op() const {
    if (cur().kind != Tok::Kind::Punct) return false;
    const std::string& p = cur().text;
    return p == "==" || p == "=" || p == "!=" || p == "<" || p == "<=" ||
           p == ">" || p == ">=";
  }

  CmpOp parse_cmp_op() {
    if (cur().kind != Tok::Kind::Punct) fail("expected comparison operator");
    std::string p = next().text;
    if (p == "==" || p == "=") return CmpOp::Eq;
    if (p == "!=") return CmpOp::Ne;
    if (p == "<") return CmpOp::Lt;
    if (p == "<=") return CmpOp::Le;
    if (p == ">") return CmpOp::Gt;
    if (p == ">=") return CmpOp::Ge;
    throw ParseError("expected comparison operator, found '" + p + "'",
                     cur().line, cur().col);
  }

  // ---- resource expressions (derivation files, reports) ----

  ResPtr parse_res() {
    ResPtr r = parse_res_atom();
    while (at_punct("+")) {
      ++pos;
      r = r_add(r, parse_res_atom());
    }
    return r;
  }

  ResPtr parse_res_atom() {
    if (at_ident("min") || at_ident("max")) {
      bool is_min = next().text == "min";
      expect_punct("(");
      ResPtr a = parse_res();
      expect_punct(",");
      ResPtr b = parse_res();
      expect_punct(")");
      return is_min ? r_min(a, b) : r_max(a, b);
    }
    if (at_ident("oo")) {
      ++pos;
      return r_lit(ExtInt::pos_inf());
    }
    if (at_punct("-") && peek(1).kind == Tok::Kind::Ident &&
        peek(1).text == "oo") {
      pos += 2;
      return r_lit(ExtInt::neg_inf());
    }
    if (at_punct("[")) {
      ++pos;
      bool saved = annotation;
      annotation = true;
      BoolPtr b = parse_bool();
      annotation = saved;
      expect_punct("]");
      return r_guard(b);
    }
    if (at_ident("sup") || at_ident("inf")) {
      bool is_sup = next().text == "sup";
      std::string v = expect_name();
      expect_punct(".");
      if (scope) scope->extra.push_back(v);
      ResPtr body = parse_res_atom();
      if (scope) scope->extra.pop_back();
      return is_sup ? r_sup(v, body) : r_inf(v, body);
    }
    return r_arith(parse_expr());
  }

  // ---- factored assertions ----

  FactoredAssertion parse_factored() {
    bool saved = annotation;
    annotation = true;
    expect_punct("[");
    BoolPtr spec = parse_bool();
    expect_punct(";");
    ExprPtr res = parse_expr();
    expect_punct("]");
    annotation = saved;
    return {spec, res};
  }
};

// ---- program parser --------------------------------------------------------------

struct ProgramParser {
  TokParser tp;
  Scope scope;
  std::map<size_t, Pragma*> loop_pragma_at;  // token index -> pragma
  std::vector<std::string> loop_index_stack;
  int next_loop_id = 1;

  LoopSpecPtr take_loop_pragma() {
    auto it = loop_pragma_at.find(tp.pos);
    if (it == loop_pragma_at.end()) return nullptr;
    Pragma* pg = it->second;
    pg->used = true;
    return parse_loop_pragma(*pg);
  }

  LoopSpecPtr parse_loop_pragma(const Pragma& pg) {
    Lexer lx(pg.text);
    TokParser sub{lx.lex()};
    sub.scope = &scope;
    sub.annotation = true;
    // enclosing subvariant indices are in scope for nested-loop annotations
    for (auto& v : loop_index_stack) scope.extra.push_back(v);
    auto spec = std::make_shared<LoopSpec>();
    spec->loop_id = next_loop_id++;
    sub.expect_ident("iters");
    sub.expect_punct(":");
    spec->iters = sub.parse_expr();
    sub.expect_punct(";");
    sub.expect_ident("subvar");
    spec->index_var = sub.expect_name();
    if (scope.scalars.count(spec->index_var) || scope.arrays.count(spec->index_var))
      throw ParseError("subvariant index '" + spec->index_var +
                           "' collides with a declared name",
                       pg.line, 1);
    sub.expect_punct("->");
    scope.extra.push_back(spec->index_var);
    spec->subvar = sub.parse_factored();
    scope.extra.pop_back();  // prefix/exhaust must not use the index variable
    if (sub.eat_punct(";")) {
      if (sub.at_ident("prefix")) {
        ++sub.pos;
        spec->prefix = sub.parse_factored();
        if (sub.eat_punct(";")) {
          if (!sub.at_ident("exhaust")) sub.fail("expected 'exhaust'");
        }
      }
      if (sub.at_ident("exhaust")) {
        ++sub.pos;
        sub.expect_punct(":");
        spec->exhaust = sub.parse_expr();
      }
    }
    for (size_t i = 0; i < loop_index_stack.size(); ++i) scope.extra.pop_back();
    if (sub.cur().kind != Tok::Kind::End)
      throw ParseError("trailing input in loop pragma: '" + sub.cur().text + "'",
                       pg.line, 1);
    return spec;
  }

  // A statement list at nesting depth `depth` (0 = top level).
  CmdPtr parse_stmts(int depth, Program* prog, const std::string& terminator) {
    std::vector<CmdPtr> stmts;
    while (true) {
      if (!terminator.empty() && tp.at_punct(terminator)) break;
      if (tp.cur().kind == Tok::Kind::End) {
        if (!terminator.empty()) tp.fail("expected '" + terminator + "'");
        break;
      }
      if (tp.at_ident("int")) {
        Tok at = tp.cur();
        ++tp.pos;
        std::string name = tp.expect_name();
        bool is_array = false;
        if (tp.eat_punct("[")) {
          tp.expect_punct("]");
          is_array = true;
        }
        ExprPtr init;
        if (!is_array && tp.eat_punct("=")) init = tp.parse_expr();
        tp.expect_punct(";");
        if (scope.scalars.count(name) || scope.arrays.count(name))
          throw ParseError("redeclaration of '" + name + "'", at.line, at.col);
        if (depth == 0) {
          if (!stmts.empty() && is_array)
            throw ParseError("array declarations must precede statements",
                             at.line, at.col);
          prog->decls.push_back({name, is_array});
          (is_array ? scope.arrays : scope.scalars).insert(name);
          if (init) stmts.push_back(c_assign(name, init));
          continue;
        }
        if (is_array)
          throw ParseError("arrays can only be declared at the top level",
                           at.line, at.col);
        // local over the remainder of the block
        scope.scalars.insert(name);
        CmdPtr rest = parse_stmts(depth, prog, terminator);
        scope.scalars.erase(name);
        CmdPtr body = init ? (rest ? c_seq(c_assign(name, init), rest)
                                   : c_assign(name, init))
                           : (rest ? rest : c_skip());
        stmts.push_back(c_local(name, body));
        break;  // the local swallowed the rest of this block
      }
      stmts.push_back(parse_stmt(depth, prog));
    }
    if (stmts.empty()) return nullptr;
    CmdPtr out = stmts.back();
    for (size_t i = stmts.size() - 1; i-- > 0;) out = c_seq(stmts[i], out);
    return out;
  }

  CmdPtr parse_stmt(int depth, Program* prog) {
    LoopSpecPtr pending = take_loop_pragma();
    if (pending && !tp.at_ident("while"))
      tp.fail("a loop pragma must immediately precede a while loop");

    if (tp.at_ident("skip")) {
      ++tp.pos;
      tp.expect_punct(";");
      return c_skip();
    }
    if (tp.at_ident("assume")) {
      ++tp.pos;
      tp.expect_punct("(");
      BoolPtr b = tp.parse_bool();
      tp.expect_punct(")");
      tp.expect_punct(";");
      return c_assume(b);
    }
    if (tp.at_ident("tick")) {
      ++tp.pos;
      tp.expect_punct("(");
      ExprPtr e = tp.parse_expr();
      tp.expect_punct(")");
      tp.expect_punct(";");
      return c_tick(e);
    }
    if (tp.at_punct("{")) {
      ++tp.pos;
      CmdPtr body = parse_stmts(depth + 1, prog, "}");
      tp.expect_punct("}");
      return body ? body : c_skip();
    }
    if (tp.at_ident("if")) {
      ++tp.pos;
      tp.expect_punct("(");
      bool demon = false;
      BoolPtr cond;
      if (tp.at_ident("demon") && tp.peek(1).kind == Tok::Kind::Punct &&
          tp.peek(1).text == ")") {
        demon = true;
        ++tp.pos;
      } else {
        cond = tp.parse_bool();
      }
      tp.expect_punct(")");
      CmdPtr then = parse_stmt(depth + 1, prog);
      CmdPtr els = c_skip();
      if (tp.at_ident("else")) {
        ++tp.pos;
        els = parse_stmt(depth + 1, prog);
      }
      return c_if(demon ? b_true() : cond, then, els, demon);
    }
    if (tp.at_ident("while")) {
      ++tp.pos;
      tp.expect_punct("(");
      BoolPtr cond = tp.parse_bool();
      tp.expect_punct(")");
      if (pending) loop_index_stack.push_back(pending->index_var);
      CmdPtr body = parse_stmt(depth + 1, prog);
      if (pending) loop_index_stack.pop_back();
      return c_while(cond, body, pending);
    }
    // assignment
    Tok at = tp.cur();
    std::string name = tp.expect_name();
    if (tp.eat_punct("[")) {
      if (!scope.knows_array(name))
        throw ParseError("undeclared array: " + name, at.line, at.col);
      ExprPtr idx = tp.parse_expr();
      tp.expect_punct("]");
      tp.expect_punct("=");
      ExprPtr val = tp.parse_expr();
      tp.expect_punct(";");
      return c_arr_assign(name, idx, val);
    }
    if (!scope.knows_scalar(name))
      throw ParseError("undeclared identifier: " + name, at.line, at.col);
    tp.expect_punct("=");
    ExprPtr val = tp.parse_expr();
    tp.expect_punct(";");
    return c_assign(name, val);
  }
};

}  // namespace

Program parse_program(const std::string& source) {
  std::string code = source;
  std::vector<Pragma> pragmas = strip_comments(code);

  Lexer lx(code);
  ProgramParser pp;
  pp.tp.toks = lx.lex();

  // map each loop pragma to the first token at or after its end
  for (auto& pg : pragmas) {
    if (pg.kind != "loop") continue;
    size_t idx = 0;
    while (idx < pp.tp.toks.size() && pp.tp.toks[idx].offset < pg.end_offset)
      ++idx;
    pp.loop_pragma_at[idx] = &pg;
  }

  Program prog;
  pp.tp.scope = &pp.scope;
  CmdPtr body = pp.parse_stmts(0, &prog, "");
  prog.body = body ? body : c_skip();

  // pre/post pragmas; validated for position against the first statement token
  for (auto& pg : pragmas) {
    if (pg.kind == "loop") {
      if (!pg.used)
        throw ParseError("loop pragma does not precede a while loop", pg.line, 1);
      continue;
    }
    Lexer plx(pg.text);
    TokParser sub{plx.lex()};
    sub.scope = &pp.scope;
    // globals are all in scope for pre/post
    sub.annotation = true;
    FactoredAssertion fa = sub.parse_factored();
    if (sub.cur().kind != Tok::Kind::End)
      throw ParseError("trailing input in pragma", pg.line, 1);
    if (pg.kind == "pre") {
      if (prog.annot.pre)
        throw ParseError("duplicate pre annotation", pg.line, 1);
      prog.annot.pre = fa;
    } else {
      if (prog.annot.post)
        throw ParseError("duplicate post annotation", pg.line, 1);
      prog.annot.post = fa;
    }
  }
  return prog;
}

static TokParser make_fragment_parser(const std::string& text,
                                      const std::set<std::string>* declared,
                                      Scope& scope, bool annotation) {
  Lexer lx(text);
  TokParser tp{lx.lex()};
  if (declared) {
    scope.check = true;
    // fragment callers do not distinguish arrays; accept either use
    scope.scalars = *declared;
    scope.arrays = *declared;
  } else {
    scope.check = false;
  }
  tp.scope = &scope;
  tp.annotation = annotation;
  return tp;
}

ExprPtr parse_expr_string(const std::string& text,
                          const std::set<std::string>* declared, bool annotation) {
  Scope scope;
  TokParser tp = make_fragment_parser(text, declared, scope, annotation);
  ExprPtr e = tp.parse_expr();
  if (tp.cur().kind != Tok::Kind::End)
    throw ParseError("trailing input: '" + tp.cur().text + "'", tp.cur().line,
                     tp.cur().col);
  return e;
}

BoolPtr parse_bool_string(const std::string& text,
                          const std::set<std::string>* declared, bool annotation) {
  Scope scope;
  TokParser tp = make_fragment_parser(text, declared, scope, annotation);
  BoolPtr b = tp.parse_bool();
  if (tp.cur().kind != Tok::Kind::End)
    throw ParseError("trailing input: '" + tp.cur().text + "'", tp.cur().line,
                     tp.cur().col);
  return b;
}

FactoredAssertion parse_factored_string(const std::string& text,
                                        const std::set<std::string>* declared) {
  Scope scope;
  TokParser tp = make_fragment_parser(text, declared, scope, true);
  FactoredAssertion fa = tp.parse_factored();
  if (tp.cur().kind != Tok::Kind::End)
    throw ParseError("trailing input: '" + tp.cur().text + "'", tp.cur().line,
                     tp.cur().col);
  return fa;
}

ResPtr parse_res_string(const std::string& text,
                        const std::set<std::string>* declared) {
  Scope scope;
  TokParser tp = make_fragment_parser(text, declared, scope, true);
  ResPtr r = tp.parse_res();
  if (tp.cur().kind != Tok::Kind::End)
    throw ParseError("trailing input: '" + tp.cur().text + "'", tp.cur().line,
                     tp.cur().col);
  return r;
}

CmdPtr parse_command_string(const std::string& text) {
  std::string code = text;
  std::vector<Pragma> pragmas = strip_comments(code);
  if (!pragmas.empty())
    throw ParseError("pragmas are not allowed in command fragments", 1, 1);
  Lexer lx(code);
  ProgramParser pp;
  pp.tp.toks = lx.lex();
  pp.tp.scope = &pp.scope;
  pp.scope.check = false;
  Program dummy;
  CmdPtr c = pp.parse_stmts(1, &dummy, "");
  return c ? c : c_skip();
}

std::set<std::string> declared_names(const Program& p) {
  std::set<std::string> s;
  for (auto& d : p.decls) s.insert(d.name);
  return s;
}

}  // namespace quav
