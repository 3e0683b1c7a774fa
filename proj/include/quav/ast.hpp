#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace quav {

struct Expr;
struct BoolExpr;
struct Command;
using ExprPtr = std::shared_ptr<const Expr>;
using BoolPtr = std::shared_ptr<const BoolExpr>;
using CmdPtr = std::shared_ptr<const Command>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

// Window hint for bounded evaluation of a quantifier that came out of a
// sup/inf binder: Initial = the variable stands for a pre-state value,
// Local = a `local` initial value, Wide = an intermediate program value.
enum class BinderRange { Initial, Local, Wide };

// Array-valued term: a named array with zero or more pending stores
// a{i1 -> v1}{i2 -> v2}..., applied left to right.
struct ArrExpr {
  std::string base;
  std::vector<std::pair<ExprPtr, ExprPtr>> stores;
};

struct Expr {
  enum class Kind { Lit, Var, Read, Add, Sub, Mul, Div, Neg, Ite };
  Kind kind;
  std::int64_t lit = 0;   // Lit; Div divisor (nonzero)
  std::string var;        // Var
  ArrExpr arr;            // Read
  ExprPtr a, b;           // operands; Read index in a; Neg operand in a
  BoolPtr cond;           // Ite
};

struct BoolExpr {
  enum class Kind { True, False, Cmp, And, Or, Not, ForallRange, Quant, ArrEq };
  Kind kind;
  CmpOp op = CmpOp::Eq;   // Cmp
  ExprPtr e1, e2;         // Cmp operands; ForallRange lo/hi
  BoolPtr l, r;           // And/Or; Not and binder bodies use l
  std::string var;        // ForallRange / Quant bound variable
  bool exists = false;    // Quant
  bool var_is_array = false;               // Quant
  BinderRange tag = BinderRange::Wide;     // Quant bounded-eval window
  ArrExpr a1, a2;         // ArrEq
};

// [spec ; res] — Boolean specification predicate plus a finite resource
// expression.
struct FactoredAssertion {
  BoolPtr spec;
  ExprPtr res;
};

// User annotation attached to a loop.
struct LoopSpec {
  ExprPtr iters;                           // k; must not be modified by the body
  std::string index_var;                   // the subvariant family index
  FactoredAssertion subvar;                // family, index_var free
  std::optional<FactoredAssertion> prefix; // constant prefix, optional
  ExprPtr exhaust;                         // m, B-diamond mode only (may be null)
  int loop_id = 0;                         // stable source-order id
};
using LoopSpecPtr = std::shared_ptr<const LoopSpec>;

struct Command {
  enum class Kind {
    Skip, Assign, ArrAssign, Assume, Tick, Seq, Choice, Loop, Local,
    // surface-only forms, removed by desugar():
    If, While
  };
  Kind kind;
  std::string var;        // Assign target / Local name / ArrAssign array
  ExprPtr e1, e2;         // Assign rhs; ArrAssign index,value; Tick amount
  BoolPtr cond;           // Assume / If / While
  CmdPtr c1, c2;          // children
  LoopSpecPtr loop_spec;  // While (surface) and Loop (core)
  bool demon = false;     // If: plain nondeterministic choice of the branches
};

struct Decl {
  std::string name;
  bool is_array = false;
};

struct AnnotationSet {
  std::optional<FactoredAssertion> pre, post;
};

struct Program {
  std::vector<Decl> decls;  // global scalars and arrays, source order
  CmdPtr body;
  AnnotationSet annot;

  bool declared(const std::string& n) const;
  bool declared_array(const std::string& n) const;
};

// ---- constructors ----------------------------------------------------------

ExprPtr e_lit(std::int64_t v);
ExprPtr e_var(std::string name);
ExprPtr e_read(ArrExpr a, ExprPtr idx);
ExprPtr e_add(ExprPtr a, ExprPtr b);
ExprPtr e_sub(ExprPtr a, ExprPtr b);
ExprPtr e_mul(ExprPtr a, ExprPtr b);
ExprPtr e_div(ExprPtr a, std::int64_t divisor);
ExprPtr e_neg(ExprPtr a);
ExprPtr e_ite(BoolPtr c, ExprPtr a, ExprPtr b);

BoolPtr b_true();
BoolPtr b_false();
BoolPtr b_cmp(CmpOp op, ExprPtr a, ExprPtr b);
BoolPtr b_and(BoolPtr a, BoolPtr b);
BoolPtr b_or(BoolPtr a, BoolPtr b);
BoolPtr b_not(BoolPtr a);
BoolPtr b_forall_range(std::string var, ExprPtr lo, ExprPtr hi, BoolPtr body);
BoolPtr b_quant(bool exists, std::string var, bool is_array, BinderRange tag,
                BoolPtr body);
BoolPtr b_arr_eq(ArrExpr a, ArrExpr b);

CmdPtr c_skip();
CmdPtr c_assign(std::string x, ExprPtr e);
CmdPtr c_arr_assign(std::string a, ExprPtr idx, ExprPtr val);
CmdPtr c_assume(BoolPtr b);
CmdPtr c_tick(ExprPtr e);
CmdPtr c_seq(CmdPtr a, CmdPtr b);
CmdPtr c_choice(CmdPtr a, CmdPtr b);
CmdPtr c_loop(CmdPtr body, LoopSpecPtr spec = nullptr);
CmdPtr c_local(std::string x, CmdPtr body);
CmdPtr c_if(BoolPtr b, CmdPtr t, CmdPtr e, bool demon = false);
CmdPtr c_while(BoolPtr b, CmdPtr body, LoopSpecPtr spec = nullptr);

// ---- syntactic analyses ----------------------------------------------------

void free_vars(const ExprPtr& e, std::set<std::string>& out);
void free_vars(const BoolPtr& b, std::set<std::string>& out);
void free_vars(const CmdPtr& c, std::set<std::string>& out);
std::set<std::string> free_vars(const ExprPtr& e);
std::set<std::string> free_vars(const BoolPtr& b);
std::set<std::string> free_vars(const CmdPtr& c);

// Over-approximating set of assigned scalar and array names; local binders
// excluded.
std::set<std::string> mod_set(const CmdPtr& c);

// ---- substitution ----------------------------------------------------------

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& by);
BoolPtr subst(const BoolPtr& b, const std::string& x, const ExprPtr& by);
ArrExpr subst(const ArrExpr& a, const std::string& x, const ExprPtr& by);

// Whole-array substitution a := arr inside expressions/predicates.
ExprPtr subst_array(const ExprPtr& e, const std::string& a, const ArrExpr& arr);
BoolPtr subst_array(const BoolPtr& b, const std::string& a, const ArrExpr& arr);
ArrExpr subst_array(const ArrExpr& e, const std::string& a, const ArrExpr& arr);

// Capture-avoiding renaming C[y/x]; requires y not free in C.
CmdPtr rename_var(const CmdPtr& c, const std::string& y, const std::string& x);

// ---- desugaring ------------------------------------------------------------

// if -> choice of assume-guarded branches; while -> loop + exit assume.
// Idempotent; the result contains only core constructors.
CmdPtr desugar(const CmdPtr& c);
bool is_core(const CmdPtr& c);

// ---- equality (structural; local binders up to alpha) -----------------------

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const BoolPtr& a, const BoolPtr& b);
bool equal(const ArrExpr& a, const ArrExpr& b);
bool equal_cmd(const CmdPtr& a, const CmdPtr& b);

// ---- printing --------------------------------------------------------------

std::string pretty(const ExprPtr& e);
std::string pretty(const BoolPtr& b);
std::string pretty(const ArrExpr& a);
std::string pretty(const FactoredAssertion& f);
std::string pretty_cmd(const CmdPtr& c, int indent = 0);
std::string pretty_program(const Program& p);

}  // namespace quav
