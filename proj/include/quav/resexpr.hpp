#pragma once

#include <memory>
#include <optional>
#include <string>

#include "quav/ast.hpp"
#include "quav/bounds.hpp"
#include "quav/ext_int.hpp"
#include "quav/state.hpp"

namespace quav {

enum class Mode { F, B, BDiamond };

const char* mode_name(Mode m);
std::optional<Mode> mode_from_flag(const std::string& s);  // "f"|"b"|"bd"

struct ResExpr;
using ResPtr = std::shared_ptr<const ResExpr>;

// Symbolic resource function State -> Z u {-oo,+oo}, closed under the
// pointwise operator algebra: min, max, guards [B], addition, subtraction of
// a finite expression, and sup/inf over a variable.
struct ResExpr {
  enum class Kind { Lit, Arith, Guard, Min, Max, Add, SubE, Sup, Inf };
  Kind kind;
  ExtInt lit;             // Lit
  ExprPtr e;              // Arith; SubE subtrahend
  BoolPtr g;              // Guard
  ResPtr a, b;            // children (SubE body in a)
  std::string var;        // Sup/Inf
  bool var_is_array = false;
  BinderRange tag = BinderRange::Wide;
};

ResPtr r_lit(ExtInt v);
ResPtr r_fin(std::int64_t v);
ResPtr r_arith(ExprPtr e);
ResPtr r_guard(BoolPtr b);
ResPtr r_min(ResPtr a, ResPtr b);
ResPtr r_max(ResPtr a, ResPtr b);
ResPtr r_add(ResPtr a, ResPtr b);
ResPtr r_sub(ResPtr a, ExprPtr e);
ResPtr r_sup(std::string x, ResPtr body, bool is_array = false,
             BinderRange tag = BinderRange::Wide);
ResPtr r_inf(std::string x, ResPtr body, bool is_array = false,
             BinderRange tag = BinderRange::Wide);

// Smart constructors used by the transformers: keep results in a min/max
// tree over guards and finite leaves whenever possible.
//  - add_expr/sub_expr push the shift down to the leaves;
//  - bind_sup/bind_inf eliminate the binder into a first-order quantified
//    guard when the bound variable occurs only under guards, and otherwise
//    keep an explicit Sup/Inf node (which marks the result non-certifying).
ResPtr add_expr(ResPtr r, const ExprPtr& e);
ResPtr sub_expr(ResPtr r, const ExprPtr& e);
ResPtr bind_sup(const std::string& x, ResPtr body, bool is_array, BinderRange tag);
ResPtr bind_inf(const std::string& x, ResPtr body, bool is_array, BinderRange tag);

std::set<std::string> free_vars_res(const ResPtr& r);
void free_vars(const ResPtr& r, std::set<std::string>& out);

// Names used as arrays anywhere inside the expression (array-sorted binders
// excluded).
void collect_arrays(const ResPtr& r, std::set<std::string>& out);

ResPtr res_subst(const ResPtr& r, const std::string& x, const ExprPtr& by);
ResPtr res_subst_array(const ResPtr& r, const std::string& a, const ArrExpr& arr);

bool res_equal(const ResPtr& a, const ResPtr& b);

// True iff the expression is directly encodable for the solver: a min/max
// tree over guards and finite arithmetic, with no surviving Sup/Inf.
bool encodable(const ResPtr& r);

std::string pretty_res(const ResPtr& r);

// ---- evaluation ------------------------------------------------------------

std::int64_t eval_expr(const State& s, const ExprPtr& e);
bool eval_bool(const State& s, const BoolPtr& b, const DomainBounds& bounds);
const DomainBounds& empty_bounds();  // all-singleton; for quantifier-free eval

// Value per the pointwise operator definitions; sup/inf and quantifiers range
// their variable over the window named by the binder tag (bounded oracle use).
ExtInt eval_res(const ResPtr& r, const State& s, const DomainBounds& bounds);

// ---- factored assertions ---------------------------------------------------

// Mode F: [!spec] v res ; modes B/Bd: [spec] ^ res.
ResPtr lift(const FactoredAssertion& f, Mode mode);

// ---- pointwise order -------------------------------------------------------

struct LeqResult {
  enum class Kind { True, False, Unknown } kind;
  std::optional<State> witness;  // set when False
  std::string note;
};

// Bounded check of P <= Q pointwise over the given domain.
LeqResult leq_bounded(const ResPtr& p, const ResPtr& q, const DomainBounds& bounds);

// ---- simplification --------------------------------------------------------

// Semantics-preserving rewrites: infinity absorption in min/max, constant
// folding, trivial guard collapse. eval_res agreement is the contract.
ResPtr simplify(const ResPtr& r);

}  // namespace quav
