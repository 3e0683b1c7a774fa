#pragma once

#include <set>
#include <string>

#include "quav/ast.hpp"
#include "quav/resexpr.hpp"

namespace quav {

// Parses an annotated program: optional global declarations (`int x;`,
// `int a[];` before the first statement), `//@ pre/post/loop` pragmas, and
// C-style statements. `int x;` inside a nested block declares a local over
// the remainder of that block.
Program parse_program(const std::string& source);

// Standalone fragment parsers. When `declared` is null, identifier checking
// is off (used by the derivation reader and tests).
ExprPtr parse_expr_string(const std::string& text,
                          const std::set<std::string>* declared = nullptr,
                          bool annotation = true);
BoolPtr parse_bool_string(const std::string& text,
                          const std::set<std::string>* declared = nullptr,
                          bool annotation = true);

// `[ spec ; res ]` with `top` for the trivially-true predicate.
FactoredAssertion parse_factored_string(
    const std::string& text, const std::set<std::string>* declared = nullptr);

// Resource-expression syntax: min(R,R), max(R,R), [B], oo, -oo,
// sup x. R, inf x. R, R + R, and arithmetic expressions as leaves.
ResPtr parse_res_string(const std::string& text,
                        const std::set<std::string>* declared = nullptr);

// A single statement or brace-enclosed block in the surface syntax,
// with identifier checking off; used by the derivation reader.
CmdPtr parse_command_string(const std::string& text);

// Declared names of a program (scalars and arrays), for fragment parsing.
std::set<std::string> declared_names(const Program& p);

}  // namespace quav
