#pragma once

#include <string>
#include <utility>
#include <vector>

#include "residua/ast.hpp"

namespace residua {

/// Canonical expression text with minimal parentheses; reparses to an
/// equal expression.
std::string expr_text(const Expr& e);

/// Single-line header text of a statement (the IF/DO line for blocks),
/// used by the report ledger.
std::string stmt_header_text(const Stmt& s);

/// Canonical source text of one unit: header, declarations, body with
/// two-space nesting indent, comments on their own lines above their
/// statement, END last.
std::string unit_text(const Unit& u);

/// One (path, text) pair per unit. Paths come from p.files when present,
/// otherwise "<NAME>.f".
std::vector<std::pair<std::string, std::string>> pretty_print(const Program& p);

}  // namespace residua
