#pragma once

#include <string>
#include <utility>
#include <vector>

#include "residua/ast.hpp"

namespace residua {

/// Parses one source file into its single program unit. ProvIds are
/// left unassigned; parse_program numbers the whole program.
Unit parse_unit(const std::string& path, const std::string& text);

/// Parses a multi-file program: one unit per file, unique unit names,
/// exactly one PROGRAM unit. ProvIds are assigned in source order
/// (files in the given order, statements in pre-order).
Program parse_program(const std::vector<std::pair<std::string, std::string>>& files);

/// Renumbers ProvIds in deterministic pre-order. Exposed for tests.
void assign_prov_ids(Program& p);

}  // namespace residua
