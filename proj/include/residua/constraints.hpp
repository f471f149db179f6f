#pragma once

#include <string>
#include <vector>

#include "residua/analysis.hpp"
#include "residua/ast.hpp"
#include "residua/symbols.hpp"

namespace residua {

struct Constraint {
  enum class Scope { Global, Unit };
  Scope scope = Scope::Global;
  std::string unit;  // Scope::Unit only
  std::string name;
  Value value;
  SourcePos pos;

  std::string scope_str() const;
};

struct ConstraintSet {
  std::vector<Constraint> entries;
  bool empty() const { return entries.empty(); }
};

/// Parses the line-oriented constraint language:
///   GLOBAL:            scope head
///   UNIT NAME:         scope head
///   NAME = literal     binding under the most recent head
///   # comment
/// Identifiers are uppercased; identical duplicates collapse; the same
/// (scope, name) with a different value is ConflictingConstraint.
ConstraintSet parse_constraints(const std::string& text, const std::string& filename);

/// A constraint bound to storage: where it applies and with what value
/// (converted to the declared type).
struct ResolvedConstraint {
  Constraint source;
  Location loc;           // Common cell or Local
  std::string unit;       // owning unit for locals ("" for common cells)
  Value value;            // converted to the variable's declared type
};

/// Resolves every entry against the program: Global entries bind COMMON
/// scalar members (consistently across units) or, failing that, Main
/// locals; Unit entries bind locals/formals of the named unit. Detects
/// conflicting bindings of the same storage.
std::vector<ResolvedConstraint> resolve_constraints(const ConstraintSet& cs,
                                                    const Program& p,
                                                    const SymbolTable& symtab);

/// Entry environment for specializing `unit`: every resolved constraint
/// visible there is Known, everything else Unknown.
AbstractEnv initial_env(const ConstraintSet& cs, const Unit& unit,
                        const Program& p, const SymbolTable& symtab);

}  // namespace residua
