#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "residua/ast.hpp"

namespace residua {

/// A storage location. COMMON cells are storage-equal across units by
/// (block, cell) alone; locals by (unit, name). Arrays are tracked as a
/// single whole-array location.
struct Location {
  enum class Kind { Local, Common };
  Kind kind = Kind::Local;
  std::string unit;   // Local
  std::string name;   // Local
  std::string block;  // Common
  int cell = -1;      // Common: first cell of the symbol
  int span = 1;       // Common: number of cells covered
  bool whole_array = false;

  static Location local(std::string unit, std::string name, bool array = false);
  static Location common(std::string block, int cell, int span = 1, bool array = false);

  std::string str() const;

  friend bool operator==(const Location& a, const Location& b) {
    return a.kind == b.kind && a.unit == b.unit && a.name == b.name &&
           a.block == b.block && a.cell == b.cell && a.whole_array == b.whole_array;
  }
  friend bool operator<(const Location& a, const Location& b) {
    return std::tie(a.kind, a.unit, a.name, a.block, a.cell, a.whole_array) <
           std::tie(b.kind, b.unit, b.name, b.block, b.cell, b.whole_array);
  }
};

struct Symbol {
  enum class Kind { Local, Formal, Parameter, CommonMember };
  Kind kind = Kind::Local;
  Type type = Type::Integer;
  int array_size = 0;  // 0 = scalar
  int formal_index = -1;
  std::string common_block;
  int common_cell = -1;
  Value param_value;  // Parameter

  bool is_array() const { return array_size > 0; }
};

struct UnitSymbols {
  std::string unit_name;
  UnitKind unit_kind = UnitKind::Main;
  Type result_type = Type::Integer;
  std::map<std::string, Symbol> by_name;

  const Symbol* find(const std::string& name) const;
  const Symbol& get(const std::string& name) const;
  /// Storage location of a (non-parameter) symbol in this unit.
  Location location_of(const std::string& name) const;
};

struct SymbolTable {
  std::map<std::string, UnitSymbols> units;
  // Block name -> per-cell element type. Consistency across declaring
  // units is enforced during resolution.
  std::map<std::string, std::vector<Type>> common_layout;

  const UnitSymbols& unit(const std::string& name) const;
};

/// Builds per-unit symbol tables, computes COMMON layouts, binds
/// PARAMETER constants, and type-checks every statement and expression.
SymbolTable resolve_symbols(const Program& p);

/// Type of an expression under a unit's symbols (promotion included).
/// Expressions must already have passed resolution.
Type expr_type(const Expr& e, const UnitSymbols& us, const SymbolTable& symtab);

}  // namespace residua
