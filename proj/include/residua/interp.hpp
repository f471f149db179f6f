#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "residua/analysis.hpp"
#include "residua/ast.hpp"
#include "residua/symbols.hpp"

namespace residua {

/// Addresses an input: a unit-scoped variable or a COMMON cell.
struct InputKey {
  enum class Kind { UnitVar, CommonCell };
  Kind kind = Kind::UnitVar;
  std::string unit, name;  // UnitVar
  std::string block;       // CommonCell
  int cell = -1;

  static InputKey unit_var(std::string unit, std::string name);
  static InputKey common_cell(std::string block, int cell);

  std::string str() const;
  friend bool operator<(const InputKey& a, const InputKey& b) {
    return std::tie(a.kind, a.unit, a.name, a.block, a.cell) <
           std::tie(b.kind, b.unit, b.name, b.block, b.cell);
  }
  friend bool operator==(const InputKey& a, const InputKey& b) {
    return !(a < b) && !(b < a);
  }
};

struct InputEntry {
  Value value;
  /// Pinned entries (constraints) are written into storage at program /
  /// frame entry; plain entries are only consumed by READ.
  bool pin_at_entry = false;

  friend bool operator==(const InputEntry& a, const InputEntry& b) {
    return a.value == b.value && a.pin_at_entry == b.pin_at_entry;
  }
};

using InputVector = std::map<InputKey, InputEntry>;

enum class ExitKind { Normal, Stopped, Fault };

enum class FaultKind {
  None,
  DivByZero,
  Uninitialized,
  Timeout,
  Bounds,
  MissingInput,
  InvalidDoStep,
  ResultUnset,
  IntOverflow,
};

const char* fault_kind_name(FaultKind k);

/// Observable outcome of a run: the PRINT trace, the final COMMON
/// storage, and how the program ended. Faults are reified, not thrown.
struct ConcreteState {
  std::vector<std::string> trace;
  std::map<std::string, std::vector<std::optional<Value>>> commons;
  ExitKind exit = ExitKind::Normal;
  FaultKind fault = FaultKind::None;
  ProvId fault_prov = kNoProv;
  long long steps = 0;
};

/// Reads one storage location from the running frame; nullopt when
/// uninitialized. Locations use the executing unit's own names.
using LocationReader = std::function<std::optional<Value>(const Location&)>;

struct RunHooks {
  /// Called before each statement executes with the executing unit's
  /// name, the statement, and a reader over current storage.
  std::function<void(const std::string& unit, const Stmt& stmt,
                     const LocationReader& read)>
      on_stmt;
  /// Called after any store; reports the write as seen by every active
  /// frame, under every view it has of the storage (formal positions,
  /// COMMON cells). A sound MOD summary covers at least one view.
  std::function<void(const std::string& unit, const ModInfo& write)> on_write;
  /// Unit-name translation applied when matching InputKeys: specialized
  /// variants consume the inputs of the unit they originate from.
  std::map<std::string, std::string> unit_alias;
};

constexpr long long kDefaultFuel = 1'000'000;

/// Big-step execution with Fortran-77 semantics: by-reference calls,
/// zero-trip DO with the index left at its first untaken value,
/// truncating integer division. Deterministic in (p, inputs, fuel).
ConcreteState run(const Program& p, const SymbolTable& symtab, const InputVector& inputs,
                  long long fuel = kDefaultFuel, const RunHooks& hooks = {});

}  // namespace residua
