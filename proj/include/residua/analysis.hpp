#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "residua/ast.hpp"
#include "residua/symbols.hpp"

namespace residua {

/// Two-level constant lattice over one location.
struct AbstractValue {
  bool known = false;
  Value value;

  static AbstractValue unknown() { return {}; }
  static AbstractValue of(Value v) { return {true, std::move(v)}; }
};

AbstractValue join(const AbstractValue& a, const AbstractValue& b);

struct FactLess {
  bool operator()(const std::pair<Location, Value>& a,
                  const std::pair<Location, Value>& b) const;
};

/// Abstract store: Known bindings per location (absent = Unknown) plus
/// disequality facts harvested from branch conditions.
struct AbstractEnv {
  std::map<Location, Value> knowns;
  std::set<std::pair<Location, Value>, FactLess> facts;

  AbstractValue get(const Location& l) const;
  /// Binds l to a Known value, dropping facts about l.
  void set_known(const Location& l, Value v);
  /// Forgets everything about l (bindings and facts). For COMMON spans
  /// and arrays, every covered cell is dropped.
  void kill(const Location& l);
  bool has_fact(const Location& l, const Value& v) const;
  void add_fact(const Location& l, Value v);
};

AbstractEnv join_env(const AbstractEnv& a, const AbstractEnv& b);

/// May-alias classes over a callee's formals and visible COMMON storage,
/// built per call context. Locations not unioned are singletons.
struct AliasPartition {
  /// When set, any write to a formal or COMMON location invalidates all
  /// of them (used for context-free "universal" variants).
  bool pessimistic = false;

  void unite(const Location& a, const Location& b);
  Location find(const Location& l) const;
  std::vector<Location> members(const Location& l) const;
  bool singleton(const Location& l) const;
  std::vector<std::vector<Location>> classes() const;

 private:
  mutable std::map<Location, Location> parent_;
};

/// Locations a unit (or its callees) may write, from the caller's view:
/// formal positions plus COMMON storage.
struct ModInfo {
  std::set<int> formals;
  std::set<Location> commons;
  bool empty() const { return formals.empty() && commons.empty(); }
};

using ModSummaries = std::map<std::string, ModInfo>;

/// Least fixpoint of may-write summaries over the call graph.
ModSummaries mod_summaries(const Program& p, const SymbolTable& symtab);

/// Optional sinks for diagnostic notes (e.g. folding hit a division by a
/// known zero) and for fact-consumption events.
struct EvalHooks {
  std::vector<std::string>* notes = nullptr;
  std::vector<std::string>* facts_fired = nullptr;
};

/// True when deleting the expression from the program cannot change
/// behavior: no calls, divisions only by nonzero literals, exponents
/// nonnegative literals, subscripts literals within bounds.
bool expr_removal_safe(const Expr& e, const UnitSymbols& us);

/// Abstract evaluation: Known iff every leaf needed is Known. PARAMETER
/// names are always Known; array elements and function calls never are.
/// .AND./.OR. are decided by one Known side when the other side is safe
/// to ignore. Division by a known zero yields Unknown plus a note.
AbstractValue eval_abstract(const Expr& e, const AbstractEnv& env,
                            const UnitSymbols& us, const SymbolTable& symtab,
                            const EvalHooks& hooks = {});

/// Result of binding a call site's actuals to a callee's formals.
struct CallBinding {
  AbstractEnv entry_env;
  AliasPartition aliases;
  /// Alias classes with >1 member, canonical slot names ("#0", "/B/(2)"),
  /// groups and members sorted. Part of the specialization key.
  std::vector<std::vector<std::string>> alias_groups;
};

/// By-reference binding of a call: formals join the alias classes of
/// their actuals' storage (including COMMON overlap visible in the
/// callee); Known values flow in; COMMON bindings carry through.
/// Branch facts do not cross the call boundary. caller_aliases extends
/// storage identity when actuals are the caller's own formals.
CallBinding bind_call(const std::vector<ExprPtr>& args, const UnitSymbols& caller,
                      const AbstractEnv& caller_env, const Unit& callee,
                      const UnitSymbols& callee_syms, const SymbolTable& symtab,
                      const AliasPartition& caller_aliases = {});

/// Caller-side effect of a call: every location the callee may write
/// (translated through the actual arguments) is forgotten, along with
/// its alias class in the caller's own context.
AbstractEnv apply_call_effect(const std::vector<ExprPtr>& args,
                              const UnitSymbols& caller, const AbstractEnv& caller_env,
                              const Unit& callee, const ModInfo& callee_mods,
                              const AliasPartition& caller_aliases);

/// Locations (caller view) written by a body, used to widen loop heads:
/// direct writes plus callee summaries translated through call sites.
std::set<Location> body_mod_locations(const Body& body, const UnitSymbols& us,
                                      const Program& p, const SymbolTable& symtab,
                                      const ModSummaries& mods);

/// Kills a location together with its alias class.
void kill_with_aliases(AbstractEnv& env, const Location& l, const AliasPartition& aliases,
                       const UnitSymbols& us);

}  // namespace residua
