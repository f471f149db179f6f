#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "residua/analysis.hpp"
#include "residua/ast.hpp"
#include "residua/constraints.hpp"
#include "residua/symbols.hpp"

namespace residua {

/// Which known-valued identifiers get textually substituted. Propagation
/// is policy-independent; only residual texts change.
struct ReplacementPolicy {
  enum class Mode { ReplaceAll, ReplaceNone, KeepList };
  Mode mode = Mode::ReplaceAll;
  std::set<std::string> keep;  // KeepList
  /// PARAMETER names stay symbolic under KeepList (PI stays PI).
  bool parameters_kept = true;

  static ReplacementPolicy all();
  static ReplacementPolicy none();
  static ReplacementPolicy keep_list(std::set<std::string> keep);
};

/// Identity of a specialized variant: the Known part of the entry
/// context plus the call's alias shape. Two sites sharing a key can
/// safely share the variant.
struct SpecKey {
  // slot ("#0" formal position, "/B/(2)" COMMON cell) -> literal text
  std::vector<std::pair<std::string, std::string>> knowns;
  std::vector<std::vector<std::string>> alias_groups;

  bool empty() const { return knowns.empty() && alias_groups.empty(); }
  std::string str() const;
  friend bool operator==(const SpecKey& a, const SpecKey& b) {
    return a.knowns == b.knowns && a.alias_groups == b.alias_groups;
  }
};

enum class Disposition { Kept, Simplified, Removed };

struct StmtRecord {
  ProvId prov = kNoProv;
  Disposition disposition = Disposition::Kept;
  std::string old_text;
  std::string new_text;  // Simplified only
  std::string reason;    // Removed only
};

struct FactFired {
  std::string variant;
  ProvId prov = kNoProv;
  std::string fact;
};

struct VariantRecord {
  std::string name;
  std::string origin;
  SpecKey key;
  std::vector<std::pair<std::string, std::string>> entry_bindings;  // loc -> literal
  std::map<ProvId, StmtRecord> stmts;
  /// Known bindings the specializer relied on at each statement's entry;
  /// instrumented runs check them against concrete storage.
  std::map<ProvId, std::map<Location, Value>> claims;
  int cache_hits = 0;
};

/// Transformation ledger: per-variant statement dispositions, entry
/// bindings, fired disequality facts, folding notes, unreachable units.
struct Report {
  // creation order; deque so in-flight records stay addressable while
  // nested specializations append
  std::deque<VariantRecord> variants;
  std::vector<FactFired> facts_fired;
  std::vector<std::string> notes;
  std::vector<std::string> unreachable_units;

  const VariantRecord* find_variant(const std::string& name) const;
  /// ProvIds removed as dead branches, per variant (policy-independence
  /// checks compare these across policies).
  std::set<ProvId> removed_with_reason(const std::string& reason) const;
};

struct SpecializeConfig {
  ReplacementPolicy policy;
  int variant_cap = 64;
};

struct SpecializeResult {
  Program residual;
  Report report;
};

/// The partial evaluator: forward walk from the Main unit under the
/// constraint-derived environment, polyvariant specialization of every
/// reachable procedure (no unfolding, no renaming, no new statements),
/// residual dead-assignment cleanup, full provenance ledger.
SpecializeResult specialize_program(const Program& p, const SymbolTable& symtab,
                                    const ConstraintSet& cs,
                                    const SpecializeConfig& config = {});

/// Dead-assignment removal on a fully simplified variant (exposed for
/// tests). Backward liveness over the structured body; arms join, loop
/// bodies iterate to a fixpoint. Never removes PRINT/READ/CALL/STOP.
Body liveness_cleanup(const Body& body, const Unit& origin, const UnitSymbols& us,
                      const SymbolTable& symtab, const ModSummaries& mods,
                      const ReplacementPolicy& policy, const AliasPartition& aliases,
                      VariantRecord* record);

/// Structure-preservation violations of a residual against its original:
/// per-unit statement counts, cross-unit ProvIds, identifier growth,
/// ledger accounting. Empty means all invariants hold.
std::vector<std::string> check_structure(const Program& original,
                                         const Program& residual, const Report& report);

}  // namespace residua
