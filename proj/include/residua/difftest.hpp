#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "residua/ast.hpp"
#include "residua/constraints.hpp"
#include "residua/interp.hpp"
#include "residua/specialize.hpp"

namespace residua {

struct Verdict {
  bool passed = true;
  int trials = 0;
  std::string mismatch;  // description of the first disagreement
  std::optional<InputVector> counterexample;
};

struct DiffConfig {
  int trials = 200;
  std::uint64_t seed = 1;
  long long fuel = kDefaultFuel;
};

/// Designated inputs of a program: every READ target plus every
/// constrained name, with pinned values for the constrained ones.
struct InputPlan {
  struct Slot {
    InputKey key;
    Type type = Type::Integer;
    std::optional<Value> pinned;  // constraint value
  };
  std::vector<Slot> slots;  // sorted by key
};

InputPlan plan_inputs(const Program& p, const SymbolTable& symtab,
                      const ConstraintSet& cs);

/// Deterministic input generation: integers in [-100, 100], reals as
/// exactly representable small rationals, logicals uniform.
InputVector gen_inputs(const InputPlan& plan, std::uint64_t seed, int trial);

/// Compares observables (PRINT trace, final COMMON state, exit kind) of
/// original vs. residual over random constraint-consistent inputs. On a
/// mismatch, greedily shrinks the failing vector by zeroing unpinned
/// entries. The report supplies variant->origin name translation.
Verdict diff_test(const Program& original, const SymbolTable& orig_symtab,
                  const Program& residual, const SymbolTable& resid_symtab,
                  const Report& report, const ConstraintSet& cs,
                  const DiffConfig& config = {});

/// Nullopt when observables agree, otherwise a description.
std::optional<std::string> observables_mismatch(const ConcreteState& a,
                                                const ConcreteState& b);

}  // namespace residua
