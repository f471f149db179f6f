#include "residua/difftest.hpp"

#include <algorithm>

namespace residua {

namespace {

// splitmix64: tiny, seedable, identical everywhere
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

Value random_value(Type t, Rng& rng) {
  switch (t) {
    case Type::Integer:
      return Value::integer(static_cast<long long>(rng.next() % 201) - 100);
    case Type::Real: {
      long long num = static_cast<long long>(rng.next() % 201) - 100;
      const double dens[4] = {1.0, 2.0, 4.0, 8.0};
      return Value::real(static_cast<double>(num) / dens[rng.next() % 4]);
    }
    case Type::Logical:
      return Value::logical((rng.next() & 1) != 0);
    case Type::Character: {
      static const char* words[4] = {"A", "B", "AB", "ZZ"};
      return Value::character(words[rng.next() % 4]);
    }
  }
  return Value::integer(0);
}

Value zero_value(Type t) {
  switch (t) {
    case Type::Integer: return Value::integer(0);
    case Type::Real: return Value::real(0.0);
    case Type::Logical: return Value::logical(false);
    case Type::Character: return Value::character("");
  }
  return Value::integer(0);
}

}  // namespace

InputPlan plan_inputs(const Program& p, const SymbolTable& symtab,
                      const ConstraintSet& cs) {
  std::map<InputKey, InputPlan::Slot> slots;
  for (const auto& rc : resolve_constraints(cs, p, symtab)) {
    InputPlan::Slot s;
    if (rc.loc.kind == Location::Kind::Common) {
      s.key = InputKey::common_cell(rc.loc.block, rc.loc.cell);
    } else {
      s.key = InputKey::unit_var(rc.unit, rc.loc.name);
    }
    s.type = rc.value.type;
    s.pinned = rc.value;
    slots[s.key] = s;
  }
  for (const auto& u : p.units) {
    const UnitSymbols& us = symtab.unit(u.name);
    for_each_stmt(u.body, [&](const Stmt& st) {
      if (st.kind != Stmt::Kind::Read) return;
      for (const auto& t : st.targets) {
        const Symbol& sym = us.get(t.name);
        InputKey key = sym.kind == Symbol::Kind::CommonMember
                           ? InputKey::common_cell(sym.common_block, sym.common_cell)
                           : InputKey::unit_var(u.name, t.name);
        if (slots.count(key)) continue;  // constrained: stays pinned
        InputPlan::Slot s;
        s.key = key;
        s.type = sym.type;
        slots[key] = s;
      }
    });
  }
  InputPlan plan;
  for (auto& [key, slot] : slots) plan.slots.push_back(std::move(slot));
  return plan;
}

InputVector gen_inputs(const InputPlan& plan, std::uint64_t seed, int trial) {
  Rng rng(seed * 0x51ED27F0ull + static_cast<std::uint64_t>(trial) * 0x9E3779B9ull + 1);
  InputVector in;
  for (const auto& slot : plan.slots) {
    InputEntry e;
    if (slot.pinned) {
      e.value = *slot.pinned;
      e.pin_at_entry = true;
    } else {
      e.value = random_value(slot.type, rng);
    }
    in[slot.key] = std::move(e);
  }
  return in;
}

std::optional<std::string> observables_mismatch(const ConcreteState& a,
                                                const ConcreteState& b) {
  // both runs exhausted their step budget: they diverge together, and
  // where exactly the fuel ran out is not an observable
  if (a.exit == ExitKind::Fault && a.fault == FaultKind::Timeout &&
      b.exit == ExitKind::Fault && b.fault == FaultKind::Timeout)
    return std::nullopt;
  if (a.exit != b.exit || (a.exit == ExitKind::Fault && a.fault != b.fault)) {
    auto desc = [](const ConcreteState& s) {
      switch (s.exit) {
        case ExitKind::Normal: return std::string("normal");
        case ExitKind::Stopped: return std::string("stopped");
        case ExitKind::Fault:
          return std::string("fault(") + fault_kind_name(s.fault) + ")";
      }
      return std::string("?");
    };
    return "exit kind differs: " + desc(a) + " vs " + desc(b);
  }
  if (a.trace.size() != b.trace.size())
    return "trace length differs: " + std::to_string(a.trace.size()) + " vs " +
           std::to_string(b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i] != b.trace[i])
      return "trace line " + std::to_string(i + 1) + " differs: \"" + a.trace[i] +
             "\" vs \"" + b.trace[i] + "\"";
  }
  if (a.commons.size() != b.commons.size()) return "COMMON block sets differ";
  for (const auto& [block, cells] : a.commons) {
    auto it = b.commons.find(block);
    if (it == b.commons.end()) return "COMMON /" + block + "/ missing";
    if (cells.size() != it->second.size()) return "COMMON /" + block + "/ length differs";
    for (size_t i = 0; i < cells.size(); ++i) {
      const auto& x = cells[i];
      const auto& y = it->second[i];
      if (x.has_value() != y.has_value())
        return "COMMON /" + block + "/(" + std::to_string(i) + ") initialization differs";
      if (x && !x->bits_equal(*y))
        return "COMMON /" + block + "/(" + std::to_string(i) + ") = " + x->printed() +
               " vs " + y->printed();
    }
  }
  return std::nullopt;
}

Verdict diff_test(const Program& original, const SymbolTable& orig_symtab,
                  const Program& residual, const SymbolTable& resid_symtab,
                  const Report& report, const ConstraintSet& cs,
                  const DiffConfig& config) {
  InputPlan plan = plan_inputs(original, orig_symtab, cs);
  RunHooks resid_hooks;
  for (const auto& v : report.variants) {
    if (v.name != v.origin) resid_hooks.unit_alias[v.name] = v.origin;
  }

  auto disagreement =
      [&](const InputVector& in) -> std::optional<std::string> {
    ConcreteState a = run(original, orig_symtab, in, config.fuel);
    ConcreteState b = run(residual, resid_symtab, in, config.fuel, resid_hooks);
    return observables_mismatch(a, b);
  };

  Verdict verdict;
  for (int trial = 0; trial < config.trials; ++trial) {
    ++verdict.trials;
    InputVector in = gen_inputs(plan, config.seed, trial);
    auto mismatch = disagreement(in);
    if (!mismatch) continue;

    // greedy shrink: zero unpinned entries while the failure persists
    InputVector shrunk = in;
    for (const auto& slot : plan.slots) {
      if (slot.pinned) continue;
      InputVector candidate = shrunk;
      candidate[slot.key].value = zero_value(slot.type);
      if (disagreement(candidate)) shrunk = std::move(candidate);
    }
    verdict.passed = false;
    verdict.mismatch = *disagreement(shrunk);
    verdict.counterexample = std::move(shrunk);
    return verdict;
  }
  return verdict;
}

}  // namespace residua
