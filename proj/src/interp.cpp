#include "residua/interp.hpp"

#include <cmath>
#include <cstdint>
#include <deque>

namespace residua {

InputKey InputKey::unit_var(std::string unit, std::string name) {
  InputKey k;
  k.kind = Kind::UnitVar;
  k.unit = std::move(unit);
  k.name = std::move(name);
  return k;
}

InputKey InputKey::common_cell(std::string block, int cell) {
  InputKey k;
  k.kind = Kind::CommonCell;
  k.block = std::move(block);
  k.cell = cell;
  return k;
}

std::string InputKey::str() const {
  if (kind == Kind::UnitVar) return unit + "." + name;
  return "/" + block + "/(" + std::to_string(cell) + ")";
}

const char* fault_kind_name(FaultKind k) {
  switch (k) {
    case FaultKind::None: return "none";
    case FaultKind::DivByZero: return "div-by-zero";
    case FaultKind::Uninitialized: return "uninitialized";
    case FaultKind::Timeout: return "timeout";
    case FaultKind::Bounds: return "bounds";
    case FaultKind::MissingInput: return "missing-input";
    case FaultKind::InvalidDoStep: return "invalid-do-step";
    case FaultKind::ResultUnset: return "result-unset";
    case FaultKind::IntOverflow: return "int-overflow";
  }
  return "?";
}

namespace {

struct FaultSignal {
  FaultKind kind;
  ProvId prov;
};

struct StopSignal {};

// Storage cells live in one stable arena for the whole run; frames hold
// index ranges into it, which makes by-reference binding a range copy.
struct CellRange {
  size_t first = 0;
  int count = 0;
};

enum class Flow { Next, Returned };

class Machine {
 public:
  Machine(const Program& p, const SymbolTable& symtab, const InputVector& inputs,
          long long fuel, const RunHooks& hooks)
      : p_(p), symtab_(symtab), inputs_(inputs), fuel_(fuel), hooks_(hooks) {}

  ConcreteState run() {
    for (const auto& [block, layout] : symtab_.common_layout)
      commons_[block] = alloc(static_cast<int>(layout.size()));
    for (const auto& [key, entry] : inputs_) {
      if (key.kind == InputKey::Kind::CommonCell && entry.pin_at_entry) {
        auto it = commons_.find(key.block);
        if (it != commons_.end() && key.cell >= 0 && key.cell < it->second.count)
          cells_[it->second.first + static_cast<size_t>(key.cell)] = entry.value;
      }
    }
    const Unit* main_unit = p_.find_unit(p_.entry);
    try {
      exec_unit(*main_unit, {});
    } catch (const FaultSignal& f) {
      state_.exit = ExitKind::Fault;
      state_.fault = f.kind;
      state_.fault_prov = f.prov;
    } catch (const StopSignal&) {
      state_.exit = ExitKind::Stopped;
    }
    for (const auto& [block, range] : commons_) {
      auto& out = state_.commons[block];
      for (int i = 0; i < range.count; ++i)
        out.push_back(cells_[range.first + static_cast<size_t>(i)]);
    }
    state_.steps = steps_;
    return std::move(state_);
  }

 private:
  struct Frame {
    const Unit* unit = nullptr;
    const UnitSymbols* syms = nullptr;
    std::map<std::string, CellRange> vars;
  };

  CellRange alloc(int count) {
    CellRange r{cells_.size(), count};
    for (int i = 0; i < count; ++i) cells_.emplace_back();
    return r;
  }

  const std::string& input_unit_name(const std::string& unit) const {
    auto it = hooks_.unit_alias.find(unit);
    return it == hooks_.unit_alias.end() ? unit : it->second;
  }

  [[noreturn]] void fault(FaultKind kind, ProvId prov) { throw FaultSignal{kind, prov}; }

  void spend(ProvId prov) {
    ++steps_;
    if (steps_ > fuel_) fault(FaultKind::Timeout, prov);
  }

  // Binds formals to caller storage (temps for value actuals), allocates
  // locals, maps COMMON members, applies pinned inputs for this unit.
  Frame make_frame(const Unit& u, const std::vector<CellRange>& arg_cells) {
    Frame f;
    f.unit = &u;
    f.syms = &symtab_.unit(u.name);
    for (size_t i = 0; i < u.formals.size(); ++i) f.vars[u.formals[i]] = arg_cells[i];
    for (const auto& [name, sym] : f.syms->by_name) {
      if (sym.kind == Symbol::Kind::Parameter) continue;
      if (f.vars.count(name)) continue;  // formals already bound
      if (sym.kind == Symbol::Kind::CommonMember) {
        CellRange whole = commons_.at(sym.common_block);
        f.vars[name] = {whole.first + static_cast<size_t>(sym.common_cell),
                        sym.is_array() ? sym.array_size : 1};
      } else {
        f.vars[name] = alloc(sym.is_array() ? sym.array_size : 1);
      }
    }
    for (const auto& [key, entry] : inputs_) {
      if (key.kind != InputKey::Kind::UnitVar || key.unit != input_unit_name(u.name))
        continue;
      if (!entry.pin_at_entry) continue;
      auto it = f.vars.find(key.name);
      if (it != f.vars.end() && it->second.count == 1)
        cells_[it->second.first] = entry.value;
    }
    return f;
  }

  void exec_unit(const Unit& u, const std::vector<CellRange>& arg_cells) {
    frames_.push_back(make_frame(u, arg_cells));
    exec_body(u.body);
    frames_.pop_back();
  }

  Frame& frame() { return frames_.back(); }

  size_t cell_index(const std::string& name, const ExprPtr& index, ProvId prov) {
    CellRange r = frame().vars.at(name);
    if (!index) return r.first;
    Value idx = eval(*index, prov);
    if (idx.i < 1 || idx.i > r.count) fault(FaultKind::Bounds, prov);
    return r.first + static_cast<size_t>(idx.i - 1);
  }

  Value load_cell(size_t cell, ProvId prov) {
    if (!cells_[cell].has_value()) fault(FaultKind::Uninitialized, prov);
    return *cells_[cell];
  }

  void store_cell(size_t cell, const Value& v, ProvId prov) {
    cells_[cell] = v;
    if (hooks_.on_write) report_write(cell);
    (void)prov;
  }

  // Attributes a write to every active frame that can see the storage,
  // under every view the frame has of it (formal binding, COMMON cell).
  // A sound MOD summary contains at least one of the views.
  void report_write(size_t cell) {
    for (const auto& f : frames_) {
      ModInfo w;
      for (size_t i = 0; i < f.unit->formals.size(); ++i) {
        CellRange r = f.vars.at(f.unit->formals[i]);
        if (cell >= r.first && cell < r.first + static_cast<size_t>(r.count))
          w.formals.insert(static_cast<int>(i));
      }
      for (const auto& [block, range] : commons_) {
        if (cell >= range.first &&
            cell < range.first + static_cast<size_t>(range.count)) {
          w.commons.insert(
              Location::common(block, static_cast<int>(cell - range.first)));
        }
      }
      if (!w.empty()) hooks_.on_write(f.unit->name, w);
    }
  }

  Value convert_for_store(const Value& v, Type target, ProvId prov) {
    auto conv = value_convert(v, target);
    if (!conv) fault(FaultKind::IntOverflow, prov);
    return *conv;
  }

  Value eval(const Expr& e, ProvId prov) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.lit;
      case Expr::Kind::Var: {
        const Symbol& sym = frame().syms->get(e.name);
        if (sym.kind == Symbol::Kind::Parameter) return sym.param_value;
        return load_cell(cell_index(e.name, nullptr, prov), prov);
      }
      case Expr::Kind::ArrayElem:
        return load_cell(cell_index(e.name, e.args[0], prov), prov);
      case Expr::Kind::Unary: {
        Value v = eval(*e.args[0], prov);
        if (e.un == UnaryOp::Not) return Value::logical(!v.b);
        if (v.type == Type::Integer) return Value::integer(-v.i);
        return Value::real(-v.r);
      }
      case Expr::Kind::Binary:
        return eval_binary(e, prov);
      case Expr::Kind::FuncCall:
        return call_function(e, prov);
    }
    fault(FaultKind::Uninitialized, prov);
  }

  Value eval_binary(const Expr& e, ProvId prov) {
    Value l = eval(*e.args[0], prov);
    Value r = eval(*e.args[1], prov);
    switch (e.bin) {
      case BinOp::And: return Value::logical(l.b && r.b);
      case BinOp::Or: return Value::logical(l.b || r.b);
      case BinOp::Eq:
      case BinOp::Ne:
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge:
        return compare(e.bin, l, r);
      default:
        return arith(e.bin, l, r, prov);
    }
  }

  static Value compare(BinOp op, const Value& l, const Value& r) {
    int c;
    if (l.type == Type::Character) {
      int raw = l.s.compare(r.s);
      c = raw < 0 ? -1 : raw > 0 ? 1 : 0;
    } else if (l.type == Type::Integer && r.type == Type::Integer) {
      c = l.i < r.i ? -1 : l.i > r.i ? 1 : 0;
    } else {
      double a = l.as_real(), b = r.as_real();
      c = a < b ? -1 : a > b ? 1 : 0;
      if (op == BinOp::Eq) return Value::logical(a == b);
      if (op == BinOp::Ne) return Value::logical(a != b);
    }
    switch (op) {
      case BinOp::Eq: return Value::logical(c == 0);
      case BinOp::Ne: return Value::logical(c != 0);
      case BinOp::Lt: return Value::logical(c < 0);
      case BinOp::Le: return Value::logical(c <= 0);
      case BinOp::Gt: return Value::logical(c > 0);
      default: return Value::logical(c >= 0);
    }
  }

  Value arith(BinOp op, const Value& l, const Value& r, ProvId prov) {
    if (l.type == Type::Integer && r.type == Type::Integer) {
      switch (op) {
        case BinOp::Add: return Value::integer(wrap_add(l.i, r.i));
        case BinOp::Sub: return Value::integer(wrap_sub(l.i, r.i));
        case BinOp::Mul: return Value::integer(wrap_mul(l.i, r.i));
        case BinOp::Div:
          if (r.i == 0) fault(FaultKind::DivByZero, prov);
          if (l.i == INT64_MIN && r.i == -1) return Value::integer(INT64_MIN);
          return Value::integer(l.i / r.i);
        case BinOp::Pow: {
          long long b = r.i;
          if (b < 0) {
            if (l.i == 0) fault(FaultKind::DivByZero, prov);
            if (l.i == 1) return Value::integer(1);
            if (l.i == -1) return Value::integer(b % 2 == 0 ? 1 : -1);
            return Value::integer(0);
          }
          long long acc = 1;
          for (long long k = 0; k < b; ++k) acc = wrap_mul(acc, l.i);
          return Value::integer(acc);
        }
        default: break;
      }
    }
    double a = l.as_real(), b = r.as_real();
    switch (op) {
      case BinOp::Add: return Value::real(a + b);
      case BinOp::Sub: return Value::real(a - b);
      case BinOp::Mul: return Value::real(a * b);
      case BinOp::Div:
        if (b == 0.0) fault(FaultKind::DivByZero, prov);
        return Value::real(a / b);
      case BinOp::Pow: {
        if (r.type == Type::Integer) {
          long long e2 = r.i;
          bool inv = e2 < 0;
          if (inv && a == 0.0) fault(FaultKind::DivByZero, prov);
          double acc = 1.0;
          for (long long k = 0; k < (inv ? -e2 : e2); ++k) acc *= a;
          return Value::real(inv ? 1.0 / acc : acc);
        }
        return Value::real(std::pow(a, b));
      }
      default: break;
    }
    fault(FaultKind::Uninitialized, prov);
  }

  std::vector<CellRange> bind_args(const Unit& callee, const std::vector<ExprPtr>& args,
                                   ProvId prov) {
    const UnitSymbols& cs = symtab_.unit(callee.name);
    std::vector<CellRange> bound;
    for (size_t i = 0; i < args.size(); ++i) {
      const Symbol& formal = cs.get(callee.formals[i]);
      const Expr& a = *args[i];
      if (a.kind == Expr::Kind::Var) {
        const Symbol& asym = frame().syms->get(a.name);
        if (asym.kind != Symbol::Kind::Parameter) {
          bound.push_back(frame().vars.at(a.name));
          continue;
        }
      } else if (a.kind == Expr::Kind::ArrayElem) {
        bound.push_back({cell_index(a.name, a.args[0], prov), 1});
        continue;
      }
      // value actual: fresh temp, converted to the formal's type
      Value v = convert_for_store(eval(a, prov), formal.type, prov);
      CellRange temp = alloc(1);
      cells_[temp.first] = v;
      bound.push_back(temp);
    }
    return bound;
  }

  void call_subroutine(const Stmt& s) {
    const Unit* callee = p_.find_unit(s.callee);
    exec_unit(*callee, bind_args(*callee, s.args, s.prov));
  }

  Value call_function(const Expr& e, ProvId prov) {
    const Unit* callee = p_.find_unit(e.name);
    std::vector<CellRange> args = bind_args(*callee, e.args, prov);
    frames_.push_back(make_frame(*callee, args));
    exec_body(callee->body);
    CellRange result = frames_.back().vars.at(callee->name);
    std::optional<Value> v = cells_[result.first];
    frames_.pop_back();
    if (!v.has_value()) fault(FaultKind::ResultUnset, prov);
    return *v;
  }

  void observe(const Stmt& s) {
    if (!hooks_.on_stmt) return;
    Frame& f = frame();
    LocationReader reader = [this, &f](const Location& l) -> std::optional<Value> {
      if (l.kind == Location::Kind::Common) {
        auto it = commons_.find(l.block);
        if (it == commons_.end() || l.cell < 0 || l.cell >= it->second.count)
          return std::nullopt;
        return cells_[it->second.first + static_cast<size_t>(l.cell)];
      }
      auto it = f.vars.find(l.name);
      if (it == f.vars.end() || it->second.count != 1) return std::nullopt;
      return cells_[it->second.first];
    };
    hooks_.on_stmt(f.unit->name, s, reader);
  }

  Flow exec_body(const Body& body) {
    for (const auto& s : body) {
      Flow fl = exec_stmt(*s);
      if (fl == Flow::Returned) return fl;
    }
    return Flow::Next;
  }

  Flow exec_stmt(const Stmt& s) {
    spend(s.prov);
    observe(s);
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        Value v = eval(*s.value, s.prov);
        const Symbol& sym = frame().syms->get(s.target.name);
        size_t cell = cell_index(s.target.name, s.target.index, s.prov);
        store_cell(cell, convert_for_store(v, sym.type, s.prov), s.prov);
        return Flow::Next;
      }
      case Stmt::Kind::If: {
        Value c = eval(*s.cond, s.prov);
        return exec_body(c.b ? s.then_body : s.else_body);
      }
      case Stmt::Kind::DoLoop: {
        long long lo = eval(*s.lo, s.prov).i;
        long long hi = eval(*s.hi, s.prov).i;
        long long step = s.step ? eval(*s.step, s.prov).i : 1;
        if (step == 0) fault(FaultKind::InvalidDoStep, s.prov);
        // F77: the trip count is fixed before the first iteration and
        // the index ends at its first untaken value
        long long trips = (hi - lo + step) / step;
        if (trips < 0) trips = 0;
        size_t icell = cell_index(s.index, nullptr, s.prov);
        for (long long k = 0; k < trips; ++k) {
          store_cell(icell, Value::integer(lo + k * step), s.prov);
          spend(s.prov);
          Flow fl = exec_body(s.body);
          if (fl == Flow::Returned) return fl;
        }
        store_cell(icell, Value::integer(lo + trips * step), s.prov);
        return Flow::Next;
      }
      case Stmt::Kind::DoWhile: {
        while (true) {
          spend(s.prov);
          Value c = eval(*s.cond, s.prov);
          if (!c.b) break;
          Flow fl = exec_body(s.body);
          if (fl == Flow::Returned) return fl;
        }
        return Flow::Next;
      }
      case Stmt::Kind::Call:
        call_subroutine(s);
        return Flow::Next;
      case Stmt::Kind::Return:
        return Flow::Returned;
      case Stmt::Kind::Stop:
        throw StopSignal{};
      case Stmt::Kind::Continue:
        return Flow::Next;
      case Stmt::Kind::Print: {
        std::string line;
        for (size_t i = 0; i < s.args.size(); ++i) {
          if (i) line += " ";
          line += eval(*s.args[i], s.prov).printed();
        }
        state_.trace.push_back(std::move(line));
        return Flow::Next;
      }
      case Stmt::Kind::Read: {
        for (const auto& t : s.targets) {
          const Symbol& sym = frame().syms->get(t.name);
          InputKey key = sym.kind == Symbol::Kind::CommonMember
                             ? InputKey::common_cell(sym.common_block, sym.common_cell)
                             : InputKey::unit_var(input_unit_name(frame().unit->name),
                                                  t.name);
          auto it = inputs_.find(key);
          if (it == inputs_.end()) fault(FaultKind::MissingInput, s.prov);
          size_t cell = cell_index(t.name, t.index, s.prov);
          store_cell(cell, convert_for_store(it->second.value, sym.type, s.prov), s.prov);
        }
        return Flow::Next;
      }
    }
    return Flow::Next;
  }

  const Program& p_;
  const SymbolTable& symtab_;
  const InputVector& inputs_;
  long long fuel_;
  const RunHooks& hooks_;

  std::deque<std::optional<Value>> cells_;
  std::map<std::string, CellRange> commons_;
  std::vector<Frame> frames_;
  ConcreteState state_;
  long long steps_ = 0;
};

}  // namespace

ConcreteState run(const Program& p, const SymbolTable& symtab, const InputVector& inputs,
                  long long fuel, const RunHooks& hooks) {
  return Machine(p, symtab, inputs, fuel, hooks).run();
}

}  // namespace residua
