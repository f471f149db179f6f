#include "residua/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace residua {

AbstractValue join(const AbstractValue& a, const AbstractValue& b) {
  if (a.known && b.known && a.value.bits_equal(b.value)) return a;
  return AbstractValue::unknown();
}

bool FactLess::operator()(const std::pair<Location, Value>& a,
                          const std::pair<Location, Value>& b) const {
  if (a.first == b.first) return value_less(a.second, b.second);
  return a.first < b.first;
}

AbstractValue AbstractEnv::get(const Location& l) const {
  auto it = knowns.find(l);
  if (it == knowns.end()) return AbstractValue::unknown();
  return AbstractValue::of(it->second);
}

void AbstractEnv::set_known(const Location& l, Value v) {
  kill(l);
  knowns[l] = std::move(v);
}

void AbstractEnv::kill(const Location& l) {
  if (l.kind == Location::Kind::Common) {
    // forget every scalar cell the span covers, plus the span entry itself
    for (auto it = knowns.begin(); it != knowns.end();) {
      const Location& k = it->first;
      bool overlap = k.kind == Location::Kind::Common && k.block == l.block &&
                     k.cell < l.cell + l.span && l.cell < k.cell + k.span;
      it = overlap ? knowns.erase(it) : std::next(it);
    }
    for (auto it = facts.begin(); it != facts.end();) {
      const Location& k = it->first;
      bool overlap = k.kind == Location::Kind::Common && k.block == l.block &&
                     k.cell < l.cell + l.span && l.cell < k.cell + k.span;
      it = overlap ? facts.erase(it) : std::next(it);
    }
    return;
  }
  knowns.erase(l);
  for (auto it = facts.begin(); it != facts.end();) {
    it = it->first == l ? facts.erase(it) : std::next(it);
  }
}

bool AbstractEnv::has_fact(const Location& l, const Value& v) const {
  return facts.count({l, v}) > 0;
}

void AbstractEnv::add_fact(const Location& l, Value v) {
  auto it = knowns.find(l);
  if (it != knowns.end() && it->second.bits_equal(v)) {
    // would contradict a Known binding; caller logic never does this
    return;
  }
  facts.insert({l, std::move(v)});
}

AbstractEnv join_env(const AbstractEnv& a, const AbstractEnv& b) {
  AbstractEnv out;
  for (const auto& [loc, val] : a.knowns) {
    auto it = b.knowns.find(loc);
    if (it != b.knowns.end() && it->second.bits_equal(val)) out.knowns[loc] = val;
  }
  for (const auto& f : a.facts) {
    if (b.facts.count(f)) out.facts.insert(f);
  }
  return out;
}

// ---- alias partition ----

void AliasPartition::unite(const Location& a, const Location& b) {
  Location ra = find(a), rb = find(b);
  if (ra == rb) return;
  parent_[rb] = ra;
}

Location AliasPartition::find(const Location& l) const {
  auto it = parent_.find(l);
  if (it == parent_.end()) return l;
  Location root = find(it->second);
  parent_[l] = root;
  return root;
}

std::vector<Location> AliasPartition::members(const Location& l) const {
  Location root = find(l);
  std::vector<Location> out{root};
  for (const auto& [child, _] : parent_) {
    if (!(child == root) && find(child) == root) out.push_back(child);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool AliasPartition::singleton(const Location& l) const {
  return members(l).size() == 1;
}

std::vector<std::vector<Location>> AliasPartition::classes() const {
  std::set<Location> roots;
  for (const auto& [child, _] : parent_) roots.insert(find(child));
  std::vector<std::vector<Location>> out;
  for (const auto& r : roots) out.push_back(members(r));
  return out;
}

// ---- abstract evaluation ----

bool expr_removal_safe(const Expr& e, const UnitSymbols& us) {
  switch (e.kind) {
    case Expr::Kind::Literal:
    case Expr::Kind::Var:
      return true;
    case Expr::Kind::ArrayElem: {
      const Expr& idx = *e.args[0];
      if (idx.kind != Expr::Kind::Literal || idx.lit.type != Type::Integer) return false;
      const Symbol* s = us.find(e.name);
      return s && idx.lit.i >= 1 && idx.lit.i <= s->array_size;
    }
    case Expr::Kind::Unary:
      return expr_removal_safe(*e.args[0], us);
    case Expr::Kind::Binary: {
      if (!expr_removal_safe(*e.args[0], us) || !expr_removal_safe(*e.args[1], us))
        return false;
      if (e.bin == BinOp::Div) {
        const Expr& d = *e.args[1];
        if (d.kind != Expr::Kind::Literal) return false;
        if (d.lit.type == Type::Integer && d.lit.i == 0) return false;
        if (d.lit.type == Type::Real && d.lit.r == 0.0) return false;
      }
      if (e.bin == BinOp::Pow) {
        const Expr& x = *e.args[1];
        if (x.kind != Expr::Kind::Literal) return false;
        if (x.lit.type == Type::Integer && x.lit.i < 0) return false;
      }
      return true;
    }
    case Expr::Kind::FuncCall:
      return false;
  }
  return false;
}

namespace {

void note(const EvalHooks& hooks, const std::string& msg) {
  if (hooks.notes) hooks.notes->push_back(msg);
}

// Arithmetic shared only in spirit with the interpreter: both follow the
// same language rules but are written independently so the agreement
// property test means something.
AbstractValue abstract_arith(BinOp op, const Value& l, const Value& r,
                             const EvalHooks& hooks) {
  if (l.type == Type::Integer && r.type == Type::Integer) {
    long long a = l.i, b = r.i;
    switch (op) {
      case BinOp::Add: return AbstractValue::of(Value::integer(wrap_add(a, b)));
      case BinOp::Sub: return AbstractValue::of(Value::integer(wrap_sub(a, b)));
      case BinOp::Mul: return AbstractValue::of(Value::integer(wrap_mul(a, b)));
      case BinOp::Div:
        if (b == 0) {
          note(hooks, "division by known zero left in place");
          return AbstractValue::unknown();
        }
        return AbstractValue::of(Value::integer(a / b));
      case BinOp::Pow: {
        if (b < 0) {
          if (a == 0) {
            note(hooks, "0 ** negative exponent left in place");
            return AbstractValue::unknown();
          }
          if (a == 1) return AbstractValue::of(Value::integer(1));
          if (a == -1) return AbstractValue::of(Value::integer(b % 2 == 0 ? 1 : -1));
          return AbstractValue::of(Value::integer(0));
        }
        long long acc = 1;
        for (long long k = 0; k < b; ++k) acc = wrap_mul(acc, a);
        return AbstractValue::of(Value::integer(acc));
      }
      default: break;
    }
  }
  double a = l.as_real(), b = r.as_real();
  switch (op) {
    case BinOp::Add: return AbstractValue::of(Value::real(a + b));
    case BinOp::Sub: return AbstractValue::of(Value::real(a - b));
    case BinOp::Mul: return AbstractValue::of(Value::real(a * b));
    case BinOp::Div:
      if (b == 0.0) {
        note(hooks, "division by known zero left in place");
        return AbstractValue::unknown();
      }
      return AbstractValue::of(Value::real(a / b));
    case BinOp::Pow: {
      if (r.type == Type::Integer) {
        long long e = r.i;
        bool inv = e < 0;
        if (inv && a == 0.0) {
          note(hooks, "0.0 ** negative exponent left in place");
          return AbstractValue::unknown();
        }
        double acc = 1.0;
        for (long long k = 0; k < (inv ? -e : e); ++k) acc *= a;
        return AbstractValue::of(Value::real(inv ? 1.0 / acc : acc));
      }
      return AbstractValue::of(Value::real(std::pow(a, b)));
    }
    default: break;
  }
  return AbstractValue::unknown();
}

AbstractValue abstract_compare(BinOp op, const Value& l, const Value& r) {
  if (l.type == Type::Character && r.type == Type::Character) {
    int c = l.s.compare(r.s);
    switch (op) {
      case BinOp::Eq: return AbstractValue::of(Value::logical(c == 0));
      case BinOp::Ne: return AbstractValue::of(Value::logical(c != 0));
      case BinOp::Lt: return AbstractValue::of(Value::logical(c < 0));
      case BinOp::Le: return AbstractValue::of(Value::logical(c <= 0));
      case BinOp::Gt: return AbstractValue::of(Value::logical(c > 0));
      case BinOp::Ge: return AbstractValue::of(Value::logical(c >= 0));
      default: return AbstractValue::unknown();
    }
  }
  bool result;
  if (l.type == Type::Integer && r.type == Type::Integer) {
    long long a = l.i, b = r.i;
    switch (op) {
      case BinOp::Eq: result = a == b; break;
      case BinOp::Ne: result = a != b; break;
      case BinOp::Lt: result = a < b; break;
      case BinOp::Le: result = a <= b; break;
      case BinOp::Gt: result = a > b; break;
      default: result = a >= b; break;
    }
  } else {
    double a = l.as_real(), b = r.as_real();
    switch (op) {
      case BinOp::Eq: result = a == b; break;
      case BinOp::Ne: result = a != b; break;
      case BinOp::Lt: result = a < b; break;
      case BinOp::Le: result = a <= b; break;
      case BinOp::Gt: result = a > b; break;
      default: result = a >= b; break;
    }
  }
  return AbstractValue::of(Value::logical(result));
}

// Disequality facts fire only on the exact shape they were recorded
// from: a scalar variable on the left, a literal on the right.
const Expr* fact_var(const Expr& e) {
  return e.kind == Expr::Kind::Var ? &e : nullptr;
}

const Expr* fact_lit(const Expr& e) {
  return e.kind == Expr::Kind::Literal ? &e : nullptr;
}

}  // namespace

AbstractValue eval_abstract(const Expr& e, const AbstractEnv& env,
                            const UnitSymbols& us, const SymbolTable& symtab,
                            const EvalHooks& hooks) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      return AbstractValue::of(e.lit);
    case Expr::Kind::Var: {
      const Symbol& s = us.get(e.name);
      if (s.kind == Symbol::Kind::Parameter) return AbstractValue::of(s.param_value);
      if (s.is_array()) return AbstractValue::unknown();
      return env.get(us.location_of(e.name));
    }
    case Expr::Kind::ArrayElem:
      return AbstractValue::unknown();
    case Expr::Kind::Unary: {
      AbstractValue v = eval_abstract(*e.args[0], env, us, symtab, hooks);
      if (!v.known) return AbstractValue::unknown();
      if (e.un == UnaryOp::Not) return AbstractValue::of(Value::logical(!v.value.b));
      if (v.value.type == Type::Integer) return AbstractValue::of(Value::integer(-v.value.i));
      return AbstractValue::of(Value::real(-v.value.r));
    }
    case Expr::Kind::Binary: {
      // fact lookup before the strict evaluation: v .EQ. lit / v .NE. lit
      if (e.bin == BinOp::Eq || e.bin == BinOp::Ne) {
        const Expr* v = fact_var(*e.args[0]);
        const Expr* lit = fact_lit(*e.args[1]);
        if (v && lit) {
          const Symbol* sym = us.find(v->name);
          if (sym && sym->kind != Symbol::Kind::Parameter && !sym->is_array()) {
            Location loc = us.location_of(v->name);
            if (!env.get(loc).known && env.has_fact(loc, lit->lit)) {
              if (hooks.facts_fired)
                hooks.facts_fired->push_back(loc.str() + " /= " +
                                             lit->lit.literal_text());
              return AbstractValue::of(Value::logical(e.bin == BinOp::Ne));
            }
          }
        }
      }
      AbstractValue l = eval_abstract(*e.args[0], env, us, symtab, hooks);
      AbstractValue r = eval_abstract(*e.args[1], env, us, symtab, hooks);
      // a decided side settles .AND./.OR. when the other side could be
      // dropped without losing effects or faults
      if (e.bin == BinOp::And || e.bin == BinOp::Or) {
        bool deciding = e.bin == BinOp::Or;  // true decides OR, false AND
        if (l.known && l.value.b == deciding && expr_removal_safe(*e.args[1], us))
          return AbstractValue::of(Value::logical(deciding));
        if (r.known && r.value.b == deciding && expr_removal_safe(*e.args[0], us))
          return AbstractValue::of(Value::logical(deciding));
      }
      if (!l.known || !r.known) return AbstractValue::unknown();
      switch (e.bin) {
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Pow:
          return abstract_arith(e.bin, l.value, r.value, hooks);
        case BinOp::And:
          return AbstractValue::of(Value::logical(l.value.b && r.value.b));
        case BinOp::Or:
          return AbstractValue::of(Value::logical(l.value.b || r.value.b));
        default:
          return abstract_compare(e.bin, l.value, r.value);
      }
    }
    case Expr::Kind::FuncCall:
      return AbstractValue::unknown();
  }
  return AbstractValue::unknown();
}

// ---- MOD summaries ----

namespace {

// Classifies a write to `name` in `us` from the caller's point of view.
void add_write(const std::string& name, const UnitSymbols& us, ModInfo& info) {
  const Symbol* s = us.find(name);
  if (!s || s->kind == Symbol::Kind::Parameter) return;
  if (s->kind == Symbol::Kind::Formal) {
    info.formals.insert(s->formal_index);
  } else if (s->kind == Symbol::Kind::CommonMember) {
    info.commons.insert(us.location_of(name));
  }
  // plain locals are invisible to callers
}

void translate_callee_mods(const std::vector<ExprPtr>& args, const UnitSymbols& caller,
                           const ModInfo& callee, ModInfo& out) {
  for (const auto& l : callee.commons) out.commons.insert(l);
  for (int pos : callee.formals) {
    if (pos < 0 || pos >= static_cast<int>(args.size())) continue;
    const Expr& a = *args[pos];
    if (a.kind == Expr::Kind::Var || a.kind == Expr::Kind::ArrayElem)
      add_write(a.name, caller, out);
  }
}

void collect_expr_calls(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::FuncCall) out.push_back(&e);
  for (const auto& a : e.args) collect_expr_calls(*a, out);
}

void scan_body_writes(const Body& body, const UnitSymbols& us, const Program& p,
                      const ModSummaries& current, ModInfo& info) {
  auto apply_expr_calls = [&](const Expr& e) {
    std::vector<const Expr*> calls;
    collect_expr_calls(e, calls);
    for (const Expr* c : calls) {
      auto it = current.find(c->name);
      if (it == current.end())
        throw CompileError(ErrorKind::UnresolvedCallee, c->pos,
                           "call to unknown unit " + c->name);
      translate_callee_mods(c->args, us, it->second, info);
    }
  };
  for (const auto& s : body) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        add_write(s->target.name, us, info);
        if (s->target.index) apply_expr_calls(*s->target.index);
        apply_expr_calls(*s->value);
        break;
      case Stmt::Kind::Read:
        for (const auto& t : s->targets) {
          add_write(t.name, us, info);
          if (t.index) apply_expr_calls(*t.index);
        }
        break;
      case Stmt::Kind::DoLoop:
        add_write(s->index, us, info);
        apply_expr_calls(*s->lo);
        apply_expr_calls(*s->hi);
        if (s->step) apply_expr_calls(*s->step);
        break;
      case Stmt::Kind::DoWhile:
        apply_expr_calls(*s->cond);
        break;
      case Stmt::Kind::If:
        apply_expr_calls(*s->cond);
        break;
      case Stmt::Kind::Call: {
        auto it = current.find(s->callee);
        if (it == current.end())
          throw CompileError(ErrorKind::UnresolvedCallee, s->pos,
                             "call to unknown unit " + s->callee);
        for (const auto& a : s->args) apply_expr_calls(*a);
        translate_callee_mods(s->args, us, it->second, info);
        break;
      }
      case Stmt::Kind::Print:
        for (const auto& a : s->args) apply_expr_calls(*a);
        break;
      default:
        break;
    }
    scan_body_writes(s->then_body, us, p, current, info);
    scan_body_writes(s->else_body, us, p, current, info);
    scan_body_writes(s->body, us, p, current, info);
  }
}

bool mod_equal(const ModInfo& a, const ModInfo& b) {
  return a.formals == b.formals && a.commons == b.commons;
}

}  // namespace

ModSummaries mod_summaries(const Program& p, const SymbolTable& symtab) {
  ModSummaries out;
  for (const auto& u : p.units) out[u.name] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& u : p.units) {
      ModInfo next;
      scan_body_writes(u.body, symtab.unit(u.name), p, out, next);
      if (!mod_equal(next, out[u.name])) {
        out[u.name] = std::move(next);
        changed = true;
      }
    }
  }
  return out;
}

// ---- call binding ----

namespace {

std::string slot_name_formal(int pos) { return "#" + std::to_string(pos); }

std::string slot_name(const Location& l, const UnitSymbols& callee_syms) {
  if (l.kind == Location::Kind::Common)
    return "/" + l.block + "/(" + std::to_string(l.cell) + ")";
  // formal local of the callee
  const Symbol& s = callee_syms.get(l.name);
  return slot_name_formal(s.formal_index);
}

}  // namespace

CallBinding bind_call(const std::vector<ExprPtr>& args, const UnitSymbols& caller,
                      const AbstractEnv& caller_env, const Unit& callee,
                      const UnitSymbols& callee_syms, const SymbolTable& symtab,
                      const AliasPartition& caller_aliases) {
  CallBinding out;

  // carrying every Known COMMON binding through; callee writes kill later
  for (const auto& [loc, val] : caller_env.knowns) {
    if (loc.kind == Location::Kind::Common) out.entry_env.knowns[loc] = val;
  }

  struct FormalInfo {
    Location floc;
    AbstractValue incoming;
    std::optional<Location> storage;  // actual's storage, when an lvalue
  };
  std::vector<FormalInfo> formals;

  for (size_t i = 0; i < callee.formals.size(); ++i) {
    const Symbol& fsym = callee_syms.get(callee.formals[i]);
    FormalInfo fi;
    fi.floc = Location::local(callee.name, callee.formals[i], fsym.is_array());
    const Expr& a = *args[i];
    if (a.kind == Expr::Kind::Var) {
      const Symbol& asym = caller.get(a.name);
      if (asym.kind == Symbol::Kind::Parameter) {
        fi.incoming = AbstractValue::of(asym.param_value);
      } else {
        fi.storage = caller.location_of(a.name);
        fi.incoming = asym.is_array() ? AbstractValue::unknown()
                                      : caller_env.get(*fi.storage);
      }
    } else if (a.kind == Expr::Kind::ArrayElem) {
      const Symbol& asym = caller.get(a.name);
      Location base = caller.location_of(a.name);
      fi.incoming = AbstractValue::unknown();
      if (base.kind == Location::Kind::Common) {
        AbstractValue idx = eval_abstract(*a.args[0], caller_env, caller, symtab);
        if (idx.known && idx.value.type == Type::Integer && idx.value.i >= 1 &&
            idx.value.i <= asym.array_size) {
          fi.storage = Location::common(base.block,
                                        base.cell + static_cast<int>(idx.value.i) - 1);
        } else {
          fi.storage = base;  // whole span
        }
      } else {
        fi.storage = base;
      }
    } else {
      fi.incoming = eval_abstract(a, caller_env, caller, symtab);
    }
    // convert incoming value to the formal's type (integer literal actuals
    // may feed REAL formals)
    if (fi.incoming.known) {
      auto conv = value_convert(fi.incoming.value, fsym.type);
      fi.incoming = conv ? AbstractValue::of(*conv) : AbstractValue::unknown();
    }
    formals.push_back(std::move(fi));
  }

  // union formals sharing storage; union formals with COMMON storage the
  // callee can also see directly. Storage identity extends through the
  // caller's own alias classes (an actual that is a caller formal may
  // share storage with another one).
  auto storage_set = [&](const Location& storage) {
    std::vector<Location> set = caller_aliases.members(storage);
    return set;
  };
  auto is_caller_shared = [&](const Location& l) {
    if (l.kind == Location::Kind::Common) return true;
    const Symbol* s = caller.find(l.name);
    return s && s->kind == Symbol::Kind::Formal;
  };
  auto locs_overlap = [](const Location& a, const Location& b) {
    if (a == b) return true;
    if (a.kind == Location::Kind::Common && b.kind == Location::Kind::Common &&
        a.block == b.block)
      return a.cell < b.cell + b.span && b.cell < a.cell + a.span;
    return false;
  };

  for (size_t i = 0; i < formals.size(); ++i) {
    if (!formals[i].storage) continue;
    std::vector<Location> set_i = storage_set(*formals[i].storage);
    for (size_t j = 0; j < i; ++j) {
      if (!formals[j].storage) continue;
      std::vector<Location> set_j = storage_set(*formals[j].storage);
      bool overlap = false;
      for (const auto& a : set_i) {
        for (const auto& b : set_j) {
          if (locs_overlap(a, b)) overlap = true;
        }
      }
      if (caller_aliases.pessimistic && is_caller_shared(*formals[i].storage) &&
          is_caller_shared(*formals[j].storage))
        overlap = true;
      if (overlap) out.aliases.unite(formals[i].floc, formals[j].floc);
    }
    // COMMON storage visible in the callee: direct, through the caller's
    // class, or (pessimistically) any block the callee declares
    std::vector<Location> common_storage;
    for (const auto& m : set_i) {
      if (m.kind == Location::Kind::Common) common_storage.push_back(m);
    }
    for (const auto& [name, sym] : callee_syms.by_name) {
      if (sym.kind != Symbol::Kind::CommonMember) continue;
      Location cell = callee_syms.location_of(name);
      bool overlap = false;
      for (const auto& st : common_storage) {
        if (st.block == cell.block && cell.cell < st.cell + st.span &&
            st.cell < cell.cell + cell.span)
          overlap = true;
      }
      if (caller_aliases.pessimistic && is_caller_shared(*formals[i].storage))
        overlap = true;
      if (overlap) out.aliases.unite(formals[i].floc, cell);
    }
  }

  // enter formal values, then equalize per alias class: members keep their
  // value only when every member agrees on one Known value
  for (size_t i = 0; i < formals.size(); ++i) {
    if (formals[i].incoming.known)
      out.entry_env.knowns[formals[i].floc] = formals[i].incoming.value;
  }
  for (const auto& cls : out.aliases.classes()) {
    if (cls.size() < 2) continue;
    bool all_known = true;
    std::optional<Value> common_value;
    for (const auto& m : cls) {
      auto it = out.entry_env.knowns.find(m);
      if (it == out.entry_env.knowns.end()) {
        all_known = false;
        break;
      }
      if (!common_value) common_value = it->second;
      else if (!common_value->bits_equal(it->second)) all_known = false;
      if (!all_known) break;
    }
    if (!all_known) {
      for (const auto& m : cls) out.entry_env.kill(m);
    }
  }

  // canonical alias groups for the specialization key
  std::vector<std::vector<std::string>> groups;
  for (const auto& cls : out.aliases.classes()) {
    if (cls.size() < 2) continue;
    std::vector<std::string> g;
    for (const auto& m : cls) g.push_back(slot_name(m, callee_syms));
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end());
  out.alias_groups = std::move(groups);
  return out;
}

void kill_with_aliases(AbstractEnv& env, const Location& l, const AliasPartition& aliases,
                       const UnitSymbols& us) {
  if (aliases.pessimistic) {
    bool shared = l.kind == Location::Kind::Common;
    if (!shared && l.kind == Location::Kind::Local) {
      const Symbol* s = us.find(l.name);
      shared = s && s->kind == Symbol::Kind::Formal;
    }
    if (shared) {
      // wipe every formal and COMMON binding; locals survive
      for (auto it = env.knowns.begin(); it != env.knowns.end();) {
        const Location& k = it->first;
        bool is_shared = k.kind == Location::Kind::Common;
        if (!is_shared && k.kind == Location::Kind::Local) {
          const Symbol* s = us.find(k.name);
          is_shared = s && s->kind == Symbol::Kind::Formal;
        }
        it = is_shared ? env.knowns.erase(it) : std::next(it);
      }
      for (auto it = env.facts.begin(); it != env.facts.end();) {
        const Location& k = it->first;
        bool is_shared = k.kind == Location::Kind::Common;
        if (!is_shared && k.kind == Location::Kind::Local) {
          const Symbol* s = us.find(k.name);
          is_shared = s && s->kind == Symbol::Kind::Formal;
        }
        it = is_shared ? env.facts.erase(it) : std::next(it);
      }
      return;
    }
    env.kill(l);
    return;
  }
  for (const auto& m : aliases.members(l)) env.kill(m);
}

AbstractEnv apply_call_effect(const std::vector<ExprPtr>& args,
                              const UnitSymbols& caller, const AbstractEnv& caller_env,
                              const Unit& callee, const ModInfo& callee_mods,
                              const AliasPartition& caller_aliases) {
  AbstractEnv out = caller_env;
  for (const auto& l : callee_mods.commons) kill_with_aliases(out, l, caller_aliases, caller);
  for (int pos : callee_mods.formals) {
    if (pos < 0 || pos >= static_cast<int>(args.size())) continue;
    const Expr& a = *args[pos];
    if (a.kind == Expr::Kind::Var) {
      const Symbol& s = caller.get(a.name);
      if (s.kind != Symbol::Kind::Parameter)
        kill_with_aliases(out, caller.location_of(a.name), caller_aliases, caller);
    } else if (a.kind == Expr::Kind::ArrayElem) {
      kill_with_aliases(out, caller.location_of(a.name), caller_aliases, caller);
    }
  }
  (void)callee;
  return out;
}

std::set<Location> body_mod_locations(const Body& body, const UnitSymbols& us,
                                      const Program& p, const SymbolTable& symtab,
                                      const ModSummaries& mods) {
  std::set<Location> out;
  auto add_name = [&](const std::string& name) {
    const Symbol* s = us.find(name);
    if (!s || s->kind == Symbol::Kind::Parameter) return;
    out.insert(us.location_of(name));
  };
  auto add_callee = [&](const std::string& callee, const std::vector<ExprPtr>& args) {
    auto it = mods.find(callee);
    if (it == mods.end()) return;
    for (const auto& l : it->second.commons) out.insert(l);
    for (int pos : it->second.formals) {
      if (pos < 0 || pos >= static_cast<int>(args.size())) continue;
      const Expr& a = *args[pos];
      if (a.kind == Expr::Kind::Var || a.kind == Expr::Kind::ArrayElem) add_name(a.name);
    }
  };
  std::function<void(const Expr&)> scan_expr = [&](const Expr& e) {
    if (e.kind == Expr::Kind::FuncCall) add_callee(e.name, e.args);
    for (const auto& a : e.args) scan_expr(*a);
  };
  for_each_stmt(body, [&](const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        add_name(s.target.name);
        if (s.target.index) scan_expr(*s.target.index);
        scan_expr(*s.value);
        break;
      case Stmt::Kind::Read:
        for (const auto& t : s.targets) {
          add_name(t.name);
          if (t.index) scan_expr(*t.index);
        }
        break;
      case Stmt::Kind::DoLoop:
        add_name(s.index);
        scan_expr(*s.lo);
        scan_expr(*s.hi);
        if (s.step) scan_expr(*s.step);
        break;
      case Stmt::Kind::DoWhile:
      case Stmt::Kind::If:
        scan_expr(*s.cond);
        break;
      case Stmt::Kind::Call:
        for (const auto& a : s.args) scan_expr(*a);
        add_callee(s.callee, s.args);
        break;
      case Stmt::Kind::Print:
        for (const auto& a : s.args) scan_expr(*a);
        break;
      default:
        break;
    }
  });
  (void)p;
  (void)symtab;
  return out;
}

}  // namespace residua
