#include "residua/specialize.hpp"

#include <algorithm>
#include <cmath>

#include "residua/parser.hpp"
#include "residua/pretty.hpp"

namespace residua {

ReplacementPolicy ReplacementPolicy::all() {
  ReplacementPolicy p;
  p.mode = Mode::ReplaceAll;
  p.parameters_kept = false;
  return p;
}

ReplacementPolicy ReplacementPolicy::none() {
  ReplacementPolicy p;
  p.mode = Mode::ReplaceNone;
  return p;
}

ReplacementPolicy ReplacementPolicy::keep_list(std::set<std::string> keep) {
  ReplacementPolicy p;
  p.mode = Mode::KeepList;
  p.keep = std::move(keep);
  return p;
}

std::string SpecKey::str() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [slot, lit] : knowns) {
    if (!first) out += ", ";
    out += slot + "=" + lit;
    first = false;
  }
  for (const auto& g : alias_groups) {
    if (!first) out += ", ";
    out += "alias(";
    for (size_t i = 0; i < g.size(); ++i) {
      if (i) out += ",";
      out += g[i];
    }
    out += ")";
    first = false;
  }
  return out + "}";
}

const VariantRecord* Report::find_variant(const std::string& name) const {
  for (const auto& v : variants)
    if (v.name == name) return &v;
  return nullptr;
}

std::set<ProvId> Report::removed_with_reason(const std::string& reason) const {
  std::set<ProvId> out;
  for (const auto& v : variants) {
    for (const auto& [prov, rec] : v.stmts) {
      if (rec.disposition == Disposition::Removed && rec.reason == reason)
        out.insert(prov);
    }
  }
  return out;
}

// ---- expression predicates shared with liveness ----

namespace detail {

bool expr_has_call(const Expr& e) {
  if (e.kind == Expr::Kind::FuncCall) return true;
  for (const auto& a : e.args)
    if (expr_has_call(*a)) return true;
  return false;
}

// Safe to delete from the program: no calls, and no operation that
// could fault at runtime.
bool removal_safe(const Expr& e, const UnitSymbols& us) {
  return expr_removal_safe(e, us);
}

void mentioned_names(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::ArrayElem:
      out.insert(e.name);
      break;
    default:
      break;
  }
  for (const auto& a : e.args) mentioned_names(*a, out);
}

void collect_func_calls(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::FuncCall) out.push_back(&e);
  for (const auto& a : e.args) collect_func_calls(*a, out);
}

}  // namespace detail

// ---- the specializer ----

namespace {

using detail::collect_func_calls;
using detail::mentioned_names;
using detail::removal_safe;

struct UnitCtx {
  const Unit* origin = nullptr;
  const UnitSymbols* us = nullptr;
  AliasPartition aliases;
  VariantRecord* rec = nullptr;
  std::string variant_name;
  ProvId cur_prov = kNoProv;  // statement being simplified, for the ledger
};

struct SimplifiedExpr {
  ExprPtr expr;
  AbstractValue value;
};

struct BodyResult {
  Body stmts;
  AbstractEnv env;
};

class Specializer {
 public:
  Specializer(const Program& p, const SymbolTable& symtab, const ConstraintSet& cs,
              const SpecializeConfig& config)
      : p_(p),
        symtab_(symtab),
        cs_(cs),
        config_(config),
        mods_(mod_summaries(p, symtab)),
        resolved_(resolve_constraints(cs, p, symtab)) {
    find_recursive_units();
  }

  SpecializeResult run() {
    const Unit& main_unit = *p_.find_unit(p_.entry);
    AbstractEnv env0 = initial_env(cs_, main_unit, p_, symtab_);
    specialize_unit(main_unit, SpecKey{}, env0, AliasPartition{}, main_unit.name);

    Program residual;
    residual.entry = p_.entry;
    for (const auto& u : p_.units) {
      bool any = false;
      for (const auto& e : cache_) {
        if (e.origin != u.name) continue;
        residual.units.push_back(e.unit);
        residual.files[e.unit.name] = e.unit.name + ".f";
        any = true;
      }
      if (!any) {
        report_.unreachable_units.push_back(u.name);
        residual.units.push_back(u);
        residual.files[u.name] = u.name + ".f";
      }
    }
    verify_residual(residual);
    return {std::move(residual), std::move(report_)};
  }

 private:
  struct CacheEntry {
    std::string origin;
    SpecKey key;
    std::string name;
    Unit unit;
    bool in_progress = false;
    int hits = 0;
  };

  // The residual must reparse and type-check; a failure here is a bug in
  // the specializer, not in user input.
  void verify_residual(const Program& residual) {
    try {
      Program reparsed = parse_program(pretty_print(residual));
      resolve_symbols(reparsed);
    } catch (const CompileError& e) {
      throw CompileError(ErrorKind::InternalError,
                         std::string("residual failed to reparse/type-check: ") +
                             e.what());
    }
  }

  // ---- ledger helpers ----

  void record(UnitCtx& ctx, const Stmt& original, const Stmt& residual) {
    StmtRecord r;
    r.prov = original.prov;
    r.old_text = stmt_header_text(original);
    r.new_text = stmt_header_text(residual);
    if (r.new_text == r.old_text) {
      r.disposition = Disposition::Kept;
      r.new_text.clear();
    } else {
      r.disposition = Disposition::Simplified;
    }
    ctx.rec->stmts[original.prov] = std::move(r);
  }

  void mark_removed(UnitCtx& ctx, const Stmt& s, const std::string& reason) {
    StmtRecord r;
    r.prov = s.prov;
    r.old_text = stmt_header_text(s);
    r.disposition = Disposition::Removed;
    r.reason = reason;
    ctx.rec->stmts[s.prov] = std::move(r);
    for (const Body* b : {&s.then_body, &s.else_body, &s.body})
      for (const auto& child : *b) mark_removed(ctx, *child, reason);
  }

  EvalHooks hooks_for(UnitCtx& ctx) {
    EvalHooks h;
    h.notes = &eval_notes_;
    h.facts_fired = &eval_facts_;
    (void)ctx;
    return h;
  }

  void flush_eval_events(UnitCtx& ctx) {
    for (auto& n : eval_notes_)
      report_.notes.push_back(ctx.variant_name + " @" + std::to_string(ctx.cur_prov) +
                              ": " + n);
    for (auto& f : eval_facts_)
      report_.facts_fired.push_back({ctx.variant_name, ctx.cur_prov, std::move(f)});
    eval_notes_.clear();
    eval_facts_.clear();
  }

  // ---- expression simplification ----

  bool policy_allows(const Expr& e) const {
    switch (config_.policy.mode) {
      case ReplacementPolicy::Mode::ReplaceAll:
        return true;
      case ReplacementPolicy::Mode::ReplaceNone:
        return false;
      case ReplacementPolicy::Mode::KeepList:
        break;
    }
    std::set<std::string> names;
    mentioned_names(e, names);
    for (const auto& n : names) {
      if (config_.policy.keep.count(n)) return false;
    }
    return true;
  }

  // KeepList respects PARAMETER identifiers when parameters_kept is set.
  bool policy_allows_with_params(const Expr& e, const UnitSymbols& us) const {
    if (!policy_allows(e)) return false;
    if (config_.policy.mode == ReplacementPolicy::Mode::KeepList &&
        config_.policy.parameters_kept) {
      std::set<std::string> names;
      mentioned_names(e, names);
      for (const auto& n : names) {
        const Symbol* s = us.find(n);
        if (s && s->kind == Symbol::Kind::Parameter) return false;
      }
    }
    return true;
  }

  static bool substitutable_value(const Value& v) {
    if (v.type == Type::Real) return std::isfinite(v.r);
    return true;
  }

  SimplifiedExpr simplify_expr(const ExprPtr& e, const AbstractEnv& env, UnitCtx& ctx) {
    AbstractValue value = eval_abstract(*e, env, *ctx.us, symtab_, hooks_for(ctx));
    flush_eval_events(ctx);
    if (e->kind == Expr::Kind::Literal) return {e, value};
    if (value.known && substitutable_value(value.value) &&
        policy_allows_with_params(*e, *ctx.us)) {
      return {Expr::literal(value.value, e->pos), value};
    }
    // not substituted (policy or unknown): rebuild children
    switch (e->kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Literal:
        return {e, value};
      case Expr::Kind::ArrayElem: {
        SimplifiedExpr idx = simplify_expr(e->args[0], env, ctx);
        if (idx.expr == e->args[0]) return {e, value};
        return {Expr::array_elem(e->name, idx.expr, e->pos), value};
      }
      case Expr::Kind::Unary: {
        SimplifiedExpr a = simplify_expr(e->args[0], env, ctx);
        if (a.expr == e->args[0]) return {e, value};
        return refresh(Expr::unary(e->un, a.expr, e->pos), value, env, ctx);
      }
      case Expr::Kind::FuncCall: {
        std::vector<ExprPtr> args = simplify_call_args(e->name, e->args, env, ctx);
        std::string target = resolve_callee_variant(e->name, args, env, ctx);
        if (target == e->name) {
          bool unchanged = true;
          for (size_t i = 0; i < args.size(); ++i)
            if (args[i] != e->args[i]) unchanged = false;
          if (unchanged) return {e, value};
        }
        return {Expr::func_call(target, std::move(args), e->pos), value};
      }
      case Expr::Kind::Binary: {
        SimplifiedExpr l = simplify_expr(e->args[0], env, ctx);
        SimplifiedExpr r = simplify_expr(e->args[1], env, ctx);
        if (ExprPtr rewritten = algebraic_rewrite(*e, l.expr, r.expr, ctx))
          return refresh(std::move(rewritten), value, env, ctx);
        if (l.expr == e->args[0] && r.expr == e->args[1]) return {e, value};
        return refresh(Expr::binary(e->bin, l.expr, r.expr, e->pos), value, env, ctx);
      }
    }
    return {e, value};
  }

  // Rewrites can make a residual decidable where the original was not
  // (a literal absorber inside a comparison, say) and can drop the very
  // identifiers a keep-list was protecting, so both the value and the
  // substitution decision are re-made against the rewritten residual.
  // Facts consumed on the new shape are recorded like any other firing.
  SimplifiedExpr refresh(ExprPtr residual, AbstractValue value, const AbstractEnv& env,
                         UnitCtx& ctx) {
    if (!value.known) {
      value = eval_abstract(*residual, env, *ctx.us, symtab_, hooks_for(ctx));
      flush_eval_events(ctx);
    }
    if (value.known && residual->kind != Expr::Kind::Literal &&
        substitutable_value(value.value) &&
        policy_allows_with_params(*residual, *ctx.us)) {
      return {Expr::literal(value.value, residual->pos), value};
    }
    return {std::move(residual), value};
  }

  // expr_type over residual expressions, where function references may
  // already target specialized variant names.
  Type residual_expr_type(const Expr& e, UnitCtx& ctx) {
    switch (e.kind) {
      case Expr::Kind::Literal: return e.lit.type;
      case Expr::Kind::Var:
      case Expr::Kind::ArrayElem: return ctx.us->get(e.name).type;
      case Expr::Kind::Unary: return residual_expr_type(*e.args[0], ctx);
      case Expr::Kind::Binary:
        switch (e.bin) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
          case BinOp::Div:
          case BinOp::Pow: {
            Type l = residual_expr_type(*e.args[0], ctx);
            Type r = residual_expr_type(*e.args[1], ctx);
            return (l == Type::Real || r == Type::Real) ? Type::Real : Type::Integer;
          }
          default: return Type::Logical;
        }
      case Expr::Kind::FuncCall: {
        std::string origin = e.name;
        for (const auto& entry : cache_) {
          if (entry.name == e.name) {
            origin = entry.origin;
            break;
          }
        }
        return symtab_.unit(origin).result_type;
      }
    }
    return Type::Integer;
  }

  // Neutral/absorbing element rewrites. These remove structure rather
  // than substitute values, so they apply under every policy. Arithmetic
  // identities stay within INTEGER except the exact IEEE ones (x*1, x/1,
  // x**1); absorbers additionally need the dropped side to be safe to
  // delete.
  ExprPtr algebraic_rewrite(const Expr& e, const ExprPtr& l, const ExprPtr& r,
                            UnitCtx& ctx) {
    auto is_int_lit = [](const ExprPtr& x, long long v) {
      return x->kind == Expr::Kind::Literal && x->lit.type == Type::Integer &&
             x->lit.i == v;
    };
    auto is_one_lit = [](const ExprPtr& x) {
      return x->kind == Expr::Kind::Literal &&
             ((x->lit.type == Type::Integer && x->lit.i == 1) ||
              (x->lit.type == Type::Real && x->lit.r == 1.0));
    };
    auto is_logical = [](const ExprPtr& x, bool v) {
      return x->kind == Expr::Kind::Literal && x->lit.type == Type::Logical &&
             x->lit.b == v;
    };
    auto int_typed = [&](const ExprPtr& x) {
      return residual_expr_type(*x, ctx) == Type::Integer;
    };

    switch (e.bin) {
      case BinOp::Add:
        if (is_int_lit(r, 0) && int_typed(l)) return l;
        if (is_int_lit(l, 0) && int_typed(r)) return r;
        return nullptr;
      case BinOp::Sub:
        if (is_int_lit(r, 0) && int_typed(l)) return l;
        return nullptr;
      case BinOp::Mul:
        if (is_one_lit(r) && !(r->lit.type == Type::Real && int_typed(l))) return l;
        if (is_one_lit(l) && !(l->lit.type == Type::Real && int_typed(r))) return r;
        if (is_int_lit(r, 0) && int_typed(l) && removal_safe(*l, *ctx.us))
          return Expr::literal(Value::integer(0), e.pos);
        if (is_int_lit(l, 0) && int_typed(r) && removal_safe(*r, *ctx.us))
          return Expr::literal(Value::integer(0), e.pos);
        return nullptr;
      case BinOp::Div:
        if (is_one_lit(r) && !(r->lit.type == Type::Real && int_typed(l))) return l;
        return nullptr;
      case BinOp::Pow:
        if (is_int_lit(r, 1)) return l;
        return nullptr;
      case BinOp::And:
        if (is_logical(l, true)) return r;
        if (is_logical(r, true)) return l;
        if (is_logical(l, false) && removal_safe(*r, *ctx.us))
          return Expr::literal(Value::logical(false), e.pos);
        if (is_logical(r, false) && removal_safe(*l, *ctx.us))
          return Expr::literal(Value::logical(false), e.pos);
        return nullptr;
      case BinOp::Or:
        if (is_logical(l, false)) return r;
        if (is_logical(r, false)) return l;
        if (is_logical(l, true) && removal_safe(*r, *ctx.us))
          return Expr::literal(Value::logical(true), e.pos);
        if (is_logical(r, true) && removal_safe(*l, *ctx.us))
          return Expr::literal(Value::logical(true), e.pos);
        return nullptr;
      default:
        return nullptr;
    }
  }

  // ---- function-call effects ----

  // Any function mentioned in a statement's expressions may run at an
  // unspecified point of its evaluation; before using values, forget
  // everything those calls (transitively) may write.
  AbstractEnv kill_stmt_call_effects(const Stmt& s, const AbstractEnv& env, UnitCtx& ctx) {
    std::vector<const Expr*> calls;
    auto scan = [&](const ExprPtr& e) {
      if (e) collect_func_calls(*e, calls);
    };
    scan(s.value);
    scan(s.cond);
    scan(s.lo);
    scan(s.hi);
    scan(s.step);
    if (s.target.index) collect_func_calls(*s.target.index, calls);
    for (const auto& a : s.args) collect_func_calls(*a, calls);
    for (const auto& t : s.targets)
      if (t.index) collect_func_calls(*t.index, calls);
    if (calls.empty()) return env;
    AbstractEnv out = env;
    for (const Expr* c : calls) {
      auto it = mods_.find(c->name);
      if (it == mods_.end()) continue;
      out = apply_call_effect(c->args, *ctx.us, out, *p_.find_unit(c->name), it->second,
                              ctx.aliases);
    }
    return out;
  }

  // ---- call sites ----

  // Actual arguments whose storage the call may write stay lvalues (only
  // their subscripts simplify); substituting them would sever the
  // by-reference binding. That covers written positions, actuals sharing
  // storage with a written position, and COMMON storage in the callee's
  // MOD set. Everything else simplifies under the policy.
  std::vector<ExprPtr> simplify_call_args(const std::string& callee,
                                          const std::vector<ExprPtr>& args,
                                          const AbstractEnv& env, UnitCtx& ctx) {
    const ModInfo& callee_mods = mods_.at(callee);

    auto storage_of = [&](const Expr& a) -> std::optional<Location> {
      if (a.kind != Expr::Kind::Var && a.kind != Expr::Kind::ArrayElem)
        return std::nullopt;
      const Symbol& s = ctx.us->get(a.name);
      if (s.kind == Symbol::Kind::Parameter) return std::nullopt;
      return ctx.us->location_of(a.name);
    };
    auto overlaps = [](const Location& a, const Location& b) {
      if (a == b) return true;
      if (a.kind == Location::Kind::Common && b.kind == Location::Kind::Common &&
          a.block == b.block)
        return a.cell < b.cell + b.span && b.cell < a.cell + a.span;
      return false;
    };
    auto is_shared = [&](const Location& l) {
      if (l.kind == Location::Kind::Common) return true;
      const Symbol* s = ctx.us->find(l.name);
      return s && s->kind == Symbol::Kind::Formal;
    };

    // storage the call may write, from the caller's view
    std::vector<Location> written;
    for (const auto& l : callee_mods.commons) written.push_back(l);
    for (int pos : callee_mods.formals) {
      if (pos < 0 || pos >= static_cast<int>(args.size())) continue;
      if (auto st = storage_of(*args[pos])) {
        for (const auto& m : ctx.aliases.members(*st)) written.push_back(m);
      }
    }

    std::vector<ExprPtr> out;
    for (size_t i = 0; i < args.size(); ++i) {
      const Expr& a = *args[i];
      bool protect = callee_mods.formals.count(static_cast<int>(i)) > 0 &&
                     storage_of(a).has_value();
      if (!protect) {
        if (auto st = storage_of(a)) {
          for (const auto& m : ctx.aliases.members(*st)) {
            for (const auto& w : written) {
              if (overlaps(m, w)) protect = true;
            }
            // under pessimistic aliasing any shared storage may be hit
            if (ctx.aliases.pessimistic && is_shared(m) && !callee_mods.empty())
              protect = true;
          }
        }
      }
      if (protect) {
        if (a.kind == Expr::Kind::ArrayElem) {
          SimplifiedExpr idx = simplify_expr(a.args[0], env, ctx);
          out.push_back(idx.expr == a.args[0]
                            ? args[i]
                            : Expr::array_elem(a.name, idx.expr, a.pos));
        } else {
          out.push_back(args[i]);
        }
      } else {
        out.push_back(simplify_expr(args[i], env, ctx).expr);
      }
    }
    return out;
  }

  SpecKey make_key(const AbstractEnv& entry_env, const CallBinding& cb,
                   const UnitSymbols& callee_syms) {
    SpecKey key;
    for (const auto& [loc, val] : entry_env.knowns) {
      std::string slot;
      if (loc.kind == Location::Kind::Common) {
        slot = "/" + loc.block + "/(" + std::to_string(loc.cell) + ")";
      } else {
        const Symbol* s = callee_syms.find(loc.name);
        if (!s || s->kind != Symbol::Kind::Formal) continue;  // constrained locals
        slot = "#" + std::to_string(s->formal_index);
      }
      key.knowns.emplace_back(slot, val.literal_text());
    }
    std::sort(key.knowns.begin(), key.knowns.end());
    key.alias_groups = cb.alias_groups;
    return key;
  }

  // Call-graph edges, flattened: units that can (transitively) reach
  // themselves never get keyed variants. Specializing them per context
  // would peel one recursion level off on every re-run.
  void find_recursive_units() {
    std::map<std::string, std::set<std::string>> callees;
    for (const auto& u : p_.units) {
      auto& edge = callees[u.name];
      for_each_stmt(u.body, [&](const Stmt& s) {
        if (s.kind == Stmt::Kind::Call) edge.insert(s.callee);
        std::function<void(const Expr&)> scan = [&](const Expr& e) {
          if (e.kind == Expr::Kind::FuncCall) edge.insert(e.name);
          for (const auto& a : e.args) scan(*a);
        };
        for (const ExprPtr& e : {s.value, s.cond, s.lo, s.hi, s.step})
          if (e) scan(*e);
        if (s.target.index) scan(*s.target.index);
        for (const auto& a : s.args) scan(*a);
        for (const auto& t : s.targets)
          if (t.index) scan(*t.index);
      });
    }
    for (const auto& u : p_.units) {
      std::set<std::string> seen;
      std::vector<std::string> work(callees[u.name].begin(), callees[u.name].end());
      while (!work.empty()) {
        std::string n = work.back();
        work.pop_back();
        if (!seen.insert(n).second) continue;
        if (n == u.name) {
          recursive_.insert(u.name);
          break;
        }
        for (const auto& next : callees[n]) work.push_back(next);
      }
    }
  }

  // Specialization entry for both CALL statements and function
  // subexpressions. Returns the variant name the site should target.
  std::string resolve_callee_variant(const std::string& callee_name,
                                     const std::vector<ExprPtr>& args,
                                     const AbstractEnv& env, UnitCtx& ctx) {
    const Unit& callee = *p_.find_unit(callee_name);
    const UnitSymbols& callee_syms = symtab_.unit(callee_name);
    if (recursive_.count(callee_name)) {
      AbstractEnv entry;
      for (const auto& rc : resolved_) {
        if (rc.source.scope == Constraint::Scope::Unit && rc.source.unit == callee_name)
          entry.set_known(rc.loc, rc.value);
      }
      AliasPartition pess;
      pess.pessimistic = true;
      return specialize_unit(callee, SpecKey{}, entry, pess, callee_name);
    }
    CallBinding cb =
        bind_call(args, *ctx.us, env, callee, callee_syms, symtab_, ctx.aliases);
    // unit-scoped constraints hold at every activation of the callee
    for (const auto& rc : resolved_) {
      if (rc.source.scope == Constraint::Scope::Unit && rc.source.unit == callee.name)
        cb.entry_env.set_known(rc.loc, rc.value);
    }
    SpecKey key = make_key(cb.entry_env, cb, callee_syms);
    return specialize_unit(callee, key, cb.entry_env, cb.aliases, callee_name);
  }

  // Cache-aware polyvariant specialization. Recursion: a same-key
  // in-flight request targets the variant under construction; a
  // different-key recursive request degrades to the context-free variant
  // (empty key, pessimistic aliasing), which is sound for every site.
  std::string specialize_unit(const Unit& origin, const SpecKey& key,
                              const AbstractEnv& entry_env_in,
                              const AliasPartition& aliases, const std::string& origin_name) {
    for (auto& e : cache_) {
      if (e.origin == origin_name && e.key == key) {
        ++e.hits;
        report_variant_hit(e.name);
        return e.name;
      }
    }
    bool origin_in_progress = false;
    for (const auto& e : cache_)
      if (e.origin == origin_name && e.in_progress) origin_in_progress = true;
    AbstractEnv entry_env = entry_env_in;
    AliasPartition used_aliases = aliases;
    SpecKey used_key = key;
    if (origin_in_progress && !key.empty()) {
      // different-key recursion: retarget to the universal variant
      used_key = SpecKey{};
      entry_env = AbstractEnv{};
      used_aliases = AliasPartition{};
      used_aliases.pessimistic = true;
      for (const auto& rc : resolved_) {
        if (rc.source.scope == Constraint::Scope::Unit && rc.source.unit == origin_name)
          entry_env.set_known(rc.loc, rc.value);
      }
      for (auto& e : cache_) {
        if (e.origin == origin_name && e.key == used_key) {
          ++e.hits;
          report_variant_hit(e.name);
          return e.name;
        }
      }
    } else if (key.empty() && !(&origin == p_.find_unit(p_.entry))) {
      // context-free variants must stay sound under any aliasing
      used_aliases = AliasPartition{};
      used_aliases.pessimistic = true;
    }
    if (used_key.empty()) {
      // a keyed variant whose body came out statement-identical to the
      // origin already carries the origin's name and serves as the
      // context-free variant verbatim
      for (auto& e : cache_) {
        if (e.origin == origin_name && e.name == origin_name && !e.in_progress) {
          ++e.hits;
          report_variant_hit(e.name);
          return e.name;
        }
      }
    }

    int existing = 0;
    for (const auto& e : cache_)
      if (e.origin == origin_name) ++existing;
    if (existing >= config_.variant_cap)
      throw CompileError(ErrorKind::RecursionDepthExceeded,
                         "variant cap (" + std::to_string(config_.variant_cap) +
                             ") exceeded for " + origin_name);

    std::string name = origin_name;
    if (!used_key.empty()) {
      do {
        name = origin_name + "_" + std::to_string(++ordinals_[origin_name]);
      } while (p_.find_unit(name) != nullptr || name_taken(name));
    }

    size_t slot = cache_.size();
    CacheEntry entry;
    entry.origin = origin_name;
    entry.key = used_key;
    entry.name = name;
    entry.in_progress = true;
    cache_.push_back(std::move(entry));

    VariantRecord rec;
    rec.name = name;
    rec.origin = origin_name;
    rec.key = used_key;
    for (const auto& [loc, val] : entry_env.knowns)
      rec.entry_bindings.emplace_back(loc.str(), val.literal_text());
    size_t rec_slot = report_.variants.size();
    report_.variants.push_back(std::move(rec));

    UnitCtx ctx;
    ctx.origin = &origin;
    ctx.us = &symtab_.unit(origin_name);
    ctx.aliases = used_aliases;
    ctx.rec = &report_.variants[rec_slot];
    ctx.variant_name = name;

    AbstractEnv env = entry_env;
    BodyResult body = simplify_body(origin.body, env, ctx);
    Body cleaned = liveness_cleanup(body.stmts, origin, *ctx.us, symtab_, mods_,
                                    config_.policy, used_aliases, ctx.rec);

    Unit variant = origin;
    variant.body = std::move(cleaned);
    variant.source_file.clear();

    // A specialization that changed nothing keeps the origin's name, so
    // re-specializing an already specialized program is a fixpoint. Not
    // applicable once any statement references the provisional name.
    if (!used_key.empty() && body_matches_origin(variant.body, origin.body)) {
      bool rename_blocked = false;
      for (size_t i = 0; i < cache_.size(); ++i) {
        if (i != slot && cache_[i].origin == origin_name && cache_[i].name == origin_name)
          rename_blocked = true;
        if (i != slot && unit_references_name(cache_[i].unit, name)) rename_blocked = true;
      }
      if (!rename_blocked) {
        report_.variants[rec_slot].name = origin_name;
        cache_[slot].name = origin_name;
      }
    }
    variant.name = cache_[slot].name;
    if (origin.kind == UnitKind::Function && variant.name != origin_name) {
      rename_result_var(variant.body, origin_name, variant.name);
      refresh_record_texts(report_.variants[rec_slot], variant.body);
    }
    for (auto& ff : report_.facts_fired) {
      if (ff.variant == name) ff.variant = cache_[slot].name;
    }
    cache_[slot].unit = std::move(variant);
    cache_[slot].in_progress = false;
    return cache_[slot].name;
  }

  static bool body_matches_origin(const Body& variant, const Body& origin) {
    return body_equal(variant, origin, /*compare_prov=*/true);
  }

  // A function's result variable is the unit name; a suffixed variant
  // carries its result under the suffixed name.
  static ExprPtr rename_var_in_expr(const ExprPtr& e, const std::string& from,
                                    const std::string& to) {
    switch (e->kind) {
      case Expr::Kind::Var:
        if (e->name == from) return Expr::var(to, e->pos);
        return e;
      case Expr::Kind::Literal:
        return e;
      default: {
        bool changed = false;
        std::vector<ExprPtr> args;
        for (const auto& a : e->args) {
          ExprPtr r = rename_var_in_expr(a, from, to);
          if (r != a) changed = true;
          args.push_back(std::move(r));
        }
        if (!changed) return e;
        auto fresh = std::make_shared<Expr>(*e);
        fresh->args = std::move(args);
        return fresh;
      }
    }
  }

  static void rename_result_var(Body& body, const std::string& from,
                                const std::string& to) {
    for (auto& s : body) {
      if (s->kind == Stmt::Kind::Assign && s->target.name == from)
        s->target.name = to;
      if (s->value) s->value = rename_var_in_expr(s->value, from, to);
      if (s->cond) s->cond = rename_var_in_expr(s->cond, from, to);
      if (s->lo) s->lo = rename_var_in_expr(s->lo, from, to);
      if (s->hi) s->hi = rename_var_in_expr(s->hi, from, to);
      if (s->step) s->step = rename_var_in_expr(s->step, from, to);
      if (s->target.index) s->target.index = rename_var_in_expr(s->target.index, from, to);
      for (auto& a : s->args) a = rename_var_in_expr(a, from, to);
      for (auto& t : s->targets) {
        if (t.name == from) t.name = to;
        if (t.index) t.index = rename_var_in_expr(t.index, from, to);
      }
      rename_result_var(s->then_body, from, to);
      rename_result_var(s->else_body, from, to);
      rename_result_var(s->body, from, to);
    }
  }

  // After a rename the residual texts in the ledger go stale; recompute
  // disposition and new text against the unchanged old text.
  void refresh_record_texts(VariantRecord& rec, const Body& body) {
    for_each_stmt(body, [&](const Stmt& s) {
      auto it = rec.stmts.find(s.prov);
      if (it == rec.stmts.end()) return;
      StmtRecord& r = it->second;
      if (r.disposition == Disposition::Removed) return;
      std::string text = stmt_header_text(s);
      if (text == r.old_text) {
        r.disposition = Disposition::Kept;
        r.new_text.clear();
      } else {
        r.disposition = Disposition::Simplified;
        r.new_text = text;
      }
    });
  }

  static bool expr_references_name(const Expr& e, const std::string& name) {
    if (e.kind == Expr::Kind::FuncCall && e.name == name) return true;
    for (const auto& a : e.args)
      if (expr_references_name(*a, name)) return true;
    return false;
  }

  static bool unit_references_name(const Unit& u, const std::string& name) {
    bool found = false;
    for_each_stmt(u.body, [&](const Stmt& s) {
      if (s.kind == Stmt::Kind::Call && s.callee == name) found = true;
      for (const ExprPtr& e : {s.value, s.cond, s.lo, s.hi, s.step}) {
        if (e && expr_references_name(*e, name)) found = true;
      }
      if (s.target.index && expr_references_name(*s.target.index, name)) found = true;
      for (const auto& a : s.args)
        if (expr_references_name(*a, name)) found = true;
      for (const auto& t : s.targets)
        if (t.index && expr_references_name(*t.index, name)) found = true;
    });
    return found;
  }

  bool name_taken(const std::string& name) const {
    for (const auto& e : cache_)
      if (e.name == name) return true;
    return false;
  }

  void report_variant_hit(const std::string& name) {
    for (auto& v : report_.variants) {
      if (v.name == name) {
        ++v.cache_hits;
        return;
      }
    }
  }

  // ---- statement simplification ----

  BodyResult simplify_body(const Body& body, AbstractEnv env, UnitCtx& ctx) {
    BodyResult out;
    for (const auto& s : body) {
      BodyResult one = simplify_stmt(*s, env, ctx);
      for (auto& rs : one.stmts) out.stmts.push_back(std::move(rs));
      env = std::move(one.env);
    }
    out.env = std::move(env);
    return out;
  }

  StmtPtr rebuilt(const Stmt& origin, StmtPtr fresh) {
    fresh->prov = origin.prov;
    fresh->comments = origin.comments;
    fresh->pos = origin.pos;
    return fresh;
  }

  BodyResult simplify_stmt(const Stmt& s, const AbstractEnv& env_in, UnitCtx& ctx) {
    ctx.cur_prov = s.prov;
    ctx.rec->claims[s.prov] = env_in.knowns;
    AbstractEnv env = kill_stmt_call_effects(s, env_in, ctx);
    switch (s.kind) {
      case Stmt::Kind::Assign:
        return simplify_assign(s, env, ctx);
      case Stmt::Kind::If:
        return simplify_if(s, env, ctx);
      case Stmt::Kind::DoLoop:
        return simplify_do(s, env, ctx);
      case Stmt::Kind::DoWhile:
        return simplify_do_while(s, env, ctx);
      case Stmt::Kind::Call:
        return simplify_call(s, env, ctx);
      case Stmt::Kind::Print: {
        std::vector<ExprPtr> args;
        for (const auto& a : s.args) args.push_back(simplify_expr(a, env, ctx).expr);
        StmtPtr res = rebuilt(s, Stmt::print(std::move(args), s.pos));
        record(ctx, s, *res);
        return {{res}, env};
      }
      case Stmt::Kind::Read: {
        // targets fill left to right; a later subscript can read an
        // earlier target, so each kill precedes the next simplification
        std::vector<LValue> targets;
        for (const auto& t : s.targets) {
          LValue lv = t;
          if (lv.index) lv.index = simplify_expr(lv.index, env, ctx).expr;
          kill_with_aliases(env, ctx.us->location_of(t.name), ctx.aliases, *ctx.us);
          targets.push_back(std::move(lv));
        }
        StmtPtr res = rebuilt(s, Stmt::read(std::move(targets), s.pos));
        record(ctx, s, *res);
        return {{res}, env};
      }
      case Stmt::Kind::Return:
      case Stmt::Kind::Stop:
      case Stmt::Kind::Continue: {
        StmtPtr res = rebuilt(s, Stmt::simple(s.kind, s.pos));
        record(ctx, s, *res);
        return {{res}, env};
      }
    }
    throw CompileError(ErrorKind::InternalError, "unhandled statement kind");
  }

  BodyResult simplify_assign(const Stmt& s, AbstractEnv env, UnitCtx& ctx) {
    SimplifiedExpr rhs = simplify_expr(s.value, env, ctx);
    LValue target = s.target;
    if (target.index) target.index = simplify_expr(target.index, env, ctx).expr;

    const Symbol& sym = ctx.us->get(target.name);
    Location loc = ctx.us->location_of(target.name);
    kill_with_aliases(env, loc, ctx.aliases, *ctx.us);
    if (!target.index && !sym.is_array() && rhs.value.known) {
      if (auto conv = value_convert(rhs.value.value, sym.type))
        env.set_known(loc, *conv);
    }
    StmtPtr res = rebuilt(s, Stmt::assign(std::move(target), rhs.expr, s.pos));
    record(ctx, s, *res);
    return {{res}, env};
  }

  BodyResult simplify_if(const Stmt& s, AbstractEnv env, UnitCtx& ctx) {
    SimplifiedExpr cond = simplify_expr(s.cond, env, ctx);
    if (cond.value.known) {
      // the surviving arm replaces the IF; children keep their ProvIds
      bool taken = cond.value.value.b;
      const Body& live_arm = taken ? s.then_body : s.else_body;
      const Body& dead_arm = taken ? s.else_body : s.then_body;
      for (const auto& d : dead_arm) mark_removed(ctx, *d, "dead-branch");
      if (live_arm.empty()) {
        mark_removed(ctx, s, "dead-branch");
        // the mark covered both arms; re-mark survivors not needed (none)
        return {{}, env};
      }
      StmtRecord r;
      r.prov = s.prov;
      r.old_text = stmt_header_text(s);
      r.disposition = Disposition::Removed;
      r.reason = "branch-flattened";
      ctx.rec->stmts[s.prov] = std::move(r);
      BodyResult arm = simplify_body(live_arm, env, ctx);
      // hoisted statements inherit the IF's comments
      if (!s.comments.empty() && !arm.stmts.empty()) {
        StmtPtr first = std::make_shared<Stmt>(*arm.stmts[0]);
        std::vector<std::string> merged = s.comments;
        for (const auto& c : first->comments) merged.push_back(c);
        first->comments = std::move(merged);
        arm.stmts[0] = first;
      }
      return arm;
    }

    AbstractEnv then_env = env;
    AbstractEnv else_env = env;
    apply_condition_facts(*cond.expr, then_env, else_env, ctx);
    BodyResult then_res = simplify_body(s.then_body, then_env, ctx);
    BodyResult else_res = simplify_body(s.else_body, else_env, ctx);
    StmtPtr res = rebuilt(
        s, Stmt::if_stmt(cond.expr, std::move(then_res.stmts), std::move(else_res.stmts),
                         s.pos));
    record(ctx, s, *res);
    return {{res}, join_env(then_res.env, else_res.env)};
  }

  // Branch refinement from the condition's shape: `v .EQ. lit` binds v in
  // the then-arm and records v /= lit in the else-arm; `v .NE. lit`
  // records v /= lit in the then-arm. Other shapes refine nothing.
  void apply_condition_facts(const Expr& cond, AbstractEnv& then_env,
                             AbstractEnv& else_env, UnitCtx& ctx) {
    if (cond.kind != Expr::Kind::Binary) return;
    if (cond.bin != BinOp::Eq && cond.bin != BinOp::Ne) return;
    const Expr& l = *cond.args[0];
    const Expr& r = *cond.args[1];
    if (l.kind != Expr::Kind::Var || r.kind != Expr::Kind::Literal) return;
    const Symbol* sym = ctx.us->find(l.name);
    if (!sym || sym->kind == Symbol::Kind::Parameter || sym->is_array()) return;
    auto bound = value_convert(r.lit, sym->type);
    if (!bound) return;
    Location loc = ctx.us->location_of(l.name);
    if (cond.bin == BinOp::Eq) {
      then_env.set_known(loc, *bound);
      else_env.add_fact(loc, *bound);
    } else {
      then_env.add_fact(loc, *bound);
    }
  }

  BodyResult simplify_do(const Stmt& s, AbstractEnv env, UnitCtx& ctx) {
    SimplifiedExpr lo = simplify_expr(s.lo, env, ctx);
    SimplifiedExpr hi = simplify_expr(s.hi, env, ctx);
    SimplifiedExpr step;
    if (s.step) step = simplify_expr(s.step, env, ctx);

    Location index_loc = ctx.us->location_of(s.index);
    if (lo.value.known && hi.value.known && (!s.step || step.value.known)) {
      long long lov = lo.value.value.i;
      long long hiv = hi.value.value.i;
      long long stepv = s.step ? step.value.value.i : 1;
      if (stepv != 0) {
        long long trips = (hiv - lov + stepv) / stepv;
        if (trips <= 0) {
          // zero-trip: the body never runs and the loop reduces to its
          // one observable effect, the index landing on its first
          // untaken value; dead-store cleanup drops even that when the
          // index is never read again
          for (const auto& d : s.body) mark_removed(ctx, *d, "zero-trip");
          kill_with_aliases(env, index_loc, ctx.aliases, *ctx.us);
          env.set_known(index_loc, Value::integer(lov));
          LValue lv;
          lv.name = s.index;
          lv.pos = s.pos;
          StmtPtr res = rebuilt(
              s, Stmt::assign(std::move(lv), Expr::literal(Value::integer(lov), s.pos),
                              s.pos));
          record(ctx, s, *res);
          return {{res}, env};
        }
      }
    }

    AbstractEnv killed = env;
    std::set<Location> mods = body_mod_locations(s.body, *ctx.us, p_, symtab_, mods_);
    mods.insert(index_loc);
    for (const auto& l : mods) kill_with_aliases(killed, l, ctx.aliases, *ctx.us);

    BodyResult body_res = simplify_body(s.body, killed, ctx);
    StmtPtr res = rebuilt(s, Stmt::do_loop(s.index, lo.expr, hi.expr,
                                           s.step ? step.expr : nullptr,
                                           std::move(body_res.stmts), s.pos));
    record(ctx, s, *res);
    return {{res}, join_env(killed, body_res.env)};
  }

  BodyResult simplify_do_while(const Stmt& s, AbstractEnv env, UnitCtx& ctx) {
    AbstractEnv killed = env;
    std::set<Location> mods = body_mod_locations(s.body, *ctx.us, p_, symtab_, mods_);
    for (const auto& l : mods) kill_with_aliases(killed, l, ctx.aliases, *ctx.us);

    SimplifiedExpr cond = simplify_expr(s.cond, killed, ctx);
    AbstractValue entry_value = eval_abstract(*cond.expr, env, *ctx.us, symtab_, {});
    if (cond.value.known && !cond.value.value.b && entry_value.known &&
        !entry_value.value.b) {
      mark_removed(ctx, s, "never-entered");
      return {{}, env};
    }

    BodyResult body_res = simplify_body(s.body, killed, ctx);
    StmtPtr res = rebuilt(s, Stmt::do_while(cond.expr, std::move(body_res.stmts), s.pos));
    record(ctx, s, *res);
    return {{res}, join_env(killed, body_res.env)};
  }

  BodyResult simplify_call(const Stmt& s, AbstractEnv env, UnitCtx& ctx) {
    std::vector<ExprPtr> args = simplify_call_args(s.callee, s.args, env, ctx);
    std::string target = resolve_callee_variant(s.callee, args, env, ctx);
    AbstractEnv out = apply_call_effect(args, *ctx.us, env, *p_.find_unit(s.callee),
                                        mods_.at(s.callee), ctx.aliases);
    StmtPtr res = rebuilt(s, Stmt::call(target, std::move(args), s.pos));
    record(ctx, s, *res);
    return {{res}, out};
  }

  const Program& p_;
  const SymbolTable& symtab_;
  const ConstraintSet& cs_;
  SpecializeConfig config_;
  ModSummaries mods_;
  std::vector<ResolvedConstraint> resolved_;

  std::vector<CacheEntry> cache_;
  std::set<std::string> recursive_;
  std::map<std::string, int> ordinals_;
  Report report_;
  std::vector<std::string> eval_notes_;
  std::vector<std::string> eval_facts_;
};

}  // namespace

SpecializeResult specialize_program(const Program& p, const SymbolTable& symtab,
                                    const ConstraintSet& cs,
                                    const SpecializeConfig& config) {
  return Specializer(p, symtab, cs, config).run();
}

}  // namespace residua
