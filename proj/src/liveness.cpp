#include <algorithm>

#include "residua/pretty.hpp"
#include "residua/specialize.hpp"

namespace residua {

namespace detail {
bool expr_has_call(const Expr& e);
bool removal_safe(const Expr& e, const UnitSymbols& us);
}  // namespace detail

namespace {

using LiveSet = std::set<Location>;

void collect_reads(const Expr& e, const UnitSymbols& us, LiveSet& out) {
  switch (e.kind) {
    case Expr::Kind::Var: {
      const Symbol* s = us.find(e.name);
      if (s && s->kind != Symbol::Kind::Parameter) out.insert(us.location_of(e.name));
      break;
    }
    case Expr::Kind::ArrayElem: {
      const Symbol* s = us.find(e.name);
      if (s && s->kind != Symbol::Kind::Parameter) out.insert(us.location_of(e.name));
      break;
    }
    default:
      break;
  }
  for (const auto& a : e.args) collect_reads(*a, us, out);
}

class Cleaner {
 public:
  Cleaner(const Unit& origin, const UnitSymbols& us, const SymbolTable& symtab,
          const ModSummaries& mods, const ReplacementPolicy& policy,
          const AliasPartition& aliases, VariantRecord* record)
      : origin_(origin),
        us_(us),
        symtab_(symtab),
        mods_(mods),
        policy_(policy),
        aliases_(aliases),
        record_(record) {}

  Body run(Body body) {
    // exit-live seed: a function's result must survive to the end
    if (origin_.kind == UnitKind::Function)
      exit_live_.insert(us_.location_of(origin_.name));
    bool changed = true;
    while (changed) {
      changed_ = false;
      LiveSet live = exit_live_;
      body = pass(std::move(body), live, /*mutate=*/true);
      changed = changed_;
    }
    return body;
  }

 private:
  bool removable_target(const LValue& target) const {
    if (target.index) return false;
    const Symbol* s = us_.find(target.name);
    if (!s || s->kind != Symbol::Kind::Local || s->is_array()) return false;
    if (origin_.kind == UnitKind::Function && target.name == origin_.name) return false;
    if (policy_.keep.count(target.name)) return false;
    Location loc = us_.location_of(target.name);
    if (aliases_.pessimistic) {
      // plain locals cannot alias anything even pessimistically
    } else if (!aliases_.singleton(loc)) {
      return false;
    }
    return true;
  }

  bool rhs_safe(const Expr& e) const { return detail::removal_safe(e, us_); }

  void record_removed(const Stmt& s) {
    if (!record_) return;
    auto it = record_->stmts.find(s.prov);
    StmtRecord r;
    r.prov = s.prov;
    r.old_text = it != record_->stmts.end() ? it->second.old_text : stmt_header_text(s);
    r.disposition = Disposition::Removed;
    r.reason = "dead-assignment";
    record_->stmts[s.prov] = std::move(r);
  }

  void record_empty_if_removed(const Stmt& s) {
    if (!record_) return;
    auto it = record_->stmts.find(s.prov);
    StmtRecord r;
    r.prov = s.prov;
    r.old_text = it != record_->stmts.end() ? it->second.old_text : stmt_header_text(s);
    r.disposition = Disposition::Removed;
    r.reason = "empty-if";
    record_->stmts[s.prov] = std::move(r);
  }

  void record_continue_stub(ProvId prov) {
    if (!record_) return;
    auto it = record_->stmts.find(prov);
    StmtRecord r;
    r.prov = prov;
    r.old_text = it != record_->stmts.end() ? it->second.old_text : "";
    r.disposition = Disposition::Simplified;
    r.new_text = "CONTINUE";
    record_->stmts[prov] = std::move(r);
  }

  // One backward sweep. In analyze mode (mutate=false) the same removal
  // decisions are simulated so loop fixpoints see the post-removal reads.
  Body pass(Body body, LiveSet& live, bool mutate) {
    Body out;
    out.reserve(body.size());
    std::vector<ProvId> removed_here;
    for (auto it = body.rbegin(); it != body.rend(); ++it) {
      StmtPtr s = *it;
      switch (s->kind) {
        case Stmt::Kind::Assign: {
          Location loc{};
          bool removable = removable_target(s->target);
          if (removable) loc = us_.location_of(s->target.name);
          if (removable && !live.count(loc) && rhs_safe(*s->value)) {
            if (mutate) {
              record_removed(*s);
              changed_ = true;
              removed_provs_.push_back(s->prov);
            }
            continue;  // dropped: its reads never happen
          }
          const Symbol* sym = us_.find(s->target.name);
          if (!s->target.index && sym && !sym->is_array() &&
              sym->kind != Symbol::Kind::Formal) {
            // definite overwrite of a scalar ends its liveness
            live.erase(us_.location_of(s->target.name));
          }
          collect_reads(*s->value, us_, live);
          if (s->target.index) collect_reads(*s->target.index, us_, live);
          out.push_back(s);
          break;
        }
        case Stmt::Kind::If: {
          size_t stubs_before = removed_provs_.size();
          LiveSet then_live = live;
          LiveSet else_live = live;
          Body then_body = pass(s->then_body, then_live, mutate);
          Body else_body = pass(s->else_body, else_live, mutate);
          LiveSet merged;
          std::set_union(then_live.begin(), then_live.end(), else_live.begin(),
                         else_live.end(), std::inserter(merged, merged.begin()));
          live = std::move(merged);
          bool had_stmts = !s->then_body.empty() || !s->else_body.empty();
          if (had_stmts && then_body.empty() && else_body.empty()) {
            if (rhs_safe(*s->cond)) {
              if (mutate) {
                record_empty_if_removed(*s);
                changed_ = true;
              }
              continue;  // condition never evaluates; its reads stay dead
            }
            // effectful condition: keep the IF alive with a CONTINUE
            // standing in for a statement just removed from its arms
            if (mutate && removed_provs_.size() > stubs_before) {
              ProvId stub = removed_provs_.back();
              removed_provs_.pop_back();
              collect_reads(*s->cond, us_, live);
              StmtPtr cont = Stmt::simple(Stmt::Kind::Continue, s->pos);
              cont->prov = stub;
              record_continue_stub(stub);
              StmtPtr rebuilt = std::make_shared<Stmt>(*s);
              rebuilt->then_body = {cont};
              rebuilt->else_body = {};
              out.push_back(rebuilt);
              changed_ = true;
              break;
            }
          }
          collect_reads(*s->cond, us_, live);
          if (mutate && (then_body != s->then_body || else_body != s->else_body)) {
            StmtPtr rebuilt = std::make_shared<Stmt>(*s);
            rebuilt->then_body = std::move(then_body);
            rebuilt->else_body = std::move(else_body);
            out.push_back(rebuilt);
          } else {
            out.push_back(s);
          }
          break;
        }
        case Stmt::Kind::DoLoop:
        case Stmt::Kind::DoWhile: {
          // widen to a fixpoint before transforming the body once
          LiveSet widened = live;
          loop_head_reads(*s, widened);
          while (true) {
            LiveSet probe = widened;
            Body scratch = s->body;
            (void)pass(std::move(scratch), probe, /*mutate=*/false);
            LiveSet next;
            std::set_union(widened.begin(), widened.end(), probe.begin(), probe.end(),
                           std::inserter(next, next.begin()));
            if (next == widened) break;
            widened = std::move(next);
          }
          Body new_body = pass(s->body, widened, mutate);
          live = widened;
          if (mutate && new_body != s->body) {
            StmtPtr rebuilt = std::make_shared<Stmt>(*s);
            rebuilt->body = std::move(new_body);
            out.push_back(rebuilt);
          } else {
            out.push_back(s);
          }
          break;
        }
        case Stmt::Kind::Call:
          for (const auto& a : s->args) collect_reads(*a, us_, live);
          out.push_back(s);
          break;
        case Stmt::Kind::Print:
          for (const auto& a : s->args) collect_reads(*a, us_, live);
          out.push_back(s);
          break;
        case Stmt::Kind::Read:
          for (const auto& t : s->targets)
            if (t.index) collect_reads(*t.index, us_, live);
          out.push_back(s);
          break;
        case Stmt::Kind::Return:
        case Stmt::Kind::Stop:
          // control leaves here; earlier statements only feed this path
          live = exit_live_;
          out.push_back(s);
          break;
        case Stmt::Kind::Continue:
          out.push_back(s);
          break;
      }
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  void loop_head_reads(const Stmt& s, LiveSet& live) {
    if (s.kind == Stmt::Kind::DoLoop) {
      collect_reads(*s.lo, us_, live);
      collect_reads(*s.hi, us_, live);
      if (s.step) collect_reads(*s.step, us_, live);
      live.insert(us_.location_of(s.index));
    } else {
      collect_reads(*s.cond, us_, live);
    }
  }

  const Unit& origin_;
  const UnitSymbols& us_;
  const SymbolTable& symtab_;
  const ModSummaries& mods_;
  const ReplacementPolicy& policy_;
  const AliasPartition& aliases_;
  VariantRecord* record_;
  LiveSet exit_live_;
  bool changed_ = false;
  std::vector<ProvId> removed_provs_;
};

}  // namespace

Body liveness_cleanup(const Body& body, const Unit& origin, const UnitSymbols& us,
                      const SymbolTable& symtab, const ModSummaries& mods,
                      const ReplacementPolicy& policy, const AliasPartition& aliases,
                      VariantRecord* record) {
  return Cleaner(origin, us, symtab, mods, policy, aliases, record).run(body);
}

// ---- structure invariants ----

namespace {

void collect_var_idents(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var || e.kind == Expr::Kind::ArrayElem) out.insert(e.name);
  for (const auto& a : e.args) collect_var_idents(*a, out);
}

void collect_unit_idents(const Unit& u, std::set<std::string>& vars,
                         std::set<std::string>& callees) {
  for (const auto& d : u.decls) {
    if (d.kind == Decl::Kind::Var)
      for (const auto& i : d.items) vars.insert(i.name);
    if (d.kind == Decl::Kind::Parameter)
      for (const auto& [n, v] : d.params) vars.insert(n);
    if (d.kind == Decl::Kind::Common)
      for (const auto& m : d.members) vars.insert(m);
  }
  for (const auto& f : u.formals) vars.insert(f);
  std::function<void(const Expr&)> scan_calls = [&](const Expr& e) {
    if (e.kind == Expr::Kind::FuncCall) callees.insert(e.name);
    for (const auto& a : e.args) scan_calls(*a);
  };
  for_each_stmt(u.body, [&](const Stmt& s) {
    if (s.kind == Stmt::Kind::Assign) vars.insert(s.target.name);
    if (s.kind == Stmt::Kind::DoLoop) vars.insert(s.index);
    if (s.kind == Stmt::Kind::Call) callees.insert(s.callee);
    for (const auto& t : s.targets) vars.insert(t.name);
    for (const ExprPtr& e : {s.value, s.cond, s.lo, s.hi, s.step}) {
      if (!e) continue;
      collect_var_idents(*e, vars);
      scan_calls(*e);
    }
    if (s.target.index) {
      collect_var_idents(*s.target.index, vars);
      scan_calls(*s.target.index);
    }
    for (const auto& a : s.args) {
      collect_var_idents(*a, vars);
      scan_calls(*a);
    }
    for (const auto& t : s.targets) {
      if (t.index) {
        collect_var_idents(*t.index, vars);
        scan_calls(*t.index);
      }
    }
  });
}

}  // namespace

std::vector<std::string> check_structure(const Program& original,
                                         const Program& residual, const Report& report) {
  std::vector<std::string> violations;
  auto flag = [&](std::string v) { violations.push_back(std::move(v)); };

  std::map<ProvId, std::string> prov_owner;
  std::map<std::string, int> original_counts;
  std::map<std::string, std::set<ProvId>> original_provs;
  for (const auto& u : original.units) {
    original_counts[u.name] = count_stmts(u.body);
    for_each_stmt(u.body, [&](const Stmt& s) {
      prov_owner[s.prov] = u.name;
      original_provs[u.name].insert(s.prov);
    });
  }

  std::set<std::string> orig_vars, orig_callees, orig_units;
  for (const auto& u : original.units) {
    orig_units.insert(u.name);
    collect_unit_idents(u, orig_vars, orig_callees);
  }
  std::set<std::string> residual_unit_names;
  for (const auto& u : residual.units) residual_unit_names.insert(u.name);

  for (const auto& u : residual.units) {
    const VariantRecord* rec = report.find_variant(u.name);
    std::string origin_name = rec ? rec->origin : u.name;
    if (!original_counts.count(origin_name)) {
      flag("residual unit " + u.name + " has no original counterpart " + origin_name);
      continue;
    }
    int count = count_stmts(u.body);
    if (count > original_counts[origin_name])
      flag(u.name + ": statement count " + std::to_string(count) + " exceeds original " +
           std::to_string(original_counts[origin_name]));
    for_each_stmt(u.body, [&](const Stmt& s) {
      auto it = prov_owner.find(s.prov);
      if (it == prov_owner.end())
        flag(u.name + ": statement with unknown ProvId " + std::to_string(s.prov));
      else if (it->second != origin_name)
        flag(u.name + ": ProvId " + std::to_string(s.prov) + " crossed from unit " +
             it->second);
    });

    std::set<std::string> vars, callees;
    collect_unit_idents(u, vars, callees);
    if (u.kind == UnitKind::Function) vars.erase(u.name);  // the result variable
    for (const auto& v : vars) {
      if (!orig_vars.count(v)) flag(u.name + ": new identifier " + v);
    }
    for (const auto& c : callees) {
      if (!orig_units.count(c) && !residual_unit_names.count(c))
        flag(u.name + ": call to unknown unit " + c);
    }
  }

  // ledger accounting: per variant, exactly the origin's ProvIds; removed
  // statements absent from the residual, others present
  for (const auto& rec : report.variants) {
    auto oit = original_provs.find(rec.origin);
    if (oit == original_provs.end()) {
      flag("variant " + rec.name + " has unknown origin " + rec.origin);
      continue;
    }
    std::set<ProvId> recorded;
    for (const auto& [prov, sr] : rec.stmts) recorded.insert(prov);
    if (recorded != oit->second)
      flag("variant " + rec.name + ": ledger does not account for exactly the ProvIds of " +
           rec.origin);
    const Unit* ru = residual.find_unit(rec.name);
    if (!ru) continue;  // variant superseded by a rename
    std::set<ProvId> present;
    for_each_stmt(ru->body, [&](const Stmt& s) { present.insert(s.prov); });
    for (const auto& [prov, sr] : rec.stmts) {
      bool in_body = present.count(prov) > 0;
      if (sr.disposition == Disposition::Removed && in_body)
        flag("variant " + rec.name + ": ProvId " + std::to_string(prov) +
             " recorded Removed but present");
      if (sr.disposition != Disposition::Removed && !in_body)
        flag("variant " + rec.name + ": ProvId " + std::to_string(prov) +
             " recorded " +
             (sr.disposition == Disposition::Kept ? "Kept" : "Simplified") +
             " but absent");
    }
  }
  return violations;
}

}  // namespace residua
