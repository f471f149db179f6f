#include "residua/symbols.hpp"

namespace residua {

Location Location::local(std::string unit, std::string name, bool array) {
  Location l;
  l.kind = Kind::Local;
  l.unit = std::move(unit);
  l.name = std::move(name);
  l.whole_array = array;
  return l;
}

Location Location::common(std::string block, int cell, int span, bool array) {
  Location l;
  l.kind = Kind::Common;
  l.block = std::move(block);
  l.cell = cell;
  l.span = span;
  l.whole_array = array;
  return l;
}

std::string Location::str() const {
  if (kind == Kind::Local) {
    return unit + "." + name + (whole_array ? "(*)" : "");
  }
  return "/" + block + "/(" + std::to_string(cell) +
         (span > 1 ? ".." + std::to_string(cell + span - 1) : "") + ")" +
         (whole_array ? "(*)" : "");
}

const Symbol* UnitSymbols::find(const std::string& name) const {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &it->second;
}

const Symbol& UnitSymbols::get(const std::string& name) const {
  const Symbol* s = find(name);
  if (!s)
    throw CompileError(ErrorKind::InternalError,
                       "symbol " + name + " missing in unit " + unit_name);
  return *s;
}

Location UnitSymbols::location_of(const std::string& name) const {
  const Symbol& s = get(name);
  if (s.kind == Symbol::Kind::CommonMember)
    return Location::common(s.common_block, s.common_cell,
                            s.is_array() ? s.array_size : 1, s.is_array());
  return Location::local(unit_name, name, s.is_array());
}

const UnitSymbols& SymbolTable::unit(const std::string& name) const {
  auto it = units.find(name);
  if (it == units.end())
    throw CompileError(ErrorKind::InternalError, "no symbols for unit " + name);
  return it->second;
}

namespace {

class Resolver {
 public:
  explicit Resolver(const Program& p) : p_(p) {}

  SymbolTable run() {
    for (const auto& u : p_.units) build_unit(u);
    for (const auto& u : p_.units) check_unit(u);
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(ErrorKind kind, const SourcePos& pos, const std::string& msg) {
    throw CompileError(kind, pos, msg);
  }

  void build_unit(const Unit& u) {
    UnitSymbols us;
    us.unit_name = u.name;
    us.unit_kind = u.kind;
    us.result_type = u.result_type;

    // Pass 1: PARAMETER constants and typed declarations.
    for (const auto& d : u.decls) {
      if (d.kind == Decl::Kind::Parameter) {
        for (const auto& [name, value] : d.params) {
          if (us.by_name.count(name))
            fail(ErrorKind::ParameterRedefinition, d.pos,
                 name + " already declared in unit " + u.name);
          Symbol s;
          s.kind = Symbol::Kind::Parameter;
          s.type = value.type;
          s.param_value = value;
          us.by_name[name] = s;
        }
      }
    }
    for (const auto& d : u.decls) {
      if (d.kind != Decl::Kind::Var) continue;
      for (const auto& item : d.items) {
        if (us.by_name.count(item.name)) {
          if (us.by_name[item.name].kind == Symbol::Kind::Parameter)
            fail(ErrorKind::ParameterRedefinition, item.pos,
                 item.name + " is a PARAMETER and cannot be re-declared");
          fail(ErrorKind::DuplicateDeclaration, item.pos,
               item.name + " declared twice in unit " + u.name);
        }
        Symbol s;
        s.kind = Symbol::Kind::Local;
        s.type = d.type;
        if (item.dim > 0) {
          s.array_size = item.dim;
        } else if (!item.dim_param.empty()) {
          const Symbol* ps = us.find(item.dim_param);
          if (!ps || ps->kind != Symbol::Kind::Parameter ||
              ps->type != Type::Integer)
            fail(ErrorKind::UndeclaredVariable, item.pos,
                 "array bound " + item.dim_param + " is not an INTEGER PARAMETER");
          s.array_size = static_cast<int>(ps->param_value.i);
        }
        if ((item.dim > 0 || !item.dim_param.empty()) && s.array_size <= 0)
          fail(ErrorKind::ParseError, item.pos,
               "array bound of " + item.name + " must be positive");
        us.by_name[item.name] = s;
      }
    }

    // Formals must be declared and pairwise distinct.
    for (size_t i = 0; i < u.formals.size(); ++i) {
      const std::string& f = u.formals[i];
      for (size_t j = i + 1; j < u.formals.size(); ++j)
        if (u.formals[j] == f)
          fail(ErrorKind::ParseError, {u.source_file, 1, 1},
               "duplicate formal " + f + " in unit " + u.name);
      auto it = us.by_name.find(f);
      if (it == us.by_name.end())
        fail(ErrorKind::UndeclaredVariable, {u.source_file, 1, 1},
             "formal " + f + " of unit " + u.name + " has no type declaration");
      if (it->second.kind != Symbol::Kind::Local)
        fail(ErrorKind::TypeMismatch, {u.source_file, 1, 1},
             "formal " + f + " conflicts with a PARAMETER or COMMON member");
      it->second.kind = Symbol::Kind::Formal;
      it->second.formal_index = static_cast<int>(i);
    }

    // The function result behaves like a typed local named after the unit.
    if (u.kind == UnitKind::Function) {
      if (us.by_name.count(u.name))
        fail(ErrorKind::DuplicateDeclaration, {u.source_file, 1, 1},
             "function result " + u.name + " must not be declared");
      Symbol s;
      s.kind = Symbol::Kind::Local;
      s.type = u.result_type;
      us.by_name[u.name] = s;
    }

    // COMMON membership and block layouts.
    for (const auto& d : u.decls) {
      if (d.kind != Decl::Kind::Common) continue;
      std::vector<Type> cells;
      for (const auto& m : d.members) {
        auto it = us.by_name.find(m);
        if (it == us.by_name.end())
          fail(ErrorKind::UndeclaredVariable, d.pos,
               "COMMON member " + m + " has no type declaration in unit " + u.name);
        Symbol& s = it->second;
        if (s.kind == Symbol::Kind::Parameter)
          fail(ErrorKind::TypeMismatch, d.pos, "PARAMETER " + m + " cannot be in COMMON");
        if (s.kind == Symbol::Kind::Formal)
          fail(ErrorKind::TypeMismatch, d.pos, "formal " + m + " cannot be in COMMON");
        if (s.kind == Symbol::Kind::CommonMember)
          fail(ErrorKind::CommonLayoutMismatch, d.pos,
               m + " appears in more than one COMMON block in unit " + u.name);
        s.kind = Symbol::Kind::CommonMember;
        s.common_block = d.block;
        s.common_cell = static_cast<int>(cells.size());
        int n = s.is_array() ? s.array_size : 1;
        for (int i = 0; i < n; ++i) cells.push_back(s.type);
      }
      auto layout = out_.common_layout.find(d.block);
      if (layout == out_.common_layout.end()) {
        out_.common_layout[d.block] = cells;
      } else if (layout->second != cells) {
        fail(ErrorKind::CommonLayoutMismatch, d.pos,
             "COMMON /" + d.block + "/ in unit " + u.name +
                 " does not match the layout declared elsewhere");
      }
    }

    out_.units[u.name] = std::move(us);
  }

  // ---- type checking ----

  void check_unit(const Unit& u) {
    const UnitSymbols& us = out_.units.at(u.name);
    check_body(u.body, us);
  }

  void check_body(const Body& body, const UnitSymbols& us) {
    for (const auto& s : body) check_stmt(*s, us);
  }

  void check_stmt(const Stmt& s, const UnitSymbols& us) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        Type target = check_lvalue(s.target, us);
        Type rhs = check_expr(*s.value, us);
        require_assignable(target, rhs, s.pos);
        break;
      }
      case Stmt::Kind::If: {
        if (check_expr(*s.cond, us) != Type::Logical)
          fail(ErrorKind::TypeMismatch, s.pos, "IF condition must be LOGICAL");
        check_body(s.then_body, us);
        check_body(s.else_body, us);
        break;
      }
      case Stmt::Kind::DoLoop: {
        const Symbol* idx = us.find(s.index);
        if (!idx || idx->kind == Symbol::Kind::Parameter)
          fail(ErrorKind::UndeclaredVariable, s.pos,
               "DO index " + s.index + " is not a variable");
        if (idx->type != Type::Integer || idx->is_array())
          fail(ErrorKind::TypeMismatch, s.pos, "DO index must be an INTEGER scalar");
        for (const ExprPtr& e : {s.lo, s.hi, s.step}) {
          if (e && check_expr(*e, us) != Type::Integer)
            fail(ErrorKind::TypeMismatch, s.pos, "DO bounds must be INTEGER");
        }
        check_body(s.body, us);
        break;
      }
      case Stmt::Kind::DoWhile: {
        if (check_expr(*s.cond, us) != Type::Logical)
          fail(ErrorKind::TypeMismatch, s.pos, "DO WHILE condition must be LOGICAL");
        check_body(s.body, us);
        break;
      }
      case Stmt::Kind::Call: {
        const Unit* callee = p_.find_unit(s.callee);
        if (!callee || callee->kind != UnitKind::Subroutine)
          fail(ErrorKind::UnresolvedCallee, s.pos,
               "CALL target " + s.callee + " is not a SUBROUTINE");
        check_args(s.callee, s.args, us, s.pos);
        break;
      }
      case Stmt::Kind::Print:
        for (const auto& a : s.args) check_expr(*a, us);
        break;
      case Stmt::Kind::Read:
        for (const auto& t : s.targets) check_lvalue(t, us);
        break;
      case Stmt::Kind::Return:
      case Stmt::Kind::Stop:
      case Stmt::Kind::Continue:
        break;
    }
  }

  Type check_lvalue(const LValue& lv, const UnitSymbols& us) {
    const Symbol* s = us.find(lv.name);
    if (!s)
      fail(ErrorKind::UndeclaredVariable, lv.pos,
           lv.name + " used but not declared in unit " + us.unit_name);
    if (s->kind == Symbol::Kind::Parameter)
      fail(ErrorKind::TypeMismatch, lv.pos, "PARAMETER " + lv.name + " cannot be assigned");
    if (lv.index) {
      if (!s->is_array())
        fail(ErrorKind::TypeMismatch, lv.pos, lv.name + " is not an array");
      if (check_expr(*lv.index, us) != Type::Integer)
        fail(ErrorKind::TypeMismatch, lv.pos, "array subscript must be INTEGER");
    } else if (s->is_array()) {
      fail(ErrorKind::TypeMismatch, lv.pos,
           "whole array " + lv.name + " cannot be an assignment or READ target");
    }
    return s->type;
  }

  void require_assignable(Type target, Type rhs, const SourcePos& pos) {
    if (target == rhs) return;
    bool numeric = (target == Type::Integer || target == Type::Real) &&
                   (rhs == Type::Integer || rhs == Type::Real);
    if (!numeric)
      fail(ErrorKind::TypeMismatch, pos,
           std::string("cannot assign ") + type_name(rhs) + " to " + type_name(target));
  }

  void check_args(const std::string& callee_name, const std::vector<ExprPtr>& args,
                  const UnitSymbols& caller, const SourcePos& pos) {
    const Unit* callee = p_.find_unit(callee_name);
    const UnitSymbols& cs = out_.units.at(callee_name);
    if (args.size() != callee->formals.size())
      fail(ErrorKind::ArityMismatch, pos,
           callee_name + " expects " + std::to_string(callee->formals.size()) +
               " argument(s), got " + std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i) {
      const Symbol& formal = cs.get(callee->formals[i]);
      const Expr& a = *args[i];
      if (formal.is_array()) {
        if (a.kind != Expr::Kind::Var)
          fail(ErrorKind::ArgumentTypeMismatch, a.pos,
               "argument " + std::to_string(i + 1) + " of " + callee_name +
                   " must be a whole array variable");
        const Symbol* as = caller.find(a.name);
        if (!as)
          fail(ErrorKind::UndeclaredVariable, a.pos, a.name + " not declared");
        if (!as->is_array() || as->type != formal.type ||
            as->array_size != formal.array_size)
          fail(ErrorKind::ArgumentTypeMismatch, a.pos,
               "array argument " + a.name + " must match " + callee->formals[i] +
                   " (" + type_name(formal.type) + "(" +
                   std::to_string(formal.array_size) + "))");
        continue;
      }
      Type at = check_expr(a, caller);
      bool lvalue = a.kind == Expr::Kind::ArrayElem ||
                    (a.kind == Expr::Kind::Var &&
                     caller.get(a.name).kind != Symbol::Kind::Parameter);
      if (lvalue) {
        // by-reference: storage is reinterpreted, so types must match exactly
        if (at != formal.type)
          fail(ErrorKind::ArgumentTypeMismatch, a.pos,
               "argument " + std::to_string(i + 1) + " of " + callee_name + " is " +
                   type_name(at) + ", formal is " + type_name(formal.type));
      } else {
        if (at != formal.type && !(at == Type::Integer && formal.type == Type::Real))
          fail(ErrorKind::ArgumentTypeMismatch, a.pos,
               "argument " + std::to_string(i + 1) + " of " + callee_name + " is " +
                   type_name(at) + ", formal is " + type_name(formal.type));
      }
    }
  }

  Type check_expr(const Expr& e, const UnitSymbols& us) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return e.lit.type;
      case Expr::Kind::Var: {
        const Symbol* s = us.find(e.name);
        if (!s)
          fail(ErrorKind::UndeclaredVariable, e.pos,
               e.name + " used but not declared in unit " + us.unit_name);
        if (s->is_array())
          fail(ErrorKind::TypeMismatch, e.pos,
               "whole array " + e.name + " used where a scalar value is expected");
        return s->type;
      }
      case Expr::Kind::ArrayElem: {
        const Symbol* s = us.find(e.name);
        if (!s)
          fail(ErrorKind::UndeclaredVariable, e.pos,
               e.name + " used but not declared in unit " + us.unit_name);
        if (!s->is_array())
          fail(ErrorKind::TypeMismatch, e.pos, e.name + " is not an array");
        if (check_expr(*e.args[0], us) != Type::Integer)
          fail(ErrorKind::TypeMismatch, e.pos, "array subscript must be INTEGER");
        return s->type;
      }
      case Expr::Kind::Unary: {
        Type t = check_expr(*e.args[0], us);
        if (e.un == UnaryOp::Neg) {
          if (t != Type::Integer && t != Type::Real)
            fail(ErrorKind::TypeMismatch, e.pos, "unary '-' needs a numeric operand");
          return t;
        }
        if (t != Type::Logical)
          fail(ErrorKind::TypeMismatch, e.pos, ".NOT. needs a LOGICAL operand");
        return Type::Logical;
      }
      case Expr::Kind::Binary: {
        Type l = check_expr(*e.args[0], us);
        Type r = check_expr(*e.args[1], us);
        switch (e.bin) {
          case BinOp::Add:
          case BinOp::Sub:
          case BinOp::Mul:
          case BinOp::Div:
          case BinOp::Pow: {
            bool ln = l == Type::Integer || l == Type::Real;
            bool rn = r == Type::Integer || r == Type::Real;
            if (!ln || !rn)
              fail(ErrorKind::TypeMismatch, e.pos,
                   std::string("arithmetic on ") + type_name(l) + " and " + type_name(r));
            return (l == Type::Real || r == Type::Real) ? Type::Real : Type::Integer;
          }
          case BinOp::Eq:
          case BinOp::Ne:
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge: {
            bool numeric = (l == Type::Integer || l == Type::Real) &&
                           (r == Type::Integer || r == Type::Real);
            bool chars = l == Type::Character && r == Type::Character;
            if (!numeric && !chars)
              fail(ErrorKind::TypeMismatch, e.pos,
                   std::string("cannot compare ") + type_name(l) + " with " + type_name(r));
            return Type::Logical;
          }
          case BinOp::And:
          case BinOp::Or:
            if (l != Type::Logical || r != Type::Logical)
              fail(ErrorKind::TypeMismatch, e.pos,
                   std::string(binop_text(e.bin)) + " needs LOGICAL operands");
            return Type::Logical;
        }
        return Type::Integer;
      }
      case Expr::Kind::FuncCall: {
        const Unit* callee = p_.find_unit(e.name);
        if (!callee || callee->kind != UnitKind::Function)
          fail(ErrorKind::UnresolvedCallee, e.pos,
               e.name + " is not a FUNCTION unit (intrinsics are not supported)");
        check_args(e.name, e.args, us, e.pos);
        return callee->result_type;
      }
    }
    return Type::Integer;
  }

  const Program& p_;
  SymbolTable out_;
};

}  // namespace

SymbolTable resolve_symbols(const Program& p) { return Resolver(p).run(); }

Type expr_type(const Expr& e, const UnitSymbols& us, const SymbolTable& symtab) {
  switch (e.kind) {
    case Expr::Kind::Literal: return e.lit.type;
    case Expr::Kind::Var:
    case Expr::Kind::ArrayElem: return us.get(e.name).type;
    case Expr::Kind::Unary: return expr_type(*e.args[0], us, symtab);
    case Expr::Kind::Binary:
      switch (e.bin) {
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Pow: {
          Type l = expr_type(*e.args[0], us, symtab);
          Type r = expr_type(*e.args[1], us, symtab);
          return (l == Type::Real || r == Type::Real) ? Type::Real : Type::Integer;
        }
        default: return Type::Logical;
      }
    case Expr::Kind::FuncCall: {
      auto it = symtab.units.find(e.name);
      if (it == symtab.units.end())
        throw CompileError(ErrorKind::UnresolvedCallee, e.pos, "unknown function " + e.name);
      return it->second.result_type;
    }
  }
  return Type::Integer;
}

}  // namespace residua
