#include "residua/ast.hpp"

#include <algorithm>

namespace residua {

const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Pow: return "**";
    case BinOp::Eq: return ".EQ.";
    case BinOp::Ne: return ".NE.";
    case BinOp::Lt: return ".LT.";
    case BinOp::Le: return ".LE.";
    case BinOp::Gt: return ".GT.";
    case BinOp::Ge: return ".GE.";
    case BinOp::And: return ".AND.";
    case BinOp::Or: return ".OR.";
  }
  return "?";
}

ExprPtr Expr::literal(Value v, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Literal;
  e->lit = std::move(v);
  e->pos = std::move(p);
  return e;
}

ExprPtr Expr::var(std::string name, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  e->pos = std::move(p);
  return e;
}

ExprPtr Expr::array_elem(std::string name, ExprPtr index, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::ArrayElem;
  e->name = std::move(name);
  e->args.push_back(std::move(index));
  e->pos = std::move(p);
  return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr operand, SourcePos p) {
  // canonical form: negated numeric literals are literals
  if (op == UnaryOp::Neg && operand->kind == Kind::Literal && operand->lit.is_numeric()) {
    Value v = operand->lit;
    if (v.type == Type::Integer) v.i = -v.i;
    else v.r = -v.r;
    return literal(std::move(v), std::move(p));
  }
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->un = op;
  e->args.push_back(std::move(operand));
  e->pos = std::move(p);
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->bin = op;
  e->args.push_back(std::move(lhs));
  e->args.push_back(std::move(rhs));
  e->pos = std::move(p);
  return e;
}

ExprPtr Expr::func_call(std::string name, std::vector<ExprPtr> args, SourcePos p) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::FuncCall;
  e->name = std::move(name);
  e->args = std::move(args);
  e->pos = std::move(p);
  return e;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Literal:
      if (!a.lit.bits_equal(b.lit)) return false;
      break;
    case Expr::Kind::Var:
    case Expr::Kind::ArrayElem:
    case Expr::Kind::FuncCall:
      if (a.name != b.name) return false;
      break;
    case Expr::Kind::Unary:
      if (a.un != b.un) return false;
      break;
    case Expr::Kind::Binary:
      if (a.bin != b.bin) return false;
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool lvalue_equal(const LValue& a, const LValue& b) {
  if (a.name != b.name) return false;
  if ((a.index == nullptr) != (b.index == nullptr)) return false;
  return !a.index || expr_equal(*a.index, *b.index);
}

StmtPtr Stmt::assign(LValue target, ExprPtr value, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Assign;
  s->target = std::move(target);
  s->value = std::move(value);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::if_stmt(ExprPtr cond, Body then_body, Body else_body, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::If;
  s->cond = std::move(cond);
  s->then_body = std::move(then_body);
  s->else_body = std::move(else_body);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::do_loop(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr step,
                      Body body, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::DoLoop;
  s->index = std::move(index);
  s->lo = std::move(lo);
  s->hi = std::move(hi);
  s->step = std::move(step);
  s->body = std::move(body);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::do_while(ExprPtr cond, Body body, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::DoWhile;
  s->cond = std::move(cond);
  s->body = std::move(body);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::call(std::string callee, std::vector<ExprPtr> args, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Call;
  s->callee = std::move(callee);
  s->args = std::move(args);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::simple(Kind k, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::print(std::vector<ExprPtr> args, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Print;
  s->args = std::move(args);
  s->pos = std::move(p);
  return s;
}

StmtPtr Stmt::read(std::vector<LValue> targets, SourcePos p) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::Read;
  s->targets = std::move(targets);
  s->pos = std::move(p);
  return s;
}

namespace {
bool expr_ptr_equal(const ExprPtr& a, const ExprPtr& b) {
  if ((a == nullptr) != (b == nullptr)) return false;
  return !a || expr_equal(*a, *b);
}
}  // namespace

bool stmt_equal(const Stmt& a, const Stmt& b, bool compare_prov) {
  if (a.kind != b.kind) return false;
  if (compare_prov && a.prov != b.prov) return false;
  if (a.comments != b.comments) return false;
  switch (a.kind) {
    case Stmt::Kind::Assign:
      return lvalue_equal(a.target, b.target) && expr_equal(*a.value, *b.value);
    case Stmt::Kind::If:
      return expr_equal(*a.cond, *b.cond) &&
             body_equal(a.then_body, b.then_body, compare_prov) &&
             body_equal(a.else_body, b.else_body, compare_prov);
    case Stmt::Kind::DoLoop:
      return a.index == b.index && expr_equal(*a.lo, *b.lo) &&
             expr_equal(*a.hi, *b.hi) && expr_ptr_equal(a.step, b.step) &&
             body_equal(a.body, b.body, compare_prov);
    case Stmt::Kind::DoWhile:
      return expr_equal(*a.cond, *b.cond) && body_equal(a.body, b.body, compare_prov);
    case Stmt::Kind::Call: {
      if (a.callee != b.callee || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
      return true;
    }
    case Stmt::Kind::Return:
    case Stmt::Kind::Stop:
    case Stmt::Kind::Continue:
      return true;
    case Stmt::Kind::Print: {
      if (a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
      return true;
    }
    case Stmt::Kind::Read: {
      if (a.targets.size() != b.targets.size()) return false;
      for (size_t i = 0; i < a.targets.size(); ++i)
        if (!lvalue_equal(a.targets[i], b.targets[i])) return false;
      return true;
    }
  }
  return false;
}

bool body_equal(const Body& a, const Body& b, bool compare_prov) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(*a[i], *b[i], compare_prov)) return false;
  return true;
}

bool decl_equal(const Decl& a, const Decl& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Decl::Kind::Var: {
      if (a.type != b.type || a.items.size() != b.items.size()) return false;
      for (size_t i = 0; i < a.items.size(); ++i) {
        if (a.items[i].name != b.items[i].name || a.items[i].dim != b.items[i].dim ||
            a.items[i].dim_param != b.items[i].dim_param)
          return false;
      }
      return true;
    }
    case Decl::Kind::Parameter: {
      if (a.params.size() != b.params.size()) return false;
      for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].first != b.params[i].first ||
            !a.params[i].second.bits_equal(b.params[i].second))
          return false;
      return true;
    }
    case Decl::Kind::Common:
      return a.block == b.block && a.members == b.members;
  }
  return false;
}

bool unit_equal(const Unit& a, const Unit& b, bool compare_prov) {
  if (a.kind != b.kind || a.name != b.name || a.formals != b.formals) return false;
  if (a.kind == UnitKind::Function && a.result_type != b.result_type) return false;
  if (a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i)
    if (!decl_equal(a.decls[i], b.decls[i])) return false;
  if (a.end_comments != b.end_comments) return false;
  return body_equal(a.body, b.body, compare_prov);
}

bool program_equal(const Program& a, const Program& b, bool compare_prov) {
  if (a.units.size() != b.units.size() || a.entry != b.entry) return false;
  for (size_t i = 0; i < a.units.size(); ++i)
    if (!unit_equal(a.units[i], b.units[i], compare_prov)) return false;
  return true;
}

const Unit* Program::find_unit(const std::string& name) const {
  for (const auto& u : units)
    if (u.name == name) return &u;
  return nullptr;
}

void for_each_stmt(const Body& body, const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : body) {
    fn(*s);
    for_each_stmt(s->then_body, fn);
    for_each_stmt(s->else_body, fn);
    for_each_stmt(s->body, fn);
  }
}

int count_stmts(const Body& body) {
  int n = 0;
  for_each_stmt(body, [&](const Stmt&) { ++n; });
  return n;
}

}  // namespace residua
