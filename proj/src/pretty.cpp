#include "residua/pretty.hpp"

#include <sstream>

namespace residua {

namespace {

// Higher binds tighter. Mirrors the parser's precedence ladder.
int binop_prec(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div: return 6;
    case BinOp::Pow: return 8;
  }
  return 0;
}

bool is_relational(BinOp op) {
  switch (op) {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return true;
    default: return false;
  }
}

void emit_expr(const Expr& e, int parent_prec, bool right_side, std::string& out);

void emit_child(const Expr& child, int my_prec, bool right_side, std::string& out) {
  emit_expr(child, my_prec, right_side, out);
}

void emit_expr(const Expr& e, int parent_prec, bool right_side, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Literal: {
      // negative numeric literals need parens on the right of an operator
      bool neg = (e.lit.type == Type::Integer && e.lit.i < 0) ||
                 (e.lit.type == Type::Real && e.lit.r < 0);
      if (neg && parent_prec > 0) {
        out += "(" + e.lit.literal_text() + ")";
      } else {
        out += e.lit.literal_text();
      }
      return;
    }
    case Expr::Kind::Var:
      out += e.name;
      return;
    case Expr::Kind::ArrayElem:
      out += e.name + "(";
      emit_expr(*e.args[0], 0, false, out);
      out += ")";
      return;
    case Expr::Kind::FuncCall: {
      out += e.name + "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        emit_expr(*e.args[i], 0, false, out);
      }
      out += ")";
      return;
    }
    case Expr::Kind::Unary: {
      int prec = e.un == UnaryOp::Neg ? 7 : 3;
      bool parens = prec < parent_prec || (parent_prec > 0 && e.un == UnaryOp::Neg && right_side);
      if (parens) out += "(";
      out += e.un == UnaryOp::Neg ? "-" : ".NOT. ";
      emit_child(*e.args[0], prec, false, out);
      if (parens) out += ")";
      return;
    }
    case Expr::Kind::Binary: {
      int prec = binop_prec(e.bin);
      bool parens = prec < parent_prec ||
                    (prec == parent_prec && (right_side || is_relational(e.bin)));
      if (parens) out += "(";
      // '**' is right-associative: left child needs parens at equal prec
      bool left_right_side = e.bin == BinOp::Pow;
      emit_child(*e.args[0], prec, left_right_side, out);
      const char* op = binop_text(e.bin);
      bool worded = op[0] == '.';
      out += worded ? std::string(" ") + op + " " : std::string(" ") + op + " ";
      emit_child(*e.args[1], prec, !left_right_side, out);
      if (parens) out += ")";
      return;
    }
  }
}

std::string lvalue_text(const LValue& lv) {
  if (!lv.index) return lv.name;
  return lv.name + "(" + expr_text(*lv.index) + ")";
}

class Printer {
 public:
  std::string print_unit(const Unit& u) {
    switch (u.kind) {
      case UnitKind::Main:
        line(0, "PROGRAM " + u.name);
        break;
      case UnitKind::Subroutine:
        line(0, "SUBROUTINE " + u.name + formal_list(u));
        break;
      case UnitKind::Function:
        line(0, std::string(type_name(u.result_type)) + " FUNCTION " + u.name +
                    formal_list(u));
        break;
    }
    for (const auto& d : u.decls) print_decl(d);
    print_body(u.body, 0);
    for (const auto& c : u.end_comments) line(0, "! " + c);
    line(0, "END");
    return std::move(out_);
  }

  void print_body(const Body& body, int depth) {
    for (const auto& s : body) print_stmt(*s, depth);
  }

 private:
  static std::string formal_list(const Unit& u) {
    std::string out = "(";
    for (size_t i = 0; i < u.formals.size(); ++i) {
      if (i) out += ", ";
      out += u.formals[i];
    }
    return out + ")";
  }

  void line(int depth, const std::string& text) {
    out_.append(static_cast<size_t>(depth) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  void print_decl(const Decl& d) {
    switch (d.kind) {
      case Decl::Kind::Var: {
        std::string t = type_name(d.type);
        t += " ";
        for (size_t i = 0; i < d.items.size(); ++i) {
          if (i) t += ", ";
          t += d.items[i].name;
          if (!d.items[i].dim_param.empty())
            t += "(" + d.items[i].dim_param + ")";
          else if (d.items[i].dim > 0)
            t += "(" + std::to_string(d.items[i].dim) + ")";
        }
        line(0, t);
        break;
      }
      case Decl::Kind::Parameter: {
        std::string t = "PARAMETER (";
        for (size_t i = 0; i < d.params.size(); ++i) {
          if (i) t += ", ";
          t += d.params[i].first + " = " + d.params[i].second.literal_text();
        }
        line(0, t + ")");
        break;
      }
      case Decl::Kind::Common: {
        std::string t = "COMMON /" + d.block + "/ ";
        for (size_t i = 0; i < d.members.size(); ++i) {
          if (i) t += ", ";
          t += d.members[i];
        }
        line(0, t);
        break;
      }
    }
  }

  void print_stmt(const Stmt& s, int depth) {
    for (const auto& c : s.comments) line(depth, "! " + c);
    switch (s.kind) {
      case Stmt::Kind::Assign:
        line(depth, lvalue_text(s.target) + " = " + expr_text(*s.value));
        break;
      case Stmt::Kind::If:
        line(depth, "IF (" + expr_text(*s.cond) + ") THEN");
        print_body(s.then_body, depth + 1);
        if (!s.else_body.empty()) {
          line(depth, "ELSE");
          print_body(s.else_body, depth + 1);
        }
        line(depth, "END IF");
        break;
      case Stmt::Kind::DoLoop: {
        std::string t = "DO " + s.index + " = " + expr_text(*s.lo) + ", " + expr_text(*s.hi);
        if (s.step) t += ", " + expr_text(*s.step);
        line(depth, t);
        print_body(s.body, depth + 1);
        line(depth, "END DO");
        break;
      }
      case Stmt::Kind::DoWhile:
        line(depth, "DO WHILE (" + expr_text(*s.cond) + ")");
        print_body(s.body, depth + 1);
        line(depth, "END DO");
        break;
      case Stmt::Kind::Call: {
        std::string t = "CALL " + s.callee;
        if (!s.args.empty()) {
          t += "(";
          for (size_t i = 0; i < s.args.size(); ++i) {
            if (i) t += ", ";
            t += expr_text(*s.args[i]);
          }
          t += ")";
        }
        line(depth, t);
        break;
      }
      case Stmt::Kind::Return: line(depth, "RETURN"); break;
      case Stmt::Kind::Stop: line(depth, "STOP"); break;
      case Stmt::Kind::Continue: line(depth, "CONTINUE"); break;
      case Stmt::Kind::Print: {
        std::string t = "PRINT *";
        for (const auto& a : s.args) t += ", " + expr_text(*a);
        line(depth, t);
        break;
      }
      case Stmt::Kind::Read: {
        std::string t = "READ *";
        for (const auto& lv : s.targets) t += ", " + lvalue_text(lv);
        line(depth, t);
        break;
      }
    }
  }

  std::string out_;
};

}  // namespace

std::string expr_text(const Expr& e) {
  std::string out;
  emit_expr(e, 0, false, out);
  return out;
}

std::string stmt_header_text(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      return lvalue_text(s.target) + " = " + expr_text(*s.value);
    case Stmt::Kind::If:
      return "IF (" + expr_text(*s.cond) + ") THEN";
    case Stmt::Kind::DoLoop: {
      std::string t = "DO " + s.index + " = " + expr_text(*s.lo) + ", " + expr_text(*s.hi);
      if (s.step) t += ", " + expr_text(*s.step);
      return t;
    }
    case Stmt::Kind::DoWhile:
      return "DO WHILE (" + expr_text(*s.cond) + ")";
    case Stmt::Kind::Call: {
      std::string t = "CALL " + s.callee;
      if (!s.args.empty()) {
        t += "(";
        for (size_t i = 0; i < s.args.size(); ++i) {
          if (i) t += ", ";
          t += expr_text(*s.args[i]);
        }
        t += ")";
      }
      return t;
    }
    case Stmt::Kind::Return: return "RETURN";
    case Stmt::Kind::Stop: return "STOP";
    case Stmt::Kind::Continue: return "CONTINUE";
    case Stmt::Kind::Print: {
      std::string t = "PRINT *";
      for (const auto& a : s.args) t += ", " + expr_text(*a);
      return t;
    }
    case Stmt::Kind::Read: {
      std::string t = "READ *";
      for (const auto& lv : s.targets) t += ", " + lvalue_text(lv);
      return t;
    }
  }
  return "";
}

std::string unit_text(const Unit& u) { return Printer().print_unit(u); }

std::vector<std::pair<std::string, std::string>> pretty_print(const Program& p) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& u : p.units) {
    auto it = p.files.find(u.name);
    std::string path = it != p.files.end() ? it->second : u.name + ".f";
    out.emplace_back(path, unit_text(u));
  }
  return out;
}

}  // namespace residua
