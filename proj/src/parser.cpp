#include "residua/parser.hpp"

#include <set>

#include "residua/token.hpp"

namespace residua {

namespace {

class Parser {
 public:
  Parser(std::string path, const std::string& text)
      : path_(std::move(path)), toks_(tokenize(text, path_)) {}

  Unit parse() {
    skip_newlines();
    Unit u = parse_header();
    u.source_file = path_;
    skip_newlines();
    while (is_decl_start()) {
      u.decls.push_back(parse_decl(u));
      expect_newline();
      skip_newlines();
    }
    u.body = parse_body({Tok::KwEnd});
    // collect comments attached to END
    u.end_comments = cur().comments;
    expect(Tok::KwEnd);
    skip_newlines();
    if (cur().kind != Tok::Eof)
      fail("unexpected content after END; one unit per file");
    return u;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& peek(int n = 1) const {
    size_t j = i_ + n;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  SourcePos pos_of(const Token& t) const { return {path_, t.line, t.col}; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw CompileError(ErrorKind::ParseError, pos_of(cur()), msg);
  }

  Token advance() { return toks_[i_++]; }

  Token expect(Tok k) {
    if (cur().kind != k)
      fail(std::string("expected ") + tok_name(k) + ", found " + tok_name(cur().kind) +
           (cur().text.empty() ? "" : " '" + cur().text + "'"));
    return advance();
  }

  void expect_newline() {
    if (cur().kind == Tok::Eof) return;
    expect(Tok::Newline);
  }

  void skip_newlines() {
    while (cur().kind == Tok::Newline) advance();
  }

  bool accept(Tok k) {
    if (cur().kind != k) return false;
    advance();
    return true;
  }

  Unit parse_header() {
    Unit u;
    switch (cur().kind) {
      case Tok::KwProgram: {
        advance();
        u.kind = UnitKind::Main;
        u.name = expect(Tok::Ident).text;
        break;
      }
      case Tok::KwSubroutine: {
        advance();
        u.kind = UnitKind::Subroutine;
        u.name = expect(Tok::Ident).text;
        u.formals = parse_formal_list();
        break;
      }
      case Tok::KwInteger:
      case Tok::KwReal:
      case Tok::KwLogical:
      case Tok::KwCharacter: {
        Type t = type_of(advance().kind);
        expect(Tok::KwFunction);
        u.kind = UnitKind::Function;
        u.result_type = t;
        u.name = expect(Tok::Ident).text;
        u.formals = parse_formal_list();
        break;
      }
      default:
        fail("expected PROGRAM, SUBROUTINE, or typed FUNCTION header");
    }
    expect_newline();
    return u;
  }

  static Type type_of(Tok k) {
    switch (k) {
      case Tok::KwInteger: return Type::Integer;
      case Tok::KwReal: return Type::Real;
      case Tok::KwLogical: return Type::Logical;
      default: return Type::Character;
    }
  }

  std::vector<std::string> parse_formal_list() {
    std::vector<std::string> formals;
    if (!accept(Tok::LParen)) return formals;
    if (accept(Tok::RParen)) return formals;
    formals.push_back(expect(Tok::Ident).text);
    while (accept(Tok::Comma)) formals.push_back(expect(Tok::Ident).text);
    expect(Tok::RParen);
    return formals;
  }

  bool is_decl_start() const {
    switch (cur().kind) {
      case Tok::KwParameter:
      case Tok::KwCommon:
        return true;
      case Tok::KwInteger:
      case Tok::KwReal:
      case Tok::KwLogical:
      case Tok::KwCharacter:
        return true;
      default:
        return false;
    }
  }

  Decl parse_decl(Unit& u) {
    Decl d;
    d.pos = pos_of(cur());
    switch (cur().kind) {
      case Tok::KwParameter: {
        advance();
        d.kind = Decl::Kind::Parameter;
        expect(Tok::LParen);
        do {
          std::string name = expect(Tok::Ident).text;
          expect(Tok::Assign);
          d.params.emplace_back(name, parse_literal_value());
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        break;
      }
      case Tok::KwCommon: {
        advance();
        d.kind = Decl::Kind::Common;
        expect(Tok::Slash);
        d.block = expect(Tok::Ident).text;
        expect(Tok::Slash);
        d.members.push_back(expect(Tok::Ident).text);
        while (accept(Tok::Comma)) d.members.push_back(expect(Tok::Ident).text);
        break;
      }
      default: {
        d.kind = Decl::Kind::Var;
        d.type = type_of(advance().kind);
        do {
          VarDeclItem item;
          item.pos = pos_of(cur());
          item.name = expect(Tok::Ident).text;
          if (accept(Tok::LParen)) {
            if (cur().kind == Tok::IntLit) {
              item.dim = static_cast<int>(advance().int_val);
            } else {
              item.dim_param = expect(Tok::Ident).text;
            }
            expect(Tok::RParen);
            if (declared_arrays_.count(item.name) == 0) declared_arrays_.insert(item.name);
          }
          d.items.push_back(std::move(item));
        } while (accept(Tok::Comma));
        break;
      }
    }
    (void)u;
    return d;
  }

  Value parse_literal_value() {
    bool neg = false;
    if (accept(Tok::Minus)) neg = true;
    else accept(Tok::Plus);
    const Token t = cur();
    switch (t.kind) {
      case Tok::IntLit:
        advance();
        return Value::integer(neg ? -t.int_val : t.int_val);
      case Tok::RealLit:
        advance();
        return Value::real(neg ? -t.real_val : t.real_val);
      case Tok::LogicalTrue:
      case Tok::LogicalFalse:
        if (neg) fail("sign before logical literal");
        advance();
        return Value::logical(t.kind == Tok::LogicalTrue);
      case Tok::CharLit:
        if (neg) fail("sign before character literal");
        advance();
        return Value::character(t.str_val);
      default:
        fail("expected a literal");
    }
  }

  Body parse_body(const std::set<Tok>& stop) {
    Body body;
    skip_newlines();
    while (!stop.count(cur().kind) && !is_end_pair_stop(stop)) {
      if (cur().kind == Tok::Eof) fail("unexpected end of file inside a statement block");
      body.push_back(parse_stmt());
      skip_newlines();
    }
    return body;
  }

  // "END IF" / "END DO" spelled as two tokens
  bool is_end_pair_stop(const std::set<Tok>& stop) const {
    if (cur().kind != Tok::KwEnd) return false;
    if (stop.count(Tok::KwEndif) && peek().kind == Tok::KwIf) return true;
    if (stop.count(Tok::KwEnddo) && peek().kind == Tok::KwDo) return true;
    return false;
  }

  void consume_block_end(Tok merged, Tok second) {
    if (cur().kind == merged) {
      advance();
      return;
    }
    expect(Tok::KwEnd);
    expect(second);
  }

  StmtPtr parse_stmt() {
    std::vector<std::string> comments = cur().comments;
    StmtPtr s = parse_stmt_inner();
    s->comments = std::move(comments);
    return s;
  }

  StmtPtr parse_stmt_inner() {
    const Token t = cur();
    switch (t.kind) {
      case Tok::KwIf: return parse_if();
      case Tok::KwDo: return parse_do();
      case Tok::KwCall: return parse_call();
      case Tok::KwReturn:
        advance();
        return finish_simple(Stmt::Kind::Return, t);
      case Tok::KwStop:
        advance();
        return finish_simple(Stmt::Kind::Stop, t);
      case Tok::KwContinue:
        advance();
        return finish_simple(Stmt::Kind::Continue, t);
      case Tok::KwPrint: return parse_print();
      case Tok::KwRead: return parse_read();
      case Tok::Ident: return parse_assign();
      case Tok::KwElse:
        fail("ELSE outside of IF block");
      default:
        fail(std::string("expected a statement, found ") + tok_name(t.kind) +
             (t.text.empty() ? "" : " '" + t.text + "'"));
    }
  }

  StmtPtr finish_simple(Stmt::Kind k, const Token& t) {
    auto s = Stmt::simple(k, pos_of(t));
    expect_newline();
    return s;
  }

  StmtPtr parse_assign() {
    const Token t = cur();
    LValue lv = parse_lvalue();
    expect(Tok::Assign);
    ExprPtr rhs = parse_expr();
    expect_newline();
    return Stmt::assign(std::move(lv), std::move(rhs), pos_of(t));
  }

  LValue parse_lvalue() {
    LValue lv;
    const Token t = expect(Tok::Ident);
    lv.name = t.text;
    lv.pos = pos_of(t);
    if (cur().kind == Tok::LParen && declared_arrays_.count(lv.name)) {
      advance();
      lv.index = parse_expr();
      expect(Tok::RParen);
    }
    return lv;
  }

  StmtPtr parse_if() {
    const Token t = expect(Tok::KwIf);
    expect(Tok::LParen);
    ExprPtr cond = parse_expr();
    expect(Tok::RParen);
    if (accept(Tok::KwThen)) {
      expect_newline();
      Body then_body = parse_body({Tok::KwElse, Tok::KwEndif});
      Body else_body;
      if (accept(Tok::KwElse)) {
        if (cur().kind == Tok::KwIf) fail("ELSE IF is not supported; nest the IF instead");
        expect_newline();
        else_body = parse_body({Tok::KwEndif});
      }
      consume_block_end(Tok::KwEndif, Tok::KwIf);
      expect_newline();
      return Stmt::if_stmt(std::move(cond), std::move(then_body), std::move(else_body),
                           pos_of(t));
    }
    // logical IF: a single plain statement on the same line
    switch (cur().kind) {
      case Tok::KwIf:
      case Tok::KwDo:
      case Tok::KwElse:
      case Tok::KwEnd:
      case Tok::KwEndif:
      case Tok::KwEnddo:
        fail("only a simple statement may follow a one-line IF");
      default: break;
    }
    Body then_body;
    then_body.push_back(parse_stmt_inner());
    return Stmt::if_stmt(std::move(cond), std::move(then_body), {}, pos_of(t));
  }

  StmtPtr parse_do() {
    const Token t = expect(Tok::KwDo);
    if (accept(Tok::KwWhile)) {
      expect(Tok::LParen);
      ExprPtr cond = parse_expr();
      expect(Tok::RParen);
      expect_newline();
      Body body = parse_body({Tok::KwEnddo});
      consume_block_end(Tok::KwEnddo, Tok::KwDo);
      expect_newline();
      return Stmt::do_while(std::move(cond), std::move(body), pos_of(t));
    }
    std::string index = expect(Tok::Ident).text;
    expect(Tok::Assign);
    ExprPtr lo = parse_expr();
    expect(Tok::Comma);
    ExprPtr hi = parse_expr();
    ExprPtr step;
    if (accept(Tok::Comma)) step = parse_expr();
    expect_newline();
    Body body = parse_body({Tok::KwEnddo});
    consume_block_end(Tok::KwEnddo, Tok::KwDo);
    expect_newline();
    return Stmt::do_loop(std::move(index), std::move(lo), std::move(hi), std::move(step),
                         std::move(body), pos_of(t));
  }

  StmtPtr parse_call() {
    const Token t = expect(Tok::KwCall);
    std::string name = expect(Tok::Ident).text;
    std::vector<ExprPtr> args;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        args.push_back(parse_expr());
        while (accept(Tok::Comma)) args.push_back(parse_expr());
        expect(Tok::RParen);
      }
    }
    expect_newline();
    return Stmt::call(std::move(name), std::move(args), pos_of(t));
  }

  StmtPtr parse_print() {
    const Token t = expect(Tok::KwPrint);
    expect(Tok::Star);
    std::vector<ExprPtr> args;
    while (accept(Tok::Comma)) args.push_back(parse_expr());
    expect_newline();
    return Stmt::print(std::move(args), pos_of(t));
  }

  StmtPtr parse_read() {
    const Token t = expect(Tok::KwRead);
    expect(Tok::Star);
    std::vector<LValue> targets;
    while (accept(Tok::Comma)) targets.push_back(parse_lvalue());
    expect_newline();
    return Stmt::read(std::move(targets), pos_of(t));
  }

  // Precedence climbing: .OR. < .AND. < .NOT. < relational < additive
  // < multiplicative < unary +- < ** (right associative).
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (cur().kind == Tok::OpOr) {
      const Token t = advance();
      e = Expr::binary(BinOp::Or, e, parse_and(), pos_of(t));
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_not();
    while (cur().kind == Tok::OpAnd) {
      const Token t = advance();
      e = Expr::binary(BinOp::And, e, parse_not(), pos_of(t));
    }
    return e;
  }

  ExprPtr parse_not() {
    if (cur().kind == Tok::OpNot) {
      const Token t = advance();
      return Expr::unary(UnaryOp::Not, parse_not(), pos_of(t));
    }
    return parse_rel();
  }

  ExprPtr parse_rel() {
    ExprPtr e = parse_additive();
    BinOp op;
    switch (cur().kind) {
      case Tok::OpEq: op = BinOp::Eq; break;
      case Tok::OpNe: op = BinOp::Ne; break;
      case Tok::OpLt: op = BinOp::Lt; break;
      case Tok::OpLe: op = BinOp::Le; break;
      case Tok::OpGt: op = BinOp::Gt; break;
      case Tok::OpGe: op = BinOp::Ge; break;
      default: return e;
    }
    const Token t = advance();
    return Expr::binary(op, e, parse_additive(), pos_of(t));
  }

  ExprPtr parse_additive() {
    ExprPtr e = parse_term();
    while (cur().kind == Tok::Plus || cur().kind == Tok::Minus) {
      const Token t = advance();
      e = Expr::binary(t.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, e, parse_term(),
                       pos_of(t));
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    while (cur().kind == Tok::Star || cur().kind == Tok::Slash) {
      const Token t = advance();
      e = Expr::binary(t.kind == Tok::Star ? BinOp::Mul : BinOp::Div, e, parse_unary(),
                       pos_of(t));
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (cur().kind == Tok::Minus) {
      const Token t = advance();
      ExprPtr operand = parse_unary();
      // canonical form: negated numeric literals are literals
      if (operand->kind == Expr::Kind::Literal && operand->lit.is_numeric()) {
        Value v = operand->lit;
        if (v.type == Type::Integer) v.i = -v.i;
        else v.r = -v.r;
        return Expr::literal(v, pos_of(t));
      }
      return Expr::unary(UnaryOp::Neg, std::move(operand), pos_of(t));
    }
    if (cur().kind == Tok::Plus) {
      advance();
      return parse_unary();
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (cur().kind == Tok::StarStar) {
      const Token t = advance();
      // right-associative; -X**2 never reaches here with the '-'
      ExprPtr exp = parse_unary();
      return Expr::binary(BinOp::Pow, base, exp, pos_of(t));
    }
    return base;
  }

  ExprPtr parse_primary() {
    const Token t = cur();
    switch (t.kind) {
      case Tok::IntLit:
        advance();
        return Expr::literal(Value::integer(t.int_val), pos_of(t));
      case Tok::RealLit:
        advance();
        return Expr::literal(Value::real(t.real_val), pos_of(t));
      case Tok::LogicalTrue:
      case Tok::LogicalFalse:
        advance();
        return Expr::literal(Value::logical(t.kind == Tok::LogicalTrue), pos_of(t));
      case Tok::CharLit:
        advance();
        return Expr::literal(Value::character(t.str_val), pos_of(t));
      case Tok::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(Tok::RParen);
        return e;
      }
      case Tok::Ident: {
        advance();
        if (cur().kind == Tok::LParen) {
          advance();
          if (declared_arrays_.count(t.text)) {
            ExprPtr idx = parse_expr();
            expect(Tok::RParen);
            return Expr::array_elem(t.text, std::move(idx), pos_of(t));
          }
          std::vector<ExprPtr> args;
          if (!accept(Tok::RParen)) {
            args.push_back(parse_expr());
            while (accept(Tok::Comma)) args.push_back(parse_expr());
            expect(Tok::RParen);
          }
          return Expr::func_call(t.text, std::move(args), pos_of(t));
        }
        return Expr::var(t.text, pos_of(t));
      }
      default:
        fail(std::string("expected an expression, found ") + tok_name(t.kind));
    }
  }

  std::string path_;
  std::vector<Token> toks_;
  size_t i_ = 0;
  std::set<std::string> declared_arrays_;
};

void number_body(Body& body, ProvId& next) {
  for (auto& s : body) {
    s->prov = next++;
    number_body(s->then_body, next);
    number_body(s->else_body, next);
    number_body(s->body, next);
  }
}

}  // namespace

Unit parse_unit(const std::string& path, const std::string& text) {
  return Parser(path, text).parse();
}

void assign_prov_ids(Program& p) {
  ProvId next = 0;
  for (auto& u : p.units) number_body(u.body, next);
}

Program parse_program(const std::vector<std::pair<std::string, std::string>>& files) {
  Program p;
  for (const auto& [path, text] : files) {
    Unit u = parse_unit(path, text);
    for (const auto& existing : p.units) {
      if (existing.name == u.name)
        throw CompileError(ErrorKind::DuplicateUnit,
                           {path, 1, 1},
                           "unit " + u.name + " already defined in " +
                               p.files.at(existing.name));
      if (existing.kind == UnitKind::Main && u.kind == UnitKind::Main)
        throw CompileError(ErrorKind::DuplicateUnit, {path, 1, 1},
                           "second PROGRAM unit " + u.name + "; main is " + existing.name);
    }
    p.files[u.name] = path;
    if (u.kind == UnitKind::Main) p.entry = u.name;
    p.units.push_back(std::move(u));
  }
  if (p.entry.empty())
    throw CompileError(ErrorKind::MissingMain, "no PROGRAM unit in the source set");
  assign_prov_ids(p);
  return p;
}

}  // namespace residua
