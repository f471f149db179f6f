#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "residua/diag.hpp"
#include "residua/value.hpp"

namespace residua {

/// Stable per-statement provenance identifier, unique across a parsed
/// Program. Residual statements keep the ProvId of the statement they
/// originate from; transformations never renumber.
using ProvId = int;
constexpr ProvId kNoProv = -1;

enum class UnaryOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Pow, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* binop_text(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expressions are immutable after construction; rewrites build new
/// nodes and share untouched subtrees.
struct Expr {
  enum class Kind { Literal, Var, ArrayElem, Unary, Binary, FuncCall };

  Kind kind = Kind::Literal;
  Value lit;                  // Literal
  std::string name;           // Var / ArrayElem / FuncCall
  UnaryOp un = UnaryOp::Neg;  // Unary
  BinOp bin = BinOp::Add;     // Binary
  std::vector<ExprPtr> args;  // operands / call args / [index] for ArrayElem
  SourcePos pos;

  static ExprPtr literal(Value v, SourcePos p = {});
  static ExprPtr var(std::string name, SourcePos p = {});
  static ExprPtr array_elem(std::string name, ExprPtr index, SourcePos p = {});
  static ExprPtr unary(UnaryOp op, ExprPtr operand, SourcePos p = {});
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos p = {});
  static ExprPtr func_call(std::string name, std::vector<ExprPtr> args, SourcePos p = {});
};

bool expr_equal(const Expr& a, const Expr& b);

/// Assignment / READ target: scalar variable or array element.
struct LValue {
  std::string name;
  ExprPtr index;  // null for scalars
  SourcePos pos;
};

bool lvalue_equal(const LValue& a, const LValue& b);

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;
using Body = std::vector<StmtPtr>;

/// One statement node covering every MiniF77 statement form. Statements
/// are treated as immutable once a Program is parsed; the specializer
/// always builds fresh nodes (sharing unchanged expression subtrees).
struct Stmt {
  enum class Kind { Assign, If, DoLoop, DoWhile, Call, Return, Stop, Continue, Print, Read };

  Kind kind = Kind::Continue;
  ProvId prov = kNoProv;
  SourcePos pos;
  std::vector<std::string> comments;  // comment lines owned by this statement

  LValue target;               // Assign
  ExprPtr value;               // Assign
  ExprPtr cond;                // If / DoWhile
  Body then_body, else_body;   // If
  std::string index;           // DoLoop
  ExprPtr lo, hi, step;        // DoLoop (step null = 1)
  Body body;                   // DoLoop / DoWhile
  std::string callee;          // Call
  std::vector<ExprPtr> args;   // Call / Print
  std::vector<LValue> targets; // Read

  static StmtPtr assign(LValue target, ExprPtr value, SourcePos p = {});
  static StmtPtr if_stmt(ExprPtr cond, Body then_body, Body else_body, SourcePos p = {});
  static StmtPtr do_loop(std::string index, ExprPtr lo, ExprPtr hi, ExprPtr step,
                         Body body, SourcePos p = {});
  static StmtPtr do_while(ExprPtr cond, Body body, SourcePos p = {});
  static StmtPtr call(std::string callee, std::vector<ExprPtr> args, SourcePos p = {});
  static StmtPtr simple(Kind k, SourcePos p = {});  // Return / Stop / Continue
  static StmtPtr print(std::vector<ExprPtr> args, SourcePos p = {});
  static StmtPtr read(std::vector<LValue> targets, SourcePos p = {});
};

bool stmt_equal(const Stmt& a, const Stmt& b, bool compare_prov);
bool body_equal(const Body& a, const Body& b, bool compare_prov);

struct VarDeclItem {
  std::string name;
  int dim = 0;            // 0 = scalar; >0 = literal array bound
  std::string dim_param;  // nonempty when the bound is a PARAMETER name
  SourcePos pos;
};

struct Decl {
  enum class Kind { Var, Parameter, Common };
  Kind kind = Kind::Var;
  SourcePos pos;
  Type type = Type::Integer;                         // Var
  std::vector<VarDeclItem> items;                    // Var
  std::vector<std::pair<std::string, Value>> params; // Parameter
  std::string block;                                 // Common
  std::vector<std::string> members;                  // Common
};

bool decl_equal(const Decl& a, const Decl& b);

enum class UnitKind { Main, Subroutine, Function };

struct Unit {
  UnitKind kind = UnitKind::Main;
  std::string name;
  std::vector<std::string> formals;
  Type result_type = Type::Integer;  // Function only
  std::vector<Decl> decls;
  Body body;
  std::string source_file;
  std::vector<std::string> end_comments;  // comments sitting right before END
};

bool unit_equal(const Unit& a, const Unit& b, bool compare_prov);

struct Program {
  std::vector<Unit> units;
  std::string entry;                        // name of the Main unit
  std::map<std::string, std::string> files; // unit name -> source path

  const Unit* find_unit(const std::string& name) const;
};

bool program_equal(const Program& a, const Program& b, bool compare_prov);

/// Walk statements of a body in pre-order.
void for_each_stmt(const Body& body, const std::function<void(const Stmt&)>& fn);
int count_stmts(const Body& body);

}  // namespace residua
