#include "residua/constraints.hpp"

#include <cctype>
#include <sstream>

#include "residua/token.hpp"

namespace residua {

std::string Constraint::scope_str() const {
  return scope == Scope::Global ? "GLOBAL" : "UNIT " + unit;
}

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& file, int line, const std::string& msg) {
  throw CompileError(ErrorKind::ConstraintParseError, {file, line, 1}, msg);
}

// RHS of a binding: a single literal, optionally signed. Reuses the
// MiniF77 lexer so literal syntax matches the language.
Value parse_literal(const std::string& text, const std::string& file, int line) {
  std::vector<Token> toks;
  try {
    toks = tokenize(text, file);
  } catch (const CompileError& e) {
    fail(file, line, "malformed literal: " + e.message());
  }
  size_t i = 0;
  bool neg = false;
  if (toks[i].kind == Tok::Minus) {
    neg = true;
    ++i;
  } else if (toks[i].kind == Tok::Plus) {
    ++i;
  }
  Value v;
  switch (toks[i].kind) {
    case Tok::IntLit: v = Value::integer(toks[i].int_val); break;
    case Tok::RealLit: v = Value::real(toks[i].real_val); break;
    case Tok::LogicalTrue: v = Value::logical(true); break;
    case Tok::LogicalFalse: v = Value::logical(false); break;
    case Tok::CharLit: v = Value::character(toks[i].str_val); break;
    default: fail(file, line, "expected a literal after '='");
  }
  if (neg) {
    if (v.type == Type::Integer) v.i = -v.i;
    else if (v.type == Type::Real) v.r = -v.r;
    else fail(file, line, "sign before a non-numeric literal");
  }
  ++i;
  if (toks[i].kind != Tok::Newline && toks[i].kind != Tok::Eof)
    fail(file, line, "only a single literal may follow '='");
  return v;
}

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

ConstraintSet parse_constraints(const std::string& text, const std::string& filename) {
  ConstraintSet cs;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_scope = false;
  Constraint::Scope scope = Constraint::Scope::Global;
  std::string scope_unit;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    std::string up = upper(line);
    if (up == "GLOBAL:") {
      have_scope = true;
      scope = Constraint::Scope::Global;
      scope_unit.clear();
      continue;
    }
    if (up.rfind("UNIT", 0) == 0 && up.size() > 4 &&
        (up[4] == ' ' || up[4] == '\t')) {
      std::string rest = trim(up.substr(4));
      if (rest.empty() || rest.back() != ':')
        fail(filename, lineno, "expected 'UNIT name:'");
      std::string name = trim(rest.substr(0, rest.size() - 1));
      if (!is_ident(name)) fail(filename, lineno, "bad unit name '" + name + "'");
      have_scope = true;
      scope = Constraint::Scope::Unit;
      scope_unit = name;
      continue;
    }

    // reserved relational syntax: named rejection, see design notes
    for (const char* op : {"<=", ">=", "/=", "<", ">"}) {
      if (line.find(op) != std::string::npos)
        fail(filename, lineno,
             std::string("relational constraint '") + op + "' is not yet supported; "
             "only 'name = literal' bindings are propagated");
    }
    for (const char* op : {".LT.", ".LE.", ".GT.", ".GE.", ".NE."}) {
      if (up.find(op) != std::string::npos)
        fail(filename, lineno,
             std::string("relational constraint '") + op + "' is not yet supported; "
             "only 'name = literal' bindings are propagated");
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(filename, lineno, "expected 'name = literal', a scope head, or '#' comment");
    std::string name = upper(trim(line.substr(0, eq)));
    if (name.find('(') != std::string::npos)
      fail(filename, lineno, "constraints on array elements are not supported");
    if (!is_ident(name)) fail(filename, lineno, "bad identifier '" + name + "'");
    if (!have_scope)
      fail(filename, lineno, "binding before any GLOBAL:/UNIT scope head");

    Constraint c;
    c.scope = scope;
    c.unit = scope_unit;
    c.name = name;
    c.value = parse_literal(line.substr(eq + 1), filename, lineno);
    c.pos = {filename, lineno, 1};

    bool duplicate = false;
    for (const auto& prev : cs.entries) {
      if (prev.scope == c.scope && prev.unit == c.unit && prev.name == c.name) {
        if (!prev.value.bits_equal(c.value))
          throw CompileError(ErrorKind::ConflictingConstraint, c.pos,
                             c.scope_str() + ": " + c.name + " bound to " +
                                 c.value.literal_text() + " but earlier to " +
                                 prev.value.literal_text());
        duplicate = true;
      }
    }
    if (!duplicate) cs.entries.push_back(std::move(c));
  }
  return cs;
}

namespace {

Value convert_constraint_value(const Constraint& c, Type declared) {
  if (c.value.type == declared) return c.value;
  if (c.value.type == Type::Integer && declared == Type::Real)
    return Value::real(static_cast<double>(c.value.i));
  throw CompileError(ErrorKind::ConstraintTypeMismatch, c.pos,
                     c.name + " is declared " + type_name(declared) + " but bound to a " +
                         std::string(type_name(c.value.type)) + " literal");
}

}  // namespace

std::vector<ResolvedConstraint> resolve_constraints(const ConstraintSet& cs,
                                                    const Program& p,
                                                    const SymbolTable& symtab) {
  std::vector<ResolvedConstraint> out;
  for (const auto& c : cs.entries) {
    ResolvedConstraint rc;
    rc.source = c;
    if (c.scope == Constraint::Scope::Unit) {
      auto uit = symtab.units.find(c.unit);
      if (uit == symtab.units.end())
        throw CompileError(ErrorKind::UnknownConstrainedName, c.pos,
                           "no unit named " + c.unit);
      const Symbol* s = uit->second.find(c.name);
      if (!s || s->kind == Symbol::Kind::Parameter)
        throw CompileError(ErrorKind::UnknownConstrainedName, c.pos,
                           c.name + " is not a variable of unit " + c.unit);
      if (s->kind == Symbol::Kind::CommonMember)
        throw CompileError(ErrorKind::UnknownConstrainedName, c.pos,
                           c.name + " is a COMMON member; bind it with a GLOBAL entry");
      if (s->is_array())
        throw CompileError(ErrorKind::ConstraintTypeMismatch, c.pos,
                           c.name + " is an array; array constraints are not supported");
      rc.loc = uit->second.location_of(c.name);
      rc.unit = rc.loc.kind == Location::Kind::Local ? c.unit : "";
      rc.value = convert_constraint_value(c, s->type);
    } else {
      // Global: a COMMON scalar member (same cell wherever the name
      // appears), else a Main-unit local.
      std::optional<Location> common_loc;
      std::optional<Type> common_type;
      bool ambiguous = false;
      for (const auto& [uname, us] : symtab.units) {
        const Symbol* s = us.find(c.name);
        if (!s || s->kind != Symbol::Kind::CommonMember) continue;
        if (s->is_array())
          throw CompileError(ErrorKind::ConstraintTypeMismatch, c.pos,
                             c.name + " is an array; array constraints are not supported");
        Location l = us.location_of(c.name);
        if (!common_loc) {
          common_loc = l;
          common_type = s->type;
        } else if (!(*common_loc == l)) {
          ambiguous = true;
        }
      }
      if (ambiguous)
        throw CompileError(ErrorKind::UnknownConstrainedName, c.pos,
                           c.name + " names different COMMON cells in different units");
      if (common_loc) {
        rc.loc = *common_loc;
        rc.value = convert_constraint_value(c, *common_type);
      } else {
        const UnitSymbols& main_us = symtab.unit(p.entry);
        const Symbol* s = main_us.find(c.name);
        if (!s || s->kind == Symbol::Kind::Parameter)
          throw CompileError(ErrorKind::UnknownConstrainedName, c.pos,
                             c.name + " is neither a COMMON member nor a local of " +
                                 p.entry);
        if (s->is_array())
          throw CompileError(ErrorKind::ConstraintTypeMismatch, c.pos,
                             c.name + " is an array; array constraints are not supported");
        rc.loc = main_us.location_of(c.name);
        rc.unit = p.entry;
        rc.value = convert_constraint_value(c, s->type);
      }
    }
    for (const auto& prev : out) {
      if (prev.loc == rc.loc && prev.unit == rc.unit &&
          !prev.value.bits_equal(rc.value))
        throw CompileError(ErrorKind::ConflictingConstraint, c.pos,
                           c.scope_str() + ": " + c.name + " and " +
                               prev.source.scope_str() + ": " + prev.source.name +
                               " bind the same storage to different values");
    }
    out.push_back(std::move(rc));
  }
  return out;
}

AbstractEnv initial_env(const ConstraintSet& cs, const Unit& unit, const Program& p,
                        const SymbolTable& symtab) {
  AbstractEnv env;
  for (const auto& rc : resolve_constraints(cs, p, symtab)) {
    bool visible = rc.loc.kind == Location::Kind::Common || rc.unit == unit.name;
    if (visible) env.knowns[rc.loc] = rc.value;
  }
  return env;
}

}  // namespace residua
