#pragma once

#include <optional>
#include <string>

namespace residua {

enum class Type { Integer, Real, Logical, Character };

const char* type_name(Type t);

/// A typed MiniF77 value: literal in the AST, runtime value in the
/// interpreter, payload of a Known abstract value.
struct Value {
  Type type = Type::Integer;
  long long i = 0;
  double r = 0.0;
  bool b = false;
  std::string s;

  static Value integer(long long v);
  static Value real(double v);
  static Value logical(bool v);
  static Value character(std::string v);

  bool is_numeric() const { return type == Type::Integer || type == Type::Real; }
  double as_real() const { return type == Type::Real ? r : static_cast<double>(i); }

  /// Equality with reals compared by bit pattern (folding must be
  /// bit-faithful, so -0.0 and 0.0 are distinct here).
  bool bits_equal(const Value& o) const;
  friend bool operator==(const Value& a, const Value& b) { return a.bits_equal(b); }

  /// Source-form literal, reparseable by the lexer.
  std::string literal_text() const;

  /// Rendering used by list-directed PRINT.
  std::string printed() const;
};

/// Strict weak order usable as a map/set comparator (reals by bit pattern).
bool value_less(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return value_less(a, b); }
};

/// Shortest round-trip decimal form with Fortran spelling: always a '.'
/// or an exponent, uppercase E, no exponent padding. 1e-06 -> "1.0E-6".
std::string format_real(double v);

/// Integer arithmetic in MiniF77 wraps modulo 2^64 (two's complement);
/// these helpers keep that defined in C++.
long long wrap_add(long long a, long long b);
long long wrap_sub(long long a, long long b);
long long wrap_mul(long long a, long long b);

/// Convert for assignment/binding: Integer <-> Real convert (REAL->INTEGER
/// truncates toward zero), other cross-type pairs are rejected.
/// Returns nullopt when the truncated real does not fit a long long.
std::optional<Value> value_convert(const Value& v, Type target);

}  // namespace residua
