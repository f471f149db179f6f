#include "residua/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <tuple>

namespace residua {

const char* type_name(Type t) {
  switch (t) {
    case Type::Integer: return "INTEGER";
    case Type::Real: return "REAL";
    case Type::Logical: return "LOGICAL";
    case Type::Character: return "CHARACTER";
  }
  return "?";
}

Value Value::integer(long long v) {
  Value x;
  x.type = Type::Integer;
  x.i = v;
  return x;
}

Value Value::real(double v) {
  Value x;
  x.type = Type::Real;
  x.r = v;
  return x;
}

Value Value::logical(bool v) {
  Value x;
  x.type = Type::Logical;
  x.b = v;
  return x;
}

Value Value::character(std::string v) {
  Value x;
  x.type = Type::Character;
  x.s = std::move(v);
  return x;
}

bool Value::bits_equal(const Value& o) const {
  if (type != o.type) return false;
  switch (type) {
    case Type::Integer: return i == o.i;
    case Type::Real: return std::bit_cast<std::uint64_t>(r) == std::bit_cast<std::uint64_t>(o.r);
    case Type::Logical: return b == o.b;
    case Type::Character: return s == o.s;
  }
  return false;
}

bool value_less(const Value& a, const Value& b) {
  if (a.type != b.type) return a.type < b.type;
  switch (a.type) {
    case Type::Integer: return a.i < b.i;
    case Type::Real:
      return std::bit_cast<std::uint64_t>(a.r) < std::bit_cast<std::uint64_t>(b.r);
    case Type::Logical: return a.b < b.b;
    case Type::Character: return a.s < b.s;
  }
  return false;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string t(buf, res.ptr);
  if (t == "inf") return "INF";
  if (t == "-inf") return "-INF";
  if (t == "nan" || t == "-nan") return "NAN";
  std::string mantissa = t;
  std::string exponent;
  if (auto e = t.find('e'); e != std::string::npos) {
    mantissa = t.substr(0, e);
    exponent = t.substr(e + 1);
    if (!exponent.empty() && exponent[0] == '+') exponent.erase(0, 1);
    bool neg = !exponent.empty() && exponent[0] == '-';
    std::string digits = neg ? exponent.substr(1) : exponent;
    while (digits.size() > 1 && digits[0] == '0') digits.erase(0, 1);
    exponent = (neg ? "-" : "") + digits;
  }
  if (mantissa.find('.') == std::string::npos) mantissa += ".0";
  return exponent.empty() ? mantissa : mantissa + "E" + exponent;
}

std::string Value::literal_text() const {
  switch (type) {
    case Type::Integer: return std::to_string(i);
    case Type::Real: return format_real(r);
    case Type::Logical: return b ? ".TRUE." : ".FALSE.";
    case Type::Character: {
      std::string out = "'";
      for (char c : s) {
        out += c;
        if (c == '\'') out += '\'';
      }
      out += '\'';
      return out;
    }
  }
  return "?";
}

std::string Value::printed() const {
  switch (type) {
    case Type::Integer: return std::to_string(i);
    case Type::Real: return format_real(r);
    case Type::Logical: return b ? "T" : "F";
    case Type::Character: return s;
  }
  return "?";
}

long long wrap_add(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) +
                                static_cast<unsigned long long>(b));
}

long long wrap_sub(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) -
                                static_cast<unsigned long long>(b));
}

long long wrap_mul(long long a, long long b) {
  return static_cast<long long>(static_cast<unsigned long long>(a) *
                                static_cast<unsigned long long>(b));
}

std::optional<Value> value_convert(const Value& v, Type target) {
  if (v.type == target) return v;
  if (v.type == Type::Integer && target == Type::Real)
    return Value::real(static_cast<double>(v.i));
  if (v.type == Type::Real && target == Type::Integer) {
    double t = std::trunc(v.r);
    if (!(t >= -9.0e18 && t <= 9.0e18)) return std::nullopt;
    return Value::integer(static_cast<long long>(t));
  }
  return std::nullopt;
}

}  // namespace residua
