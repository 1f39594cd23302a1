#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

namespace classalg {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

enum class PrimitiveClass { number, string };

// Canonical text of an exact number: integers as "30", terminating
// fractions as decimals ("0.25"), everything else as "p/q".
std::string format_rational(const Rational& r);

// Accepts [-]digits[.digits][e[+-]digits] and [-]digits/digits.
std::optional<Rational> parse_rational(std::string_view text);

// Exact binary value of a finite double.
Rational rational_from_double(double d);

double to_double(const Rational& r);

Integer ceil_rational(const Rational& r);

// A primitive attribute value. Numbers order before strings; strings order
// bytewise.
class Value {
 public:
  Value() : v_(Rational(0)) {}
  Value(Rational n) : v_(std::move(n)) {}            // NOLINT(implicit)
  Value(std::string s) : v_(std::move(s)) {}         // NOLINT(implicit)
  Value(const char* s) : v_(std::string(s)) {}       // NOLINT(implicit)
  Value(int n) : v_(Rational(n)) {}                  // NOLINT(implicit)
  Value(long long n) : v_(Rational(n)) {}            // NOLINT(implicit)

  bool is_number() const { return std::holds_alternative<Rational>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  const Rational& number() const { return std::get<Rational>(v_); }
  const std::string& string() const { return std::get<std::string>(v_); }
  PrimitiveClass primitive_class() const {
    return is_number() ? PrimitiveClass::number : PrimitiveClass::string;
  }

  // Expression-literal rendering: canonical number or double-quoted string.
  std::string to_text() const;

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  std::variant<Rational, std::string> v_;
};

std::string quote_string(std::string_view s);

}  // namespace classalg
