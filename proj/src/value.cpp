#include "classalg/value.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "classalg/error.hpp"

namespace classalg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::UnknownClassName: return "UnknownClassName";
    case ErrorCode::InliningCycle: return "InliningCycle";
    case ErrorCode::SizeBudgetExceeded: return "SizeBudgetExceeded";
    case ErrorCode::UnknownOid: return "UnknownOid";
    case ErrorCode::EmptyValueList: return "EmptyValueList";
    case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
    case ErrorCode::CyclicComposite: return "CyclicComposite";
    case ErrorCode::NameClash: return "NameClash";
    case ErrorCode::DuplicateIntent: return "DuplicateIntent";
    case ErrorCode::UnknownRelationName: return "UnknownRelationName";
    case ErrorCode::NotExplicit: return "NotExplicit";
    case ErrorCode::NonNumericAggregate: return "NonNumericAggregate";
    case ErrorCode::EmptyOidSet: return "EmptyOidSet";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::InconsistentBounds: return "InconsistentBounds";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::InvalidConstraint: return "InvalidConstraint";
    case ErrorCode::ForbiddenConstraint: return "ForbiddenConstraint";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    case ErrorCode::CascadeViolation: return "CascadeViolation";
    case ErrorCode::ValidationGap: return "ValidationGap";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

std::string format_rational(const Rational& r) {
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();

  Integer rest = den;
  unsigned twos = 0, fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();

  unsigned digits = std::max(twos, fives);
  Integer scale = boost::multiprecision::pow(Integer(10), digits);
  Integer scaled = num * (scale / den);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

std::optional<Rational> parse_rational(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  auto digits = [&](std::string& out) {
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) out += text[i++];
    return i > start;
  };
  std::string whole, frac;
  if (!digits(whole)) return std::nullopt;

  if (i < text.size() && text[i] == '/') {
    ++i;
    std::string den;
    if (!digits(den) || i != text.size()) return std::nullopt;
    auto strip = [](const std::string& t) {
      std::size_t k = t.find_first_not_of('0');
      return k == std::string::npos ? std::string("0") : t.substr(k);
    };
    Integer d(strip(den));
    if (d == 0) return std::nullopt;
    Rational r(Integer(strip(whole)), d);
    return negative ? Rational(-r) : r;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    if (!digits(frac)) return std::nullopt;
  }
  long long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) eneg = text[i++] == '-';
    std::string e;
    if (!digits(e) || e.size() > 6) return std::nullopt;
    exponent = std::stoll(e);
    if (eneg) exponent = -exponent;
  }
  if (i != text.size()) return std::nullopt;

  std::string digits_text = whole + frac;
  std::size_t nz = digits_text.find_first_not_of('0');
  // cpp_int reads a leading zero as an octal prefix.
  Integer mantissa(nz == std::string::npos ? std::string("0") : digits_text.substr(nz));
  exponent -= static_cast<long long>(frac.size());
  Rational r(mantissa);
  if (exponent > 0) r *= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exponent)));
  if (exponent < 0) r /= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(-exponent)));
  return negative ? Rational(-r) : r;
}

Rational rational_from_double(double d) {
  if (!std::isfinite(d)) return Rational(0);
  int exp = 0;
  double mant = std::frexp(d, &exp);
  // 53 bits of mantissa fit exactly in a long long after scaling.
  auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(scaled);
  Integer two_pow = boost::multiprecision::pow(Integer(2), static_cast<unsigned>(exp < 0 ? -exp : exp));
  if (exp > 0) r *= Rational(two_pow);
  if (exp < 0) r /= Rational(two_pow);
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Integer ceil_rational(const Rational& r) {
  Integer num = boost::multiprecision::numerator(r);
  Integer den = boost::multiprecision::denominator(r);
  Integer q = num / den;  // truncates toward zero
  if (num % den != 0 && num > 0) q += 1;
  return q;
}

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string Value::to_text() const {
  return is_number() ? format_rational(number()) : quote_string(string());
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.is_number() != b.is_number())
    return a.is_number() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_number()) {
    if (a.number() < b.number()) return std::strong_ordering::less;
    if (a.number() > b.number()) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  int c = a.string().compare(b.string());
  return c < 0 ? std::strong_ordering::less
               : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

}  // namespace classalg
