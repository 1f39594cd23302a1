#include "classalg/syntax.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "classalg/error.hpp"

namespace classalg {

// ---------------------------------------------------------------------------
// Construction and equality
// ---------------------------------------------------------------------------

ClassPtr make_class(std::string name) {
  return std::make_shared<const ClassExpr>(ClassExpr{ClassName{std::move(name)}});
}
ClassPtr make_set(SetOp op, ClassPtr lhs, ClassPtr rhs) {
  return std::make_shared<const ClassExpr>(ClassExpr{SetExpr{op, std::move(lhs), std::move(rhs)}});
}
ClassPtr make_dot(ClassPtr base, Step step) {
  return std::make_shared<const ClassExpr>(ClassExpr{DotExpr{std::move(base), std::move(step)}});
}
ClassPtr make_where(ClassPtr base, WherePtr cond) {
  return std::make_shared<const ClassExpr>(ClassExpr{WhereExpr{std::move(base), std::move(cond)}});
}
WherePtr make_const(bool value) {
  return std::make_shared<const WhereCond>(WhereCond{ConstCond{value}});
}
WherePtr make_not(WherePtr operand) {
  return std::make_shared<const WhereCond>(WhereCond{NotCond{std::move(operand)}});
}
WherePtr make_and(WherePtr lhs, WherePtr rhs) {
  return std::make_shared<const WhereCond>(
      WhereCond{BinaryCond{Connective::and_, std::move(lhs), std::move(rhs)}});
}
WherePtr make_or(WherePtr lhs, WherePtr rhs) {
  return std::make_shared<const WhereCond>(
      WhereCond{BinaryCond{Connective::or_, std::move(lhs), std::move(rhs)}});
}
WherePtr make_pred(BasicPredicate pred) {
  return std::make_shared<const WhereCond>(WhereCond{PredicateCond{std::move(pred)}});
}

bool equal(const BasicPredicate& a, const BasicPredicate& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, TypeTest>) {
          return x.attr == y.attr && x.cls == y.cls;
        } else if constexpr (std::is_same_v<T, Compare>) {
          return x.attr == y.attr && x.op == y.op && x.complement == y.complement &&
                 x.constant == y.constant;
        } else if constexpr (std::is_same_v<T, Contain>) {
          return x.attr == y.attr && x.op == y.op && x.fusion == y.fusion && x.values == y.values;
        } else if constexpr (std::is_same_v<T, AggregateCompare>) {
          return x.fn == y.fn && x.attr == y.attr && x.op == y.op &&
                 x.complement == y.complement && x.constant == y.constant;
        } else {
          return x.path == y.path && equal(*x.target, *y.target);
        }
      },
      a);
}

bool equal(const ClassExpr& a, const ClassExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, ClassName>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else if constexpr (std::is_same_v<T, DotExpr>) {
          return x.step == y.step && equal(*x.base, *y.base);
        } else {
          return equal(*x.base, *y.base) && equal(*x.cond, *y.cond);
        }
      },
      a.node);
}

bool equal(const WhereCond& a, const WhereCond& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, ConstCond>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, NotCond>) {
          return equal(*x.operand, *y.operand);
        } else if constexpr (std::is_same_v<T, BinaryCond>) {
          return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
        } else {
          return equal(x.pred, y.pred);
        }
      },
      a.node);
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

constexpr std::array kReserved = {"where", "V", "This", "inv", "has", "in",
                                  "true", "false", "any", "empty"};

enum class Tok {
  ident, number, string, lparen, rparen, lbrace, rbrace, comma, dot,
  plus, minus, star, amp, tilde, bar, relop, containop, end
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
  RelOp relop = RelOp::eq;
  bool complement = false;
  ContainOp contain = ContainOp::has;
  Fusion fusion = Fusion::plain;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

[[noreturn]] void syntax_error(const std::string& msg, std::size_t pos) {
  throw Error(ErrorCode::SyntaxError, msg + " at offset " + std::to_string(pos), pos);
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= src_.size()) {
        out.push_back({Tok::end, "", i_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
  }

  // Length of the minus sign at offset k: ASCII '-' or U+2212.
  std::size_t minus_at(std::size_t k) const {
    if (k < src_.size() && src_[k] == '-') return 1;
    if (k + 2 < src_.size() + 0 && src_.substr(k, 3) == "\xE2\x88\x92") return 3;
    return 0;
  }

  // The full identifier starting at k, if any.
  std::string_view word_at(std::size_t k) const {
    if (k >= src_.size() || !ident_start(src_[k])) return {};
    std::size_t e = k;
    while (e < src_.size() && ident_char(src_[e])) ++e;
    return src_.substr(k, e - k);
  }

  bool relop_at(std::size_t k, Token& t, std::size_t& len) const {
    if (k >= src_.size()) return false;
    char c = src_[k];
    bool eq_follows = k + 1 < src_.size() && src_[k + 1] == '=';
    if (c == '<') { t.relop = eq_follows ? RelOp::le : RelOp::lt; len = eq_follows ? 2 : 1; return true; }
    if (c == '>') { t.relop = eq_follows ? RelOp::ge : RelOp::gt; len = eq_follows ? 2 : 1; return true; }
    if (c == '=') { t.relop = RelOp::eq; len = 1; return true; }
    return false;
  }

  Token next() {
    std::size_t start = i_;
    Token t{Tok::end, "", start};
    char c = src_[i_];

    if (ident_start(c)) {
      auto w = word_at(i_);
      i_ += w.size();
      t.kind = Tok::ident;
      t.text = std::string(w);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number(start);
    if (c == '"') return string_literal(start);

    std::size_t len = 0;
    if (relop_at(i_, t, len)) {
      i_ += len;
      t.kind = Tok::relop;
      return t;
    }
    if (c == '~') {
      if (relop_at(i_ + 1, t, len)) {
        i_ += 1 + len;
        t.kind = Tok::relop;
        t.complement = true;
        return t;
      }
      if (std::size_t m = minus_at(i_ + 1); m > 0) {
        auto w = word_at(i_ + 1 + m);
        if (w == "has" || w == "in") {
          i_ += 1 + m + w.size();
          return contain(t, w, Fusion::complement_quasi);
        }
      }
      auto w = word_at(i_ + 1);
      if (w == "has" || w == "in") {
        i_ += 1 + w.size();
        return contain(t, w, Fusion::complement);
      }
      ++i_;
      t.kind = Tok::tilde;
      return t;
    }
    if (std::size_t m = minus_at(i_); m > 0) {
      auto w = word_at(i_ + m);
      if (w == "has" || w == "in") {
        i_ += m + w.size();
        return contain(t, w, Fusion::quasi);
      }
      i_ += m;
      t.kind = Tok::minus;
      return t;
    }

    ++i_;
    switch (c) {
      case '(': t.kind = Tok::lparen; return t;
      case ')': t.kind = Tok::rparen; return t;
      case '{': t.kind = Tok::lbrace; return t;
      case '}': t.kind = Tok::rbrace; return t;
      case ',': t.kind = Tok::comma; return t;
      case '.': t.kind = Tok::dot; return t;
      case '+': t.kind = Tok::plus; return t;
      case '*': t.kind = Tok::star; return t;
      case '&': t.kind = Tok::amp; return t;
      case '|': t.kind = Tok::bar; return t;
      default: break;
    }
    throw Error(ErrorCode::UnknownOperator,
                "unknown operator '" + std::string(1, c) + "' at offset " + std::to_string(start),
                start);
  }

  Token contain(Token t, std::string_view word, Fusion fusion) {
    t.kind = Tok::containop;
    t.contain = word == "has" ? ContainOp::has : ContainOp::in;
    t.fusion = fusion;
    return t;
  }

  Token number(std::size_t start) {
    auto digits = [&] {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
    };
    digits();
    if (i_ + 1 < src_.size() && src_[i_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      ++i_;
      digits();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t k = i_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        i_ = k;
        digits();
      }
    }
    if (i_ + 1 < src_.size() && src_[i_] == '/' &&
        std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      ++i_;
      digits();
    }
    if (i_ < src_.size() && ident_char(src_[i_])) syntax_error("malformed number", start);
    return {Tok::number, std::string(src_.substr(start, i_ - start)), start};
  }

  Token string_literal(std::size_t start) {
    std::string out;
    ++i_;
    while (true) {
      if (i_ >= src_.size()) syntax_error("unterminated string literal", start);
      char c = src_[i_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= src_.size()) syntax_error("unterminated escape", start);
      char e = src_[i_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'u': {
          if (i_ + 4 > src_.size()) syntax_error("bad \\u escape", i_);
          unsigned code = std::stoul(std::string(src_.substr(i_, 4)), nullptr, 16);
          i_ += 4;
          if (code < 0x80) {
            out += static_cast<char>(code);
          } else if (code < 0x800) {
            out += static_cast<char>(0xC0 | (code >> 6));
            out += static_cast<char>(0x80 | (code & 0x3F));
          } else {
            out += static_cast<char>(0xE0 | (code >> 12));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
          }
          break;
        }
        default: syntax_error("unknown escape", i_ - 1);
      }
    }
    Token t{Tok::string, std::move(out), start};
    return t;
  }

  std::string_view src_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

bool is_aggr(std::string_view w, Aggr& fn) {
  static constexpr std::array<std::pair<std::string_view, Aggr>, 6> table{{
      {"cnt", Aggr::cnt}, {"sum", Aggr::sum}, {"avg", Aggr::avg},
      {"std", Aggr::std}, {"min", Aggr::min}, {"max", Aggr::max}}};
  for (auto [name, f] : table) {
    if (w == name) {
      fn = f;
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  ClassPtr class_expr() {
    ClassPtr e = sum();
    while (is_word("where")) {
      ++k_;
      e = make_where(e, or_cond());
    }
    return e;
  }

  WherePtr or_cond() {
    WherePtr w = and_cond();
    while (is_word("V")) {
      ++k_;
      w = make_or(w, and_cond());
    }
    return w;
  }

  ProbabilityText probability() {
    if (!is_word("Pr")) fail("expected 'Pr('");
    ++k_;
    expect(Tok::lparen, "'('");
    ProbabilityText out;
    out.numerator = class_expr();
    if (peek().kind == Tok::bar) {
      ++k_;
      out.condition = class_expr();
    }
    expect(Tok::rparen, "')'");
    if (peek().kind != Tok::relop) fail("expected comparison operator");
    out.op = peek().relop;
    out.complement = peek().complement;
    ++k_;
    Value v = constant();
    if (!v.is_number()) fail("probability bound must be a number");
    out.bound = v.number();
    return out;
  }

  void finish() {
    if (peek().kind != Tok::end) fail("unexpected trailing input");
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(k_ + ahead, toks_.size() - 1)];
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::ident && peek(ahead).text == w;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    if (t.kind != Tok::end && t.text.empty()) near = "operator";
    syntax_error(msg + " near " + near, t.pos);
  }
  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++k_;
  }
  std::string identifier(const char* what) {
    if (peek().kind != Tok::ident || !is_identifier(peek().text))
      fail(std::string("expected ") + what);
    return toks_[k_++].text;
  }

  ClassPtr sum() {
    ClassPtr e = product();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      SetOp op = peek().kind == Tok::plus ? SetOp::union_ : SetOp::difference;
      ++k_;
      e = make_set(op, e, product());
    }
    return e;
  }

  ClassPtr product() {
    ClassPtr e = postfix();
    while (peek().kind == Tok::star) {
      ++k_;
      e = make_set(SetOp::intersection, e, postfix());
    }
    return e;
  }

  ClassPtr postfix() {
    ClassPtr e = class_primary();
    while (peek().kind == Tok::dot) {
      ++k_;
      e = make_dot(e, step());
    }
    return e;
  }

  ClassPtr class_primary() {
    if (peek().kind == Tok::lparen) {
      ++k_;
      ClassPtr e = class_expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (is_word("any") || is_word("empty")) return make_class(toks_[k_++].text);
    return make_class(identifier("class name"));
  }

  Step step() {
    if (is_word("inv") && peek(1).kind == Tok::lparen) {
      k_ += 2;
      Step s{identifier("relation name"), true};
      expect(Tok::rparen, "')'");
      return s;
    }
    return Step{identifier("relation name"), false};
  }

  Path dotted_steps() {
    Path p{step()};
    while (peek().kind == Tok::dot) {
      ++k_;
      p.push_back(step());
    }
    return p;
  }

  WherePtr and_cond() {
    WherePtr w = unary_cond();
    while (peek().kind == Tok::amp) {
      ++k_;
      w = make_and(w, unary_cond());
    }
    return w;
  }

  WherePtr unary_cond() {
    if (peek().kind == Tok::tilde) {
      ++k_;
      return make_not(unary_cond());
    }
    if (peek().kind == Tok::lparen) {
      ++k_;
      WherePtr w = or_cond();
      expect(Tok::rparen, "')'");
      return w;
    }
    if (is_word("true") || is_word("false")) return make_const(toks_[k_++].text == "true");
    return make_pred(predicate());
  }

  BasicPredicate predicate() {
    if (is_word("This")) {
      ++k_;
      if (!is_word("in")) fail("expected 'in' after This");
      ++k_;
      return Membership{{}, postfix()};
    }
    Aggr fn{};
    if (peek().kind == Tok::ident && is_aggr(peek().text, fn) && peek(1).kind == Tok::lparen) {
      k_ += 2;
      AttrExp attr = attr_exp();
      expect(Tok::rparen, "')'");
      if (peek().kind != Tok::relop) fail("expected comparison operator after aggregate");
      AggregateCompare ac{fn, std::move(attr), peek().relop, peek().complement, Rational(0)};
      ++k_;
      Value v = constant();
      if (!v.is_number()) fail("aggregate comparison needs a numeric constant");
      ac.constant = v.number();
      return ac;
    }
    if (is_word("inv") && peek(1).kind == Tok::lparen) {
      std::size_t mark = k_;
      k_ += 2;
      Path inner = dotted_steps();
      expect(Tok::rparen, "')'");
      bool single_plain = inner.size() == 1 && !inner[0].inverse;
      if (!(single_plain && peek().kind == Tok::dot)) {
        if (!is_word("in")) fail("expected 'in' after inv(...)");
        ++k_;
        return Membership{std::move(inner), postfix()};
      }
      k_ = mark;  // it was the first step of an attribute path
    }

    AttrExp attr = attr_exp();
    const Token& op = peek();
    if (op.kind == Tok::relop) {
      ++k_;
      return Compare{std::move(attr), op.relop, op.complement, constant()};
    }
    if (op.kind == Tok::containop) {
      ++k_;
      return Contain{std::move(attr), op.contain, op.fusion, value_set()};
    }
    if (is_word("has")) {
      ++k_;
      return Contain{std::move(attr), ContainOp::has, Fusion::plain, value_set()};
    }
    if (is_word("in")) {
      ++k_;
      if (is_word("number") || is_word("string")) {
        PrimitiveClass cls = peek().text == "number" ? PrimitiveClass::number : PrimitiveClass::string;
        ++k_;
        return TypeTest{std::move(attr), cls};
      }
      return Contain{std::move(attr), ContainOp::in, Fusion::plain, value_set()};
    }
    if (op.kind == Tok::tilde) fail("'~' must be written adjacent to its operator");
    fail("expected operator after attribute");
  }

  AttrExp attr_exp() {
    Path p = dotted_steps();
    Step last = p.back();
    if (last.inverse) fail("attribute expression must end in an attribute name");
    p.pop_back();
    return AttrExp{std::move(p), last.relation};
  }

  Value constant() {
    bool negative = false;
    if (peek().kind == Tok::minus) {
      negative = true;
      ++k_;
    }
    const Token& t = peek();
    if (t.kind == Tok::number) {
      auto r = parse_rational(t.text);
      if (!r) fail("malformed number");
      ++k_;
      return Value(negative ? Rational(-*r) : *r);
    }
    if (t.kind == Tok::string && !negative) {
      ++k_;
      return Value(t.text);
    }
    fail("expected constant");
  }

  std::vector<Value> value_set() {
    expect(Tok::lbrace, "'{'");
    std::vector<Value> out;
    if (peek().kind != Tok::rbrace) {
      out.push_back(constant());
      while (peek().kind == Tok::comma) {
        ++k_;
        out.push_back(constant());
      }
    }
    expect(Tok::rbrace, "'}'");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

}  // namespace

bool is_reserved_word(std::string_view s) {
  return std::find(kReserved.begin(), kReserved.end(), s) != kReserved.end();
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  if (!std::all_of(s.begin(), s.end(), ident_char)) return false;
  return !is_reserved_word(s);
}

ClassPtr parse_class_expr(std::string_view text) {
  Parser p(text);
  ClassPtr e = p.class_expr();
  p.finish();
  return e;
}

WherePtr parse_where_cond(std::string_view text) {
  Parser p(text);
  WherePtr w = p.or_cond();
  p.finish();
  return w;
}

ProbabilityText parse_probability_text(std::string_view text) {
  Parser p(text);
  ProbabilityText out = p.probability();
  p.finish();
  return out;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::lt: return "<";
    case RelOp::le: return "<=";
    case RelOp::gt: return ">";
    case RelOp::ge: return ">=";
    case RelOp::eq: return "=";
  }
  return "?";
}

std::string_view to_string(Aggr fn) {
  switch (fn) {
    case Aggr::cnt: return "cnt";
    case Aggr::sum: return "sum";
    case Aggr::avg: return "avg";
    case Aggr::std: return "std";
    case Aggr::min: return "min";
    case Aggr::max: return "max";
  }
  return "?";
}

std::string print(const Step& s) {
  return s.inverse ? "inv(" + s.relation + ")" : s.relation;
}

std::string print(const Path& path) {
  std::string out;
  for (const auto& s : path) {
    if (!out.empty()) out += '.';
    out += print(s);
  }
  return out;
}

std::string print(const AttrExp& a) {
  return a.path.empty() ? a.attribute : print(a.path) + "." + a.attribute;
}

namespace {

enum ClassPrec { kWherePrec = 0, kSumPrec = 1, kProductPrec = 2, kPostfixPrec = 3 };
enum CondPrec { kOrPrec = 0, kAndPrec = 1, kUnaryPrec = 2 };

std::string print_class(const ClassExpr& e, int min_prec);
std::string print_cond(const WhereCond& w, int min_prec);

std::string wrap(std::string s, bool parens) { return parens ? "(" + s + ")" : s; }

std::string relop_text(RelOp op, bool complement) {
  return (complement ? "~" : "") + std::string(to_string(op));
}

std::string print_pred(const BasicPredicate& p) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TypeTest>) {
          return print(x.attr) + (x.cls == PrimitiveClass::number ? " in number" : " in string");
        } else if constexpr (std::is_same_v<T, Compare>) {
          return print(x.attr) + relop_text(x.op, x.complement) + x.constant.to_text();
        } else if constexpr (std::is_same_v<T, Contain>) {
          static constexpr std::array<std::string_view, 4> prefix{"", "~", "-", "~-"};
          std::string s = print(x.attr) + " " + std::string(prefix[static_cast<int>(x.fusion)]) +
                          (x.op == ContainOp::has ? "has" : "in") + " {";
          for (std::size_t i = 0; i < x.values.size(); ++i) {
            if (i) s += ',';
            s += x.values[i].to_text();
          }
          return s + "}";
        } else if constexpr (std::is_same_v<T, AggregateCompare>) {
          return std::string(to_string(x.fn)) + "(" + print(x.attr) + ")" +
                 relop_text(x.op, x.complement) + format_rational(x.constant);
        } else {
          std::string lhs = x.path.empty() ? "This" : "inv(" + print(x.path) + ")";
          return lhs + " in " + print_class(*x.target, kPostfixPrec);
        }
      },
      p);
}

std::string print_class(const ClassExpr& e, int min_prec) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ClassName>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          if (x.op == SetOp::intersection) {
            return wrap(print_class(*x.lhs, kProductPrec) + "*" + print_class(*x.rhs, kPostfixPrec),
                        min_prec > kProductPrec);
          }
          const char* op = x.op == SetOp::union_ ? "+" : "-";
          return wrap(print_class(*x.lhs, kSumPrec) + op + print_class(*x.rhs, kProductPrec),
                      min_prec > kSumPrec);
        } else if constexpr (std::is_same_v<T, DotExpr>) {
          return print_class(*x.base, kPostfixPrec) + "." + print(x.step);
        } else {
          return wrap(print_class(*x.base, kWherePrec) + " where " + print_cond(*x.cond, kOrPrec),
                      min_prec > kWherePrec);
        }
      },
      e.node);
}

std::string print_cond(const WhereCond& w, int min_prec) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstCond>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, NotCond>) {
          return "~" + print_cond(*x.operand, kUnaryPrec);
        } else if constexpr (std::is_same_v<T, BinaryCond>) {
          if (x.op == Connective::and_) {
            return wrap(print_cond(*x.lhs, kAndPrec) + "&" + print_cond(*x.rhs, kUnaryPrec),
                        min_prec > kAndPrec);
          }
          return wrap(print_cond(*x.lhs, kOrPrec) + " V " + print_cond(*x.rhs, kAndPrec),
                      min_prec > kOrPrec);
        } else {
          return print_pred(x.pred);
        }
      },
      w.node);
}

}  // namespace

std::string print(const ClassExpr& e) { return print_class(e, kWherePrec); }
std::string print(const WhereCond& w) { return print_cond(w, kOrPrec); }
std::string print(const BasicPredicate& p) { return print_pred(p); }

}  // namespace classalg
