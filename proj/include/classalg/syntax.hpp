#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "classalg/value.hpp"

namespace classalg {

// One navigation step over a binary relation, optionally inverted.
struct Step {
  std::string relation;
  bool inverse = false;

  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

using Path = std::vector<Step>;

// Dotted relations followed by a terminal attribute name.
struct AttrExp {
  Path path;
  std::string attribute;

  friend bool operator==(const AttrExp&, const AttrExp&) = default;
};

enum class RelOp { lt, le, gt, ge, eq };
enum class ContainOp { has, in };
enum class Aggr { cnt, sum, avg, std, min, max };

// Operator prefixes fused into the token: "~op" is the true complement,
// "-op" the quasi-complement, "~-op" the negated quasi-complement.
enum class Fusion { plain, complement, quasi, complement_quasi };

struct ClassExpr;
struct WhereCond;
using ClassPtr = std::shared_ptr<const ClassExpr>;
using WherePtr = std::shared_ptr<const WhereCond>;

struct TypeTest {
  AttrExp attr;
  PrimitiveClass cls;
};

struct Compare {
  AttrExp attr;
  RelOp op;
  bool complement = false;  // "~<", "~>", ...
  Value constant;
};

struct Contain {
  AttrExp attr;
  ContainOp op;
  Fusion fusion = Fusion::plain;
  std::vector<Value> values;  // sorted, duplicate-free
};

struct AggregateCompare {
  Aggr fn;
  AttrExp attr;
  RelOp op;
  bool complement = false;
  Rational constant;
};

// "This in C" (empty path) or "inv(r1.r2) in C": true when some object
// reaching This along the path belongs to C.
struct Membership {
  Path path;
  ClassPtr target;
};

using BasicPredicate = std::variant<TypeTest, Compare, Contain, AggregateCompare, Membership>;

struct ClassName {
  std::string name;  // "any" and "empty" are the builtins
};

enum class SetOp { union_, difference, intersection };

struct SetExpr {
  SetOp op;
  ClassPtr lhs, rhs;
};

struct DotExpr {
  ClassPtr base;
  Step step;
};

struct WhereExpr {
  ClassPtr base;
  WherePtr cond;
};

struct ClassExpr {
  std::variant<ClassName, SetExpr, DotExpr, WhereExpr> node;
};

struct ConstCond {
  bool value;
};

struct NotCond {
  WherePtr operand;
};

enum class Connective { and_, or_ };

struct BinaryCond {
  Connective op;
  WherePtr lhs, rhs;
};

struct PredicateCond {
  BasicPredicate pred;
};

struct WhereCond {
  std::variant<ConstCond, NotCond, BinaryCond, PredicateCond> node;
};

// Constructors.
ClassPtr make_class(std::string name);
ClassPtr make_set(SetOp op, ClassPtr lhs, ClassPtr rhs);
ClassPtr make_dot(ClassPtr base, Step step);
ClassPtr make_where(ClassPtr base, WherePtr cond);
WherePtr make_const(bool value);
WherePtr make_not(WherePtr operand);
WherePtr make_and(WherePtr lhs, WherePtr rhs);
WherePtr make_or(WherePtr lhs, WherePtr rhs);
WherePtr make_pred(BasicPredicate pred);

// Deep structural equality.
bool equal(const ClassExpr& a, const ClassExpr& b);
bool equal(const WhereCond& a, const WhereCond& b);
bool equal(const BasicPredicate& a, const BasicPredicate& b);

// Parsers throw Error(SyntaxError | UnknownOperator) with a byte offset.
ClassPtr parse_class_expr(std::string_view text);
WherePtr parse_where_cond(std::string_view text);

std::string print(const ClassExpr& e);
std::string print(const WhereCond& w);
std::string print(const BasicPredicate& p);
std::string print(const Path& path);
std::string print(const AttrExp& a);
std::string print(const Step& s);
std::string_view to_string(RelOp op);
std::string_view to_string(Aggr fn);

bool is_identifier(std::string_view s);
bool is_reserved_word(std::string_view s);

// "Pr(A|B) >= 0.3" / "Pr(A) < 0.6". Validation of the operator and bound
// belongs to the probability module.
struct ProbabilityText {
  ClassPtr numerator;
  ClassPtr condition;  // null for a marginal
  RelOp op;
  bool complement = false;
  Rational bound;
};

ProbabilityText parse_probability_text(std::string_view text);

}  // namespace classalg
