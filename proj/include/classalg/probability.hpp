#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "classalg/evaluate.hpp"
#include "classalg/model.hpp"

namespace classalg {

// |trueSet(e)| / N over real and virtual oids. Throws EmptyUniverse.
Rational probability(const ClassExpr& e, const Snapshot& snap);
Rational probability(Evaluator& ev, const ClassExpr& e);

// [|trueSet|/N, 1 - |falseSet|/N].
std::pair<Rational, Rational> belief_interval(const ClassExpr& e, const Snapshot& snap);
std::pair<Rational, Rational> belief_interval(Evaluator& ev, const ClassExpr& e);

enum class Structural { indep, nonoverlap, subset };

struct StructuralCheck {
  Structural kind;
  std::size_t n = 0, n_a = 0, n_b = 0, n_ab = 0;
  bool satisfied = false;
  std::string equation;  // e.g. "|A&B|*N = |A|*|B|: 1*4 = 2*2"
};

StructuralCheck translate_structural(Structural kind, const ClassExpr& a, const ClassExpr& b,
                                     const Snapshot& snap);

// Pr(numerator | condition) op bound. A null condition is a marginal and
// behaves as condition any.
struct ProbConstraint {
  ClassPtr numerator;
  ClassPtr condition;
  RelOp op = RelOp::ge;
  Rational bound;

  // Throws InvalidConstraint for "=", "~"-fused operators and bounds outside
  // (0, 1).
  static ProbConstraint parse(std::string_view text);

  bool lower_family() const { return op == RelOp::ge || op == RelOp::gt; }
  bool strict() const { return op == RelOp::gt || op == RelOp::lt; }
  std::string text() const;
};

// Whether ratio nAB/nB satisfies the constraint. With nB = 0 a lower bound
// fails and an upper bound holds vacuously.
bool ratio_holds(const ProbConstraint& c, const Integer& n_b, const Integer& n_ab);
bool ratio_holds(RelOp op, const Rational& bound, const Integer& n_b, const Integer& n_ab);

struct Violation {
  int type = 0;                     // 1..4
  std::vector<std::size_t> constraints;  // indices into the validated list
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate_constraints(const std::vector<ProbConstraint>& cs, const Snapshot& snap);

// Smallest m with (nAB+m)/(nB+m) meeting the lower bound.
Integer needed_lower(const Rational& c, const Integer& n_b, const Integer& n_ab, bool strict = false);
// Smallest m with nAB/(nB+m) meeting the upper bound.
Integer needed_upper(const Rational& c, const Integer& n_b, const Integer& n_ab, bool strict = false);
// Smallest t with (nX+t)/(nAB+m) meeting the lower bound d. Throws
// CascadeViolation when t > m.
Integer cascade_count(const Rational& d, const Integer& n_ab, const Integer& n_x, const Integer& m,
                      bool strict = false);

struct LabeledEdge {
  std::string from, to;  // A&B and B for up edges, B and A&B for down edges
  bool up = true;
  RelOp op = RelOp::ge;
  Rational bound;
  bool modified = false;
};

struct AllocationStep {
  std::size_t constraint = 0;
  std::string node;     // home of the new virtual objects
  Integer n_b, n_ab;    // counts when the step started
  Integer moved;        // donated by ancestors
  Integer n_b_fresh, n_ab_fresh;  // counts just before the fresh allocation
  Integer fresh;
};

struct CascadeEvent {
  std::size_t constraint = 0;  // the constraint re-satisfied by the cascade
  std::string from, to;
  Rational bound;
  Integer n_ab, n_x, m, t;
};

struct ConstraintStatus {
  std::string text;
  Integer n_b, n_ab;
  bool satisfied = false;
};

struct ApplyReport {
  std::vector<LabeledEdge> edges;
  std::vector<AllocationStep> steps;
  std::vector<CascadeEvent> cascades;
  std::vector<ConstraintStatus> status;
  std::vector<Movement> movements;  // ledger entries appended by this run
  std::map<std::string, long long> per_node_delta;
  std::size_t allocated = 0;
  std::size_t moved = 0;
};

// Validates the store's constraints together with `added`, then adds or
// moves virtual objects until all hold. The store is left untouched when
// anything throws. Throws ForbiddenConstraint, Unsatisfiable,
// CascadeViolation or ValidationGap.
ApplyReport apply_constraints(Store& store, const std::vector<ProbConstraint>& added = {});

std::string describe_violations(const ValidationResult& r, const std::vector<ProbConstraint>& cs);

}  // namespace classalg
