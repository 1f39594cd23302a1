#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "classalg/normalize.hpp"

namespace classalg {

// A propositional literal with negation renamed away: negative(a) is the
// fresh positive symbol "false_a".
struct RenamedLiteral {
  std::string base;
  bool negative = false;

  std::string symbol() const { return negative ? "false_" + base : base; }
  RenamedLiteral complement() const { return {base, !negative}; }

  friend bool operator==(const RenamedLiteral&, const RenamedLiteral&) = default;
  friend auto operator<=>(const RenamedLiteral&, const RenamedLiteral&) = default;
};

struct HornClause {
  RenamedLiteral head;
  std::vector<RenamedLiteral> body;  // sorted; empty for a fact

  std::string text() const;  // "false_p <- false_q & r", facts as "p"
  friend bool operator==(const HornClause&, const HornClause&) = default;
};

using LiteralConjunction = std::vector<RenamedLiteral>;

// Each conjunction is a nogood: for every literal L, the clause
// complement(L) <- (the other literals). Tautologies are dropped.
std::vector<HornClause> rename_to_horn(const std::vector<LiteralConjunction>& nogoods);

// Clauses for axioms that must hold: the nogoods are the conjuncts of the
// disjunctive form of the axiom's negation. Atom texts name the bases.
std::vector<HornClause> horn_from_axioms(const std::vector<WherePtr>& axioms,
                                         const NormalizeOptions& opts = {});

LiteralConjunction to_renamed(const Conjunct& c);

struct MinimalModel {
  std::set<RenamedLiteral> derived;
  std::set<std::string> contradictions;  // bases derived with both polarities
};

MinimalModel minimal_model(const std::vector<HornClause>& clauses,
                           const std::set<RenamedLiteral>& facts = {});

enum class RoughValue { definitely_true, definitely_false, unknown, contradictory };
std::string_view to_string(RoughValue v);

// Over every base mentioned by the model or the clauses.
std::map<std::string, RoughValue> rough_bounds(const MinimalModel& model,
                                               const std::vector<HornClause>& clauses = {});

struct Bounds {
  Rational lower = 0;      // of the base
  Rational lower_neg = 0;  // of false_base
  Rational upper() const { return 1 - lower_neg; }
};

using BoundAssignment = std::map<std::string, Bounds>;

// Least fixpoint of lower(head) >= max(0, sum of body lowers - (k-1)).
// Throws InconsistentBounds when some lower + lower_neg exceeds 1.
BoundAssignment propagate_lower_bounds(const std::vector<HornClause>& clauses,
                                       const std::map<RenamedLiteral, Rational>& seed);

}  // namespace classalg
