#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "classalg/sdnf.hpp"
#include "classalg/syntax.hpp"

namespace classalg {

struct NormalizeOptions {
  std::size_t max_atoms = 24;
  std::size_t max_conjuncts = 100000;
};

// Looks up a stored class. Returns nullptr for unknown names.
using ClassResolver = std::function<const Sdnf*(const std::string&)>;

// Resolver that knows only the builtins.
ClassResolver no_classes();

struct NormalizeContext {
  ClassResolver resolve = no_classes();
  NormalizeOptions options{};
  // Name of the class being (re)defined; a reference to it is an
  // InliningCycle instead of a lookup.
  std::optional<std::string> defining{};
};

// Step 1: the expression as a condition on This. Named classes are inlined
// and dotted expressions become membership atoms with canonical targets.
WherePtr to_where_form(const ClassExpr& e, const NormalizeContext& ctx);

// Canonicalizes the predicates inside an arbitrary where-condition in the
// same way (membership targets normalized, This-membership inlined).
WherePtr canonical_where(const WhereCond& w, const NormalizeContext& ctx);

// Step 2: disjunction of conjuncts with negations pushed to the atoms.
// Conjuncts containing x&~x are dropped; duplicate literals merged.
std::vector<Conjunct> to_disjunctive_form(const WhereCond& w, const NormalizeOptions& opts = {});

// Steps 3 and 4: all prime implicants under generalized subsumption, with
// overlapping strict intervals widened under an entailing context.
std::vector<Conjunct> prime_implicants(const std::vector<Conjunct>& d,
                                       const NormalizeOptions& opts = {});

// Step 3 alone: one widening pass. Returns the input unchanged when no
// pair qualifies.
std::vector<Conjunct> expand_intervals(const std::vector<Conjunct>& d);

// Step 5.
Sdnf sort_sdnf(std::vector<Conjunct> d);

Sdnf sdnf(const ClassExpr& e, const NormalizeContext& ctx = {});
Sdnf sdnf_of_where(const WhereCond& w, const NormalizeContext& ctx = {});

enum class SdnfOp { union_, intersection, difference };
Sdnf set_op(const Sdnf& x, const Sdnf& y, SdnfOp op, const NormalizeOptions& opts = {});
Sdnf complement(const Sdnf& x, const NormalizeOptions& opts = {});

// Generalized subsumption between atoms: a true forces b true. Only
// same-key plain comparison chains (attribute or aggregate) are related.
bool atom_entails(const Atom& a, const Atom& b);
bool literal_entails(const Literal& a, const Literal& b);
// Every literal of b is entailed by some literal of a.
bool conjunct_entails(const Conjunct& a, const Conjunct& b);

// Every conjunct of d entails some conjunct of e.
bool logically_implies(const Sdnf& d, const Sdnf& e);
inline bool logically_equivalent(const Sdnf& a, const Sdnf& b) { return a == b; }

}  // namespace classalg
