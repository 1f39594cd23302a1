#include "classalg/horn.hpp"

#include <algorithm>

#include "classalg/error.hpp"

namespace classalg {

std::string HornClause::text() const {
  std::string out = head.symbol();
  if (body.empty()) return out;
  out += " <- ";
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += " & ";
    out += body[i].symbol();
  }
  return out;
}

std::vector<HornClause> rename_to_horn(const std::vector<LiteralConjunction>& nogoods) {
  std::vector<HornClause> out;
  for (const auto& conj : nogoods) {
    for (std::size_t i = 0; i < conj.size(); ++i) {
      HornClause c{conj[i].complement(), {}};
      for (std::size_t j = 0; j < conj.size(); ++j)
        if (j != i) c.body.push_back(conj[j]);
      std::sort(c.body.begin(), c.body.end());
      c.body.erase(std::unique(c.body.begin(), c.body.end()), c.body.end());
      if (std::find(c.body.begin(), c.body.end(), c.head) != c.body.end()) continue;
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
  }
  return out;
}

LiteralConjunction to_renamed(const Conjunct& c) {
  LiteralConjunction out;
  for (const auto& l : c.literals) out.push_back({l.atom->text, l.negated});
  return out;
}

std::vector<HornClause> horn_from_axioms(const std::vector<WherePtr>& axioms,
                                         const NormalizeOptions& opts) {
  std::vector<LiteralConjunction> nogoods;
  for (const auto& a : axioms)
    for (const auto& c : to_disjunctive_form(*make_not(a), opts)) nogoods.push_back(to_renamed(c));
  return rename_to_horn(nogoods);
}

MinimalModel minimal_model(const std::vector<HornClause>& clauses,
                           const std::set<RenamedLiteral>& facts) {
  MinimalModel m;
  m.derived = facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : clauses) {
      if (m.derived.count(c.head)) continue;
      bool fires = std::all_of(c.body.begin(), c.body.end(),
                               [&](const RenamedLiteral& b) { return m.derived.count(b) != 0; });
      if (fires) {
        m.derived.insert(c.head);
        changed = true;
      }
    }
  }
  for (const auto& l : m.derived)
    if (!l.negative && m.derived.count(l.complement())) m.contradictions.insert(l.base);
  return m;
}

std::string_view to_string(RoughValue v) {
  switch (v) {
    case RoughValue::definitely_true: return "definitelyTrue";
    case RoughValue::definitely_false: return "definitelyFalse";
    case RoughValue::unknown: return "unknown";
    case RoughValue::contradictory: return "contradictory";
  }
  return "?";
}

std::map<std::string, RoughValue> rough_bounds(const MinimalModel& model,
                                               const std::vector<HornClause>& clauses) {
  std::set<std::string> bases;
  for (const auto& l : model.derived) bases.insert(l.base);
  for (const auto& c : clauses) {
    bases.insert(c.head.base);
    for (const auto& b : c.body) bases.insert(b.base);
  }
  std::map<std::string, RoughValue> out;
  for (const auto& b : bases) {
    bool pos = model.derived.count({b, false}) != 0;
    bool neg = model.derived.count({b, true}) != 0;
    out[b] = pos && neg ? RoughValue::contradictory
             : pos      ? RoughValue::definitely_true
             : neg      ? RoughValue::definitely_false
                        : RoughValue::unknown;
  }
  return out;
}

BoundAssignment propagate_lower_bounds(const std::vector<HornClause>& clauses,
                                       const std::map<RenamedLiteral, Rational>& seed) {
  std::map<RenamedLiteral, Rational> lower;
  std::set<std::string> bases;
  for (const auto& [l, v] : seed) {
    if (v < 0 || v > 1)
      throw Error(ErrorCode::InconsistentBounds, "seed bound for " + l.symbol() + " is outside [0,1]");
    lower[l] = v;
    bases.insert(l.base);
  }
  for (const auto& c : clauses) {
    bases.insert(c.head.base);
    for (const auto& b : c.body) bases.insert(b.base);
  }
  auto get = [&](const RenamedLiteral& l) -> Rational {
    auto it = lower.find(l);
    return it == lower.end() ? Rational(0) : it->second;
  };
  // Each derived bound is at most the smallest body bound, so the iteration
  // behaves like a shortest-path relaxation and settles within one round
  // per symbol.
  const std::size_t limit = 2 * bases.size() + 2;
  bool changed = true;
  for (std::size_t round = 0; changed; ++round) {
    if (round > limit)
      throw Error(ErrorCode::InconsistentBounds, "lower-bound propagation did not settle");
    changed = false;
    for (const auto& c : clauses) {
      Rational sum = 0;
      for (const auto& b : c.body) sum += get(b);
      Rational bound = sum - Rational(static_cast<long long>(c.body.size()) - 1);
      if (bound < 0) bound = 0;
      if (bound > get(c.head)) {
        lower[c.head] = bound;
        changed = true;
      }
    }
  }
  BoundAssignment out;
  for (const auto& b : bases) {
    Bounds x{get({b, false}), get({b, true})};
    if (x.lower + x.lower_neg > 1)
      throw Error(ErrorCode::InconsistentBounds,
                  "bounds for '" + b + "' are inconsistent: lower " + format_rational(x.lower) +
                      " exceeds upper " + format_rational(x.upper()));
    out[b] = x;
  }
  return out;
}

}  // namespace classalg
