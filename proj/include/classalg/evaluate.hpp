#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "classalg/model.hpp"

namespace classalg {

// Strong Kleene truth values, ordered false < unknown < true.
enum class Ternary : std::uint8_t { false_ = 0, unknown = 1, true_ = 2 };

inline Ternary kleene_and(Ternary a, Ternary b) { return a < b ? a : b; }
inline Ternary kleene_or(Ternary a, Ternary b) { return a < b ? b : a; }
inline Ternary kleene_not(Ternary a) { return static_cast<Ternary>(2 - static_cast<int>(a)); }
inline Ternary to_ternary(bool b) { return b ? Ternary::true_ : Ternary::false_; }
std::string_view to_string(Ternary t);

struct ExtentResult {
  std::vector<OidId> true_set, false_set, unknown_set;  // ascending
};

using OidSet = std::set<OidId>;

// Result of an aggregate. std is carried as its variance so comparisons stay
// exact; `value` is then the variance and `is_root` is set.
struct AggValue {
  Rational value;
  bool is_root = false;

  double to_double() const;
  std::string text() const;
  // Three-way comparison with a constant: -1, 0, 1.
  int compare(const Rational& c) const;
};

// Empty list: cnt is 0, everything else has no value. Throws
// NonNumericAggregate for fn != cnt over strings.
std::optional<AggValue> aggregate(Aggr fn, const std::vector<Value>& values);

bool holds(RelOp op, int cmp);

// Value of an atom for a virtual object homed at `home`, read closed-world
// from the home's first conjunct: a plain atom holds when some literal
// asserts an atom entailing it, and "~op" / "-op" / "~-op" forms are the
// negation or restatement of their plain atom. Never unknown.
Ternary home_atom_value(const Sdnf& home, const Atom& atom);
Ternary eval_sdnf_at_home(const Sdnf& s, const Sdnf& home);

// Named predicate extension: the evaluator consults these for Compare atoms
// whose attribute path is a single registered name.
using PredicateHook = std::function<std::optional<Ternary>(const BasicPredicate&, OidId)>;

// Evaluates expressions against one snapshot. Caches per-class results, so
// one instance should not outlive the questions asked about that snapshot.
class Evaluator {
 public:
  explicit Evaluator(Snapshot snap);

  const StoreState& state() const { return *snap_; }
  const std::vector<OidId>& universe() const { return universe_; }

  Ternary eval_predicate(const BasicPredicate& p, OidId id);
  Ternary eval_where(const WhereCond& w, OidId id);
  // Structural evaluation: set operators combine per oid, named classes
  // contribute their intent.
  Ternary eval_class(const ClassExpr& e, OidId id);
  Ternary eval_sdnf(const Sdnf& s, OidId id);

  // Over every real and virtual oid. A virtual object that is not decided
  // true is reported false.
  ExtentResult extent(const ClassExpr& e);
  ExtentResult extent(const Sdnf& s);
  ExtentResult extent_where(const WhereCond& w);

  // Per-oid values in universe() order.
  std::vector<Ternary> signature(const Sdnf& s);

  OidSet dot_relation(const OidSet& sources, const Step& step);
  OidSet dot_path(const OidSet& sources, const Path& path);
  OidSet inverse_image(const OidSet& targets, const std::string& relation);
  std::vector<Value> dot_attribute_values(const OidSet& sources, const AttrExp& attr);

  // All closure pairs of an explicit relation, self-loops included for every
  // oid in its field.
  std::set<std::pair<OidId, OidId>> reflexive_transitive_closure(const std::string& relation);

  void set_hook(PredicateHook hook) { hook_ = std::move(hook); }

 private:
  const RelationDef& relation(const std::string& name) const;
  const std::vector<Ternary>& class_values(const ClassExpr& e, const std::string& key);
  const OidSet& true_real_set(const ClassExpr& e);
  Ternary eval_real_predicate(const BasicPredicate& p, OidId id);
  Ternary eval_virtual_where(const WhereCond& canonical, OidId id);
  Ternary virtual_atom(const Atom& atom, OidId id);
  Ternary classify(Ternary t, OidId id) const;
  ExtentResult partition(const std::function<Ternary(OidId)>& f);

  Snapshot snap_;
  std::vector<OidId> universe_;
  std::unordered_map<OidId, std::size_t> position_;
  std::unordered_map<std::string, std::vector<Ternary>> class_cache_;
  std::unordered_map<std::string, OidSet> true_set_cache_;
  PredicateHook hook_;
};

}  // namespace classalg
