#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "classalg/evaluate.hpp"

namespace classalg {

struct HierarchyNode {
  std::vector<std::string> members;  // sorted; "any" / "empty" for the builtin nodes
  Sdnf intent;                       // of the first member
  std::vector<Ternary> signature;    // over Hierarchy::universe
  std::size_t n_true = 0, n_false = 0, n_unknown = 0;
};

struct HierarchyEdge {
  std::size_t child = 0, parent = 0;  // node indices
  bool logical = false;               // some member of child logically implies some member of parent
};

struct Hierarchy {
  std::vector<OidId> universe;
  std::vector<HierarchyNode> nodes;  // nodes[0] is any, nodes[1] is empty
  std::vector<HierarchyEdge> edges;  // Hasse reduced
};

Hierarchy build_hierarchy(const Snapshot& snap);

using NamePair = std::pair<std::string, std::string>;

struct ImplicationReport {
  std::vector<NamePair> logical_equivalences;
  std::vector<NamePair> database_equivalences;
  std::vector<NamePair> logical_implications;   // (D, E): D implies E
  std::vector<NamePair> database_implications;  // (D, E): trueSet(D) within trueSet(E)
};

ImplicationReport implication_report(const Snapshot& snap);

struct Description {
  Conjunct conjunct;
  std::map<std::string, Rational> membership;  // class -> fraction of the set inside it
};

Description describe(const Snapshot& snap, const std::vector<OidId>& oids);

struct RuleSuggestion {
  std::string context;  // class name or "any"
  Sdnf context_intent;
  AtomPtr antecedent, consequent;
  std::size_t support = 0;  // objects of the context satisfying both
};

std::vector<RuleSuggestion> suggest_rules(const Snapshot& snap);

struct AttributeAggregates {
  bool numeric = false;
  // cnt always; the rest only for all-numeric value lists.
  std::map<Aggr, std::optional<AggValue>> values;
};

struct SummaryRow {
  Value value;
  std::size_t count = 0;
  std::map<std::string, AttributeAggregates> others;
};

std::vector<SummaryRow> summarize(const Snapshot& snap, const std::string& attr);

}  // namespace classalg
