#include "classalg/hierarchy.hpp"

#include <algorithm>

#include "classalg/error.hpp"

namespace classalg {

namespace {

bool below(const std::vector<Ternary>& x, const std::vector<Ternary>& y) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == Ternary::true_ && y[k] != Ternary::true_) return false;
    if (y[k] == Ternary::false_ && x[k] != Ternary::false_) return false;
  }
  return true;
}

std::vector<Ternary> constant_signature(std::size_t n, Ternary t) { return std::vector<Ternary>(n, t); }

}  // namespace

Hierarchy build_hierarchy(const Snapshot& snap) {
  Evaluator ev(snap);
  Hierarchy h;
  h.universe = ev.universe();
  const std::size_t n = h.universe.size();
  h.nodes.push_back({{"any"}, Sdnf::truth(), constant_signature(n, Ternary::true_)});
  h.nodes.push_back({{"empty"}, Sdnf::falsity(), constant_signature(n, Ternary::false_)});

  for (const auto& [name, def] : snap->classes) {
    auto sig = ev.signature(def.intent);
    auto it = std::find_if(h.nodes.begin(), h.nodes.end(),
                           [&](const HierarchyNode& node) { return node.signature == sig; });
    if (it == h.nodes.end()) {
      h.nodes.push_back({{name}, def.intent, std::move(sig)});
    } else {
      it->members.push_back(name);
    }
  }
  for (auto& node : h.nodes) {
    for (Ternary t : node.signature) {
      node.n_true += t == Ternary::true_;
      node.n_false += t == Ternary::false_;
      node.n_unknown += t == Ternary::unknown;
    }
  }

  auto intent_of = [&](const std::string& member) -> Sdnf {
    if (member == "any") return Sdnf::truth();
    if (member == "empty") return Sdnf::falsity();
    return snap->classes.at(member).intent;
  };
  const std::size_t m = h.nodes.size();
  // lt[i][j]: node i strictly below node j. With no objects every signature
  // coincides and only empty < any is kept.
  std::vector<std::vector<char>> lt(m, std::vector<char>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && below(h.nodes[i].signature, h.nodes[j].signature) &&
          (!below(h.nodes[j].signature, h.nodes[i].signature) || (i == 1 && j == 0)))
        lt[i][j] = 1;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!lt[i][j]) continue;
      bool covered = false;
      for (std::size_t k = 0; k < m && !covered; ++k) covered = lt[i][k] && lt[k][j];
      if (covered) continue;
      bool logical = false;
      for (const auto& a : h.nodes[i].members)
        for (const auto& b : h.nodes[j].members)
          logical = logical || logically_implies(intent_of(a), intent_of(b));
      h.edges.push_back({i, j, logical});
    }
  }
  return h;
}

ImplicationReport implication_report(const Snapshot& snap) {
  Evaluator ev(snap);
  std::vector<std::pair<std::string, std::vector<OidId>>> ext;
  for (const auto& [name, def] : snap->classes) ext.emplace_back(name, ev.extent(def.intent).true_set);
  ImplicationReport r;
  for (const auto& [a, ta] : ext) {
    for (const auto& [b, tb] : ext) {
      if (a == b) continue;
      const Sdnf& ia = snap->classes.at(a).intent;
      const Sdnf& ib = snap->classes.at(b).intent;
      if (a < b && ia == ib) r.logical_equivalences.emplace_back(a, b);
      if (a < b && ta == tb) r.database_equivalences.emplace_back(a, b);
      if (logically_implies(ia, ib)) r.logical_implications.emplace_back(a, b);
      if (std::includes(tb.begin(), tb.end(), ta.begin(), ta.end()))
        r.database_implications.emplace_back(a, b);
    }
  }
  return r;
}

namespace {

// Every atom occurring in a defined class, by text.
std::map<std::string, AtomPtr> vocabulary(const StoreState& s) {
  std::map<std::string, AtomPtr> out;
  for (const auto& [name, def] : s.classes)
    for (const auto& c : def.intent.conjuncts())
      for (const auto& l : c.literals) out.emplace(l.atom->text, l.atom);
  return out;
}

Sdnf single(const AtomPtr& a, bool negated = false) {
  return Sdnf(std::vector<Conjunct>{Conjunct{{Literal{a, negated}}}});
}

}  // namespace

Description describe(const Snapshot& snap, const std::vector<OidId>& oids) {
  if (oids.empty()) throw Error(ErrorCode::EmptyOidSet, "describe needs at least one oid");
  for (OidId id : oids)
    if (!snap->exists(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  std::vector<OidId> set(oids);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());

  Evaluator ev(snap);
  std::vector<Literal> decided;
  for (const auto& [text, atom] : vocabulary(*snap)) {
    Sdnf probe = single(atom);
    bool all_true = true, all_false = true;
    for (OidId id : set) {
      Ternary t = ev.eval_sdnf(probe, id);
      all_true = all_true && t == Ternary::true_;
      all_false = all_false && t == Ternary::false_;
    }
    if (all_true) decided.push_back(Literal{atom, false});
    if (all_false) decided.push_back(Literal{atom, true});
  }
  Description d;
  for (const auto& l : decided) {
    bool implied = std::any_of(decided.begin(), decided.end(), [&](const Literal& other) {
      return !(other == l) && literal_entails(other, l);
    });
    if (!implied) d.conjunct.literals.push_back(l);
  }
  std::sort(d.conjunct.literals.begin(), d.conjunct.literals.end(),
            [](const Literal& x, const Literal& y) { return x.text() < y.text(); });

  for (const auto& [name, def] : snap->classes) {
    std::size_t in = 0;
    for (OidId id : set) in += ev.eval_sdnf(def.intent, id) == Ternary::true_;
    d.membership[name] = Rational(static_cast<long long>(in), static_cast<long long>(set.size()));
  }
  return d;
}

std::vector<RuleSuggestion> suggest_rules(const Snapshot& snap) {
  Evaluator ev(snap);
  auto vocab = vocabulary(*snap);
  std::vector<std::pair<std::string, Sdnf>> contexts{{"any", Sdnf::truth()}};
  for (const auto& [name, def] : snap->classes) contexts.emplace_back(name, def.intent);

  // Per-atom signatures, computed once.
  std::map<std::string, std::vector<Ternary>> sig;
  for (const auto& [text, atom] : vocab) sig[text] = ev.signature(single(atom));

  std::vector<RuleSuggestion> out;
  for (const auto& [pname, pint] : contexts) {
    std::vector<Ternary> p = ev.signature(pint);
    if (std::none_of(p.begin(), p.end(), [](Ternary t) { return t == Ternary::true_; })) continue;
    for (const auto& [rt, r] : vocab) {
      for (const auto& [st, s] : vocab) {
        if (rt == st || atom_entails(*r, *s) || logically_implies(pint, single(s))) continue;
        const auto& rs = sig[rt];
        const auto& ss = sig[st];
        std::size_t both = 0;
        bool witness = false;
        for (std::size_t k = 0; k < p.size() && !witness; ++k) {
          if (p[k] != Ternary::true_ || rs[k] != Ternary::true_) continue;
          if (ss[k] == Ternary::true_) ++both;
          if (ss[k] == Ternary::false_) witness = true;
        }
        if (witness || both == 0) continue;
        out.push_back({pname, pint, r, s, both});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const RuleSuggestion& a, const RuleSuggestion& b) {
    return std::tie(a.context, a.antecedent->text, a.consequent->text) <
           std::tie(b.context, b.antecedent->text, b.consequent->text);
  });
  return out;
}

std::vector<SummaryRow> summarize(const Snapshot& snap, const std::string& attr) {
  std::map<Value, std::vector<OidId>> groups;
  for (const auto& [id, attrs] : snap->objects) {
    auto it = attrs.find(attr);
    if (it == attrs.end()) continue;
    std::vector<Value> distinct = it->second;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (const auto& v : distinct) groups[v].push_back(id);
  }
  if (groups.empty()) throw Error(ErrorCode::UnknownAttribute, "no object has attribute '" + attr + "'");

  std::vector<SummaryRow> out;
  for (const auto& [value, ids] : groups) {
    SummaryRow row{value, ids.size(), {}};
    std::map<std::string, std::vector<Value>> lists;
    for (OidId id : ids)
      for (const auto& [name, values] : snap->objects.at(id))
        if (name != attr) lists[name].insert(lists[name].end(), values.begin(), values.end());
    for (const auto& [name, values] : lists) {
      AttributeAggregates agg;
      agg.numeric = std::all_of(values.begin(), values.end(), [](const Value& v) { return v.is_number(); });
      agg.values[Aggr::cnt] = aggregate(Aggr::cnt, values);
      if (agg.numeric)
        for (Aggr fn : {Aggr::sum, Aggr::avg, Aggr::std, Aggr::min, Aggr::max})
          agg.values[fn] = aggregate(fn, values);
      row.others.emplace(name, std::move(agg));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace classalg
