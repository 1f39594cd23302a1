#include "classalg/probability.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "classalg/error.hpp"

namespace classalg {

namespace {

Rational ratio(std::size_t a, std::size_t n) {
  return Rational(static_cast<long long>(a), static_cast<long long>(n));
}

std::size_t universe_size(Evaluator& ev) {
  std::size_t n = ev.universe().size();
  if (n == 0) throw Error(ErrorCode::EmptyUniverse, "the object universe is empty");
  return n;
}

bool compare_holds(RelOp op, const Rational& lhs, const Rational& rhs) {
  switch (op) {
    case RelOp::lt: return lhs < rhs;
    case RelOp::le: return lhs <= rhs;
    case RelOp::gt: return lhs > rhs;
    case RelOp::ge: return lhs >= rhs;
    case RelOp::eq: return lhs == rhs;
  }
  return false;
}

}  // namespace

Rational probability(Evaluator& ev, const ClassExpr& e) {
  std::size_t n = universe_size(ev);
  return ratio(ev.extent(e).true_set.size(), n);
}

Rational probability(const ClassExpr& e, const Snapshot& snap) {
  Evaluator ev(snap);
  return probability(ev, e);
}

std::pair<Rational, Rational> belief_interval(Evaluator& ev, const ClassExpr& e) {
  std::size_t n = universe_size(ev);
  ExtentResult r = ev.extent(e);
  return {ratio(r.true_set.size(), n), Rational(1) - ratio(r.false_set.size(), n)};
}

std::pair<Rational, Rational> belief_interval(const ClassExpr& e, const Snapshot& snap) {
  Evaluator ev(snap);
  return belief_interval(ev, e);
}

StructuralCheck translate_structural(Structural kind, const ClassExpr& a, const ClassExpr& b,
                                     const Snapshot& snap) {
  Evaluator ev(snap);
  auto ta = ev.extent(a).true_set, tb = ev.extent(b).true_set;
  std::vector<OidId> tab;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(tab));
  StructuralCheck out;
  out.kind = kind;
  out.n = ev.universe().size();
  out.n_a = ta.size();
  out.n_b = tb.size();
  out.n_ab = tab.size();
  auto s = [](std::size_t v) { return std::to_string(v); };
  switch (kind) {
    case Structural::indep:
      out.satisfied = out.n_ab * out.n == out.n_a * out.n_b;
      out.equation = "|A&B|*N = |A|*|B|: " + s(out.n_ab) + "*" + s(out.n) + " = " + s(out.n_a) + "*" + s(out.n_b);
      break;
    case Structural::nonoverlap:
      out.satisfied = out.n_ab == 0;
      out.equation = "|A&B| = 0: " + s(out.n_ab) + " = 0";
      break;
    case Structural::subset:
      out.satisfied = out.n_ab == out.n_a;
      out.equation = "|A&B| = |A|: " + s(out.n_ab) + " = " + s(out.n_a);
      break;
  }
  return out;
}

ProbConstraint ProbConstraint::parse(std::string_view text) {
  ProbabilityText p = parse_probability_text(text);
  if (p.complement)
    throw Error(ErrorCode::InvalidConstraint, "complemented operators are not allowed in probability constraints");
  if (p.op == RelOp::eq)
    throw Error(ErrorCode::InvalidConstraint, "equality constraints are not allowed");
  if (p.bound <= 0 || p.bound >= 1)
    throw Error(ErrorCode::InvalidConstraint, "bound " + format_rational(p.bound) + " is outside (0, 1)");
  return ProbConstraint{p.numerator, p.condition, p.op, p.bound};
}

std::string ProbConstraint::text() const {
  std::string out = "Pr(" + print(*numerator);
  if (condition) out += "|" + print(*condition);
  out += ") ";
  out += to_string(op);
  out += " " + format_rational(bound);
  return out;
}

bool ratio_holds(RelOp op, const Rational& bound, const Integer& n_b, const Integer& n_ab) {
  bool lower = op == RelOp::ge || op == RelOp::gt;
  if (n_b == 0) return !lower;
  return compare_holds(op, Rational(n_ab, n_b), bound);
}

bool ratio_holds(const ProbConstraint& c, const Integer& n_b, const Integer& n_ab) {
  return ratio_holds(c.op, c.bound, n_b, n_ab);
}

Integer needed_lower(const Rational& c, const Integer& n_b, const Integer& n_ab, bool strict) {
  if (c >= 1) throw Error(ErrorCode::DivisionByZero, "lower bound must be below 1");
  RelOp op = strict ? RelOp::gt : RelOp::ge;
  Integer m = ceil_rational((c * Rational(n_b) - Rational(n_ab)) / (Rational(1) - c));
  if (m < 0) m = 0;
  while (!ratio_holds(op, c, n_b + m, n_ab + m)) ++m;
  return m;
}

Integer needed_upper(const Rational& c, const Integer& n_b, const Integer& n_ab, bool strict) {
  if (c <= 0) throw Error(ErrorCode::DivisionByZero, "upper bound must be above 0");
  RelOp op = strict ? RelOp::lt : RelOp::le;
  Integer m = ceil_rational(Rational(n_ab) / c - Rational(n_b));
  if (m < 0) m = 0;
  while (!ratio_holds(op, c, n_b + m, n_ab)) ++m;
  return m;
}

Integer cascade_count(const Rational& d, const Integer& n_ab, const Integer& n_x, const Integer& m,
                      bool strict) {
  RelOp op = strict ? RelOp::gt : RelOp::ge;
  Integer t = ceil_rational(d * Rational(n_ab) - Rational(n_x) + d * Rational(m));
  if (t < 0) t = 0;
  while (!ratio_holds(op, d, n_ab + m, n_x + t)) ++t;
  if (t > m)
    throw Error(ErrorCode::CascadeViolation,
                "cascade needs " + t.str() + " objects but only " + m.str() + " were added");
  return t;
}

namespace {

// A constraint with its nodes resolved against one snapshot.
struct Resolved {
  ProbConstraint c;
  Sdnf a, b, ab, home;
  std::string text;
};

std::vector<Resolved> resolve(const std::vector<ProbConstraint>& cs, const StoreState& s) {
  NormalizeContext ctx = s.context();
  std::vector<Resolved> out;
  for (const auto& c : cs) {
    Resolved r{c, sdnf(*c.numerator, ctx), c.condition ? sdnf(*c.condition, ctx) : Sdnf::truth(), {}, {}, c.text()};
    r.ab = set_op(r.a, r.b, SdnfOp::intersection, ctx.options);
    r.home = c.lower_family() ? r.ab : set_op(r.b, r.a, SdnfOp::difference, ctx.options);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string describe_violations(const ValidationResult& r, const std::vector<ProbConstraint>& cs) {
  std::string out;
  for (const auto& v : r.violations) {
    if (!out.empty()) out += "; ";
    out += "Type " + std::to_string(v.type) + ": " + v.message + " [";
    for (std::size_t i = 0; i < v.constraints.size(); ++i) {
      if (i) out += ", ";
      out += cs.at(v.constraints[i]).text();
    }
    out += "]";
  }
  return out;
}

ValidationResult validate_constraints(const std::vector<ProbConstraint>& cs, const Snapshot& snap) {
  ValidationResult out;
  std::vector<Resolved> rs = resolve(cs, *snap);
  std::size_t n = rs.size();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Resolved &x = rs[i], &y = rs[j];
      bool both_lower = x.c.lower_family() && y.c.lower_family();
      if (both_lower && x.a == y.b && x.b == y.a && !(x.a == x.b))
        out.violations.push_back({1, {i, j}, "mutual lower bounds on A|B and B|A"});
      if (both_lower && x.b == y.b && !(x.a == y.a))
        out.violations.push_back({2, {i, j}, "lower bounds on different numerators under one condition"});
      if (x.c.lower_family() != y.c.lower_family() && x.a == y.a && x.b == y.b)
        out.violations.push_back({3, {i, j}, "one conditional bounded from both sides"});
    }
  }

  // Type 4: a cycle through two labeled edges that share no endpoint. Nodes
  // are the constraints' A&B and B; hierarchy edges point from a node to
  // every node it implies.
  std::vector<Sdnf> nodes;
  auto node_of = [&](const Sdnf& s) {
    auto it = std::find(nodes.begin(), nodes.end(), s);
    if (it != nodes.end()) return static_cast<std::size_t>(it - nodes.begin());
    nodes.push_back(s);
    return nodes.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> labeled(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ab = node_of(rs[i].ab), b = node_of(rs[i].b);
    labeled[i] = rs[i].c.lower_family() ? std::make_pair(ab, b) : std::make_pair(b, ab);
  }
  std::size_t k = nodes.size();
  std::vector<std::vector<bool>> reach(k, std::vector<bool>(k, false));
  for (std::size_t u = 0; u < k; ++u) {
    reach[u][u] = true;
    for (std::size_t v = 0; v < k; ++v)
      if (u != v && logically_implies(nodes[u], nodes[v])) reach[u][v] = true;
  }
  for (const auto& [u, v] : labeled) reach[u][v] = true;
  for (std::size_t m = 0; m < k; ++m)
    for (std::size_t u = 0; u < k; ++u)
      if (reach[u][m])
        for (std::size_t v = 0; v < k; ++v)
          if (reach[m][v]) reach[u][v] = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto [u1, v1] = labeled[i];
      auto [u2, v2] = labeled[j];
      if (u1 == v1 || u2 == v2) continue;
      if (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2) continue;
      if (reach[v1][u2] && reach[v2][u1])
        out.violations.push_back({4, {i, j}, "cycle through two disconnected labeled edges"});
    }
  }
  return out;
}

namespace {

// Count simulation for one run. Real counts are fixed; virtual objects are
// tracked by home node.
// Inconsistent sets that pass validation make the allocations grow
// geometrically; past this many objects in one run the set is given up.
constexpr std::size_t kMaxAllocated = 1000000;

class Runner {
 public:
  Runner(Store& store, std::vector<Resolved> rs) : store_(store), rs_(std::move(rs)) {
    Snapshot snap = store_.snapshot();
    Evaluator ev(snap);
    auto count_real = [&](const Sdnf& s) {
      auto it = real_.find(s.text());
      if (it != real_.end()) return;
      std::size_t c = 0;
      for (OidId id : ev.extent(s).true_set) c += snap->is_real(id);
      real_.emplace(s.text(), Integer(c));
    };
    for (const auto& r : rs_) {
      count_real(r.b);
      count_real(r.ab);
      count_real(r.home);
    }
    for (const auto& [id, home] : snap->ledger.allocations) {
      homes_[home.text()].push_back(id);
      sdnfs_.emplace(home.text(), home);
    }
    for (const auto& r : rs_) {
      LabeledEdge e;
      e.up = r.c.lower_family();
      e.from = e.up ? r.ab.text() : r.b.text();
      e.to = e.up ? r.b.text() : r.ab.text();
      e.op = r.c.op;
      e.bound = r.c.bound;
      report_.edges.push_back(e);
    }
  }

  ApplyReport run() {
    std::vector<std::size_t> order(rs_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> depth(rs_.size());
    for (std::size_t i = 0; i < rs_.size(); ++i) depth[i] = specificity(start(i));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (depth[x] != depth[y]) return depth[x] > depth[y];
      return start(x).text() < start(y).text();
    });

    const std::size_t ceiling = 10000;
    std::size_t iterations = 0;
    for (std::size_t ci : order) {
      std::vector<std::size_t> stack{ci};
      while (!stack.empty()) {
        std::size_t j = stack.back();
        stack.pop_back();
        if (satisfied(j)) continue;
        if (++iterations > ceiling)
          throw Error(ErrorCode::ValidationGap,
                      "constraint processing did not settle; the set is likely inconsistent");
        process(j);
        for (std::size_t k = rs_.size(); k-- > 0;)
          if (!satisfied(k)) stack.push_back(k);
      }
    }
    for (std::size_t i = 0; i < rs_.size(); ++i) {
      bool ok = satisfied(i);
      report_.status.push_back({rs_[i].text, count(rs_[i].b), count(rs_[i].ab), ok});
      if (!ok) throw Error(ErrorCode::ValidationGap, rs_[i].text + " still fails after processing");
    }
    return std::move(report_);
  }

 private:
  const Sdnf& start(std::size_t i) const { return rs_[i].c.lower_family() ? rs_[i].ab : rs_[i].b; }

  // Number of constraint nodes strictly implied by s; larger is lower in
  // the lattice.
  std::size_t specificity(const Sdnf& s) const {
    std::set<std::string> seen;
    std::size_t n = 0;
    for (const auto& r : rs_)
      for (const Sdnf* t : {&r.b, &r.ab})
        if (!(*t == s) && seen.insert(t->text()).second && logically_implies(s, *t)) ++n;
    return n;
  }

  bool member(const std::string& home, const Sdnf& k) {
    auto key = std::make_pair(home, k.text());
    auto it = member_.find(key);
    if (it != member_.end()) return it->second;
    bool v = eval_sdnf_at_home(k, sdnfs_.at(home)) == Ternary::true_;
    member_.emplace(key, v);
    return v;
  }

  Integer count(const Sdnf& k) {
    Integer n = real_.at(k.text());
    for (const auto& [home, ids] : homes_)
      if (!ids.empty() && member(home, k)) n += ids.size();
    return n;
  }

  bool satisfied(std::size_t i) { return ratio_holds(rs_[i].c, count(rs_[i].b), count(rs_[i].ab)); }

  std::vector<bool> satisfied_all() {
    std::vector<bool> out(rs_.size());
    for (std::size_t i = 0; i < rs_.size(); ++i) out[i] = satisfied(i);
    return out;
  }

  void note(const Sdnf& s) { sdnfs_.emplace(s.text(), s); }

  OidId allocate(const Sdnf& home) {
    note(home);
    OidId id = store_.add_virtual(home);
    homes_[home.text()].push_back(id);
    report_.movements.push_back(store_.state().ledger.movements.back());
    ++report_.per_node_delta[home.text()];
    ++report_.allocated;
    return id;
  }

  // Simulated move; commit() records it in the store.
  OidId shift(const std::string& from, const std::string& to) {
    auto& ids = homes_.at(from);
    OidId id = ids.back();
    ids.pop_back();
    homes_[to].push_back(id);
    return id;
  }

  void commit(OidId id, const std::string& from, const Sdnf& to) {
    store_.move_virtual(id, to);
    report_.movements.push_back(store_.state().ledger.movements.back());
    --report_.per_node_delta[from];
    ++report_.per_node_delta[to.text()];
    ++report_.moved;
  }

  void move(const std::string& from, const Sdnf& to) {
    note(to);
    commit(shift(from, to.text()), from, to);
  }

  // Homes holding virtual objects paired with where their objects would go:
  // ancestors of `target` give to it directly, nearest first; other homes
  // move objects down to their meet with it.
  std::vector<std::pair<std::string, Sdnf>> donors(const Sdnf& target) {
    std::vector<std::string> above, beside;
    for (const auto& [home, ids] : homes_) {
      if (ids.empty() || home == target.text()) continue;
      (logically_implies(target, sdnfs_.at(home)) ? above : beside).push_back(home);
    }
    auto below = [&](const std::string& h) {
      std::size_t n = 0;
      for (const auto& o : above)
        if (o != h && logically_implies(sdnfs_.at(h), sdnfs_.at(o))) ++n;
      return n;
    };
    std::stable_sort(above.begin(), above.end(), [&](const std::string& x, const std::string& y) {
      std::size_t bx = below(x), by = below(y);
      return bx != by ? bx > by : x < y;
    });
    std::vector<std::pair<std::string, Sdnf>> out;
    for (const auto& h : above) out.emplace_back(h, target);
    for (const auto& h : beside) {
      Sdnf meet = set_op(sdnfs_.at(h), target, SdnfOp::intersection);
      if (meet.conjuncts().size() == 1 && !(meet == sdnfs_.at(h))) out.emplace_back(h, meet);
    }
    return out;
  }

  // A donation is safe when it leaves every currently satisfied constraint
  // satisfied. Failing that, an object may still move down to a meet; the
  // constraints it breaks go back on the stack.
  bool try_donate(const Sdnf& target, const std::function<bool(const std::string&)>& useful) {
    note(target);
    auto candidates = donors(target);
    for (bool require_safe : {true, false}) {
      for (const auto& [h, to] : candidates) {
        if (!useful(h) || homes_.at(h).empty()) continue;
        if (!require_safe && to == target) continue;
        note(to);
        if (!member(to.text(), target)) continue;
        std::vector<bool> before = satisfied_all();
        OidId id = shift(h, to.text());
        bool safe = true;
        for (std::size_t k = 0; k < rs_.size() && safe && require_safe; ++k)
          if (before[k] && !satisfied(k)) safe = false;
        if (safe) {
          commit(id, h, to);
          return true;
        }
        shift(to.text(), h);
      }
    }
    return false;
  }

  void process(std::size_t i) {
    const Resolved& r = rs_[i];
    if (r.home.is_false())
      throw Error(ErrorCode::Unsatisfiable, r.text + " has no node to receive virtual objects");
    note(r.home);
    if (!member(r.home.text(), r.b) || member(r.home.text(), r.ab) != r.c.lower_family())
      throw Error(ErrorCode::Unsatisfiable, r.text + " cannot be satisfied by adding objects at " + r.home.text());
    report_.edges[i].modified = true;

    AllocationStep step;
    step.constraint = i;
    step.node = r.home.text();
    step.n_b = count(r.b);
    step.n_ab = count(r.ab);
    Integer node_before = count(r.home);

    // Lower-bound dependents whose condition is this node, with their counts
    // before any change.
    struct Dependent {
      std::size_t j;
      Integer n_ab, n_x;
    };
    std::vector<Dependent> deps;
    if (r.c.lower_family())
      for (std::size_t j = 0; j < rs_.size(); ++j)
        if (j != i && rs_[j].c.lower_family() && rs_[j].b == r.ab && satisfied(j))
          deps.push_back({j, count(rs_[j].b), count(rs_[j].ab)});

    auto useful = [&](const std::string& h) {
      return r.c.lower_family() ? !member(h, r.ab) : !member(h, r.b);
    };
    while (!satisfied(i) && try_donate(r.home, useful)) ++step.moved;

    step.n_b_fresh = count(r.b);
    step.n_ab_fresh = count(r.ab);
    if (!satisfied(i)) {
      step.fresh = r.c.lower_family()
                       ? needed_lower(r.c.bound, step.n_b_fresh, step.n_ab_fresh, r.c.strict())
                       : needed_upper(r.c.bound, step.n_b_fresh, step.n_ab_fresh, r.c.strict());
      if (step.fresh + report_.allocated > kMaxAllocated)
        throw Error(ErrorCode::ValidationGap, r.text + " needs " + step.fresh.str() +
                                                  " more virtual objects; the set is likely inconsistent");
      for (Integer k = 0; k < step.fresh; ++k) allocate(r.home);
    }
    report_.steps.push_back(step);

    Integer delta = count(r.home) - node_before;
    for (const auto& d : deps) cascade(d.j, r.home, d.n_ab, d.n_x, delta, 0);
  }

  // Moves t of the objects just added under `node` down to constraint j's
  // A&B, then follows lower-bound constraints conditioned on that node.
  void cascade(std::size_t j, const Sdnf& node, const Integer& n_ab, const Integer& n_x,
               const Integer& m, std::size_t depth) {
    if (m == 0 || satisfied(j) || depth > rs_.size()) return;
    const Resolved& r = rs_[j];
    if (r.ab.is_false()) return;
    note(r.ab);
    Integer t = cascade_count(r.c.bound, n_ab, n_x, m, r.c.strict());

    std::vector<Resolved*> next;
    std::vector<std::pair<Integer, Integer>> next_counts;
    for (std::size_t k = 0; k < rs_.size(); ++k)
      if (k != j && rs_[k].c.lower_family() && rs_[k].b == r.ab && satisfied(k)) {
        next.push_back(&rs_[k]);
        next_counts.emplace_back(count(rs_[k].b), count(rs_[k].ab));
      }

    Integer before = count(r.ab);
    Integer moved = 0;
    // Objects homed at the processed node first, then any other home inside
    // it but outside the target.
    std::vector<std::string> sources{node.text()};
    for (const auto& [home, ids] : homes_)
      if (home != node.text() && member(home, node)) sources.push_back(home);
    for (const auto& h : sources) {
      if (!homes_.count(h) || h == r.ab.text() || member(h, r.ab)) continue;
      while (moved < t && !homes_.at(h).empty()) {
        move(h, r.ab);
        ++moved;
      }
    }
    report_.edges[j].modified = true;
    report_.cascades.push_back({j, node.text(), r.ab.text(), r.c.bound, n_ab, n_x, m, t});
    Integer delta = count(r.ab) - before;
    for (std::size_t k = 0; k < next.size(); ++k)
      cascade(static_cast<std::size_t>(next[k] - rs_.data()), r.ab, next_counts[k].first,
              next_counts[k].second, delta, depth + 1);
  }

  Store& store_;
  std::vector<Resolved> rs_;
  std::map<std::string, Integer> real_;
  std::map<std::string, std::vector<OidId>> homes_;
  std::map<std::string, Sdnf> sdnfs_;
  std::map<std::pair<std::string, std::string>, bool> member_;
  ApplyReport report_;
};

}  // namespace

ApplyReport apply_constraints(Store& store, const std::vector<ProbConstraint>& added) {
  std::vector<ProbConstraint> cs;
  std::set<std::string> seen;
  for (const auto& t : store.state().constraints) {
    ProbConstraint c = ProbConstraint::parse(t);
    if (seen.insert(c.text()).second) cs.push_back(std::move(c));
  }
  for (const auto& c : added)
    if (seen.insert(c.text()).second) cs.push_back(c);

  Store work = store;
  ValidationResult v = validate_constraints(cs, work.snapshot());
  if (!v.ok()) throw Error(ErrorCode::ForbiddenConstraint, describe_violations(v, cs));

  Runner runner(work, resolve(cs, work.state()));
  ApplyReport report = runner.run();
  for (auto it = report.per_node_delta.begin(); it != report.per_node_delta.end();)
    it = it->second == 0 ? report.per_node_delta.erase(it) : std::next(it);

  std::vector<std::string> texts;
  for (const auto& c : cs) texts.push_back(c.text());
  if (texts != work.state().constraints) work.set_constraints(std::move(texts));
  store = std::move(work);
  return report;
}

}  // namespace classalg
