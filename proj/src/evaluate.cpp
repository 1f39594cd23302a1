#include "classalg/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "classalg/error.hpp"

namespace classalg {

std::string_view to_string(Ternary t) {
  switch (t) {
    case Ternary::true_: return "true";
    case Ternary::false_: return "false";
    case Ternary::unknown: return "unknown";
  }
  return "?";
}

bool holds(RelOp op, int cmp) {
  switch (op) {
    case RelOp::lt: return cmp < 0;
    case RelOp::le: return cmp <= 0;
    case RelOp::gt: return cmp > 0;
    case RelOp::ge: return cmp >= 0;
    case RelOp::eq: return cmp == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Aggregates
// ---------------------------------------------------------------------------

double AggValue::to_double() const {
  double v = classalg::to_double(value);
  return is_root ? std::sqrt(v) : v;
}

namespace {

std::optional<Integer> exact_sqrt(const Integer& n) {
  if (n < 0) return std::nullopt;
  Integer r = boost::multiprecision::sqrt(n);
  if (r * r != n) return std::nullopt;
  return r;
}

}  // namespace

std::string AggValue::text() const {
  if (!is_root) return format_rational(value);
  auto n = exact_sqrt(boost::multiprecision::numerator(value));
  auto d = exact_sqrt(boost::multiprecision::denominator(value));
  if (n && d) return format_rational(Rational(*n, *d));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", to_double());
  return buf;
}

int AggValue::compare(const Rational& c) const {
  if (!is_root) return value < c ? -1 : value > c ? 1 : 0;
  if (c < 0) return 1;
  Rational sq = c * c;
  return value < sq ? -1 : value > sq ? 1 : 0;
}

std::optional<AggValue> aggregate(Aggr fn, const std::vector<Value>& values) {
  if (fn == Aggr::cnt) return AggValue{Rational(static_cast<long long>(values.size()))};
  if (values.empty()) return std::nullopt;
  for (const auto& v : values)
    if (!v.is_number())
      throw Error(ErrorCode::NonNumericAggregate,
                  std::string(to_string(fn)) + " needs numeric values, got " + v.to_text());
  Rational sum = 0, mn = values[0].number(), mx = values[0].number();
  for (const auto& v : values) {
    sum += v.number();
    mn = std::min(mn, v.number());
    mx = std::max(mx, v.number());
  }
  Rational n(static_cast<long long>(values.size()));
  Rational mean = sum / n;
  switch (fn) {
    case Aggr::sum: return AggValue{sum};
    case Aggr::avg: return AggValue{mean};
    case Aggr::min: return AggValue{mn};
    case Aggr::max: return AggValue{mx};
    case Aggr::std: {
      Rational sq = 0;
      for (const auto& v : values) sq += (v.number() - mean) * (v.number() - mean);
      return AggValue{sq / n, true};
    }
    case Aggr::cnt: break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

namespace {

Step flipped(const Step& s) { return Step{s.relation, !s.inverse}; }

Path inverse_path(const Path& p) {
  Path out;
  for (auto it = p.rbegin(); it != p.rend(); ++it) out.push_back(flipped(*it));
  return out;
}

bool intersects(const OidSet& a, const OidSet& b) {
  const OidSet& small = a.size() < b.size() ? a : b;
  const OidSet& big = a.size() < b.size() ? b : a;
  return std::any_of(small.begin(), small.end(), [&](OidId x) { return big.count(x) != 0; });
}

}  // namespace

Evaluator::Evaluator(Snapshot snap) : snap_(std::move(snap)) {
  for (const auto& o : snap_->all_oids()) {
    position_[o.id] = universe_.size();
    universe_.push_back(o.id);
  }
}

const RelationDef& Evaluator::relation(const std::string& name) const {
  auto it = snap_->relations.find(name);
  if (it == snap_->relations.end())
    throw Error(ErrorCode::UnknownRelationName, "unknown relation '" + name + "'");
  return it->second;
}

Ternary Evaluator::classify(Ternary t, OidId id) const {
  if (t != Ternary::true_ && snap_->is_virtual(id)) return Ternary::false_;
  return t;
}

const std::vector<Ternary>& Evaluator::class_values(const ClassExpr& e, const std::string& key) {
  auto it = class_cache_.find(key);
  if (it != class_cache_.end()) return it->second;
  std::vector<Ternary> values(universe_.size(), Ternary::false_);
  for (std::size_t k = 0; k < universe_.size(); ++k)
    if (snap_->is_real(universe_[k])) values[k] = eval_class(e, universe_[k]);
  return class_cache_.emplace(key, std::move(values)).first->second;
}

const OidSet& Evaluator::true_real_set(const ClassExpr& e) {
  std::string key = print(e);
  auto it = true_set_cache_.find(key);
  if (it != true_set_cache_.end()) return it->second;
  // Placeholder breaks recursion through a class relation defined in terms
  // of itself: the inner use sees an empty extent.
  true_set_cache_.emplace(key, OidSet{});
  OidSet out;
  for (const auto& [id, attrs] : snap_->objects)
    if (eval_class(e, id) == Ternary::true_) out.insert(id);
  return true_set_cache_[key] = std::move(out);
}

OidSet Evaluator::dot_relation(const OidSet& sources, const Step& step) {
  const RelationDef& def = relation(step.relation);
  OidSet out;
  if (sources.empty()) return out;
  if (const auto* e = std::get_if<ExplicitRelation>(&def.body)) {
    const auto& adj = step.inverse ? e->backward : e->forward;
    for (OidId s : sources) {
      auto it = adj.find(s);
      if (it != adj.end()) out.insert(it->second.begin(), it->second.end());
    }
  } else if (const auto* c = std::get_if<ClassRelation>(&def.body)) {
    const OidSet& from = true_real_set(step.inverse ? *c->range : *c->domain);
    if (intersects(sources, from)) out = true_real_set(step.inverse ? *c->domain : *c->range);
  } else {
    const auto& path = std::get<CompositeRelation>(def.body).path;
    out = dot_path(sources, step.inverse ? inverse_path(path) : path);
  }
  return out;
}

OidSet Evaluator::dot_path(const OidSet& sources, const Path& path) {
  OidSet cur = sources;
  for (const auto& s : path) cur = dot_relation(cur, s);
  return cur;
}

OidSet Evaluator::inverse_image(const OidSet& targets, const std::string& rel) {
  return dot_relation(targets, Step{rel, true});
}

std::vector<Value> Evaluator::dot_attribute_values(const OidSet& sources, const AttrExp& attr) {
  std::vector<Value> out;
  for (OidId id : dot_path(sources, attr.path)) {
    auto it = snap_->objects.find(id);
    if (it == snap_->objects.end()) continue;
    auto a = it->second.find(attr.attribute);
    if (a != it->second.end()) out.insert(out.end(), a->second.begin(), a->second.end());
  }
  return out;
}

std::set<std::pair<OidId, OidId>> Evaluator::reflexive_transitive_closure(const std::string& name) {
  const RelationDef& def = relation(name);
  const auto* e = std::get_if<ExplicitRelation>(&def.body);
  if (!e) throw Error(ErrorCode::NotExplicit, "relation '" + name + "' is not an explicit relation");
  OidSet field;
  for (const auto& [a, b] : e->edges) {
    field.insert(a);
    field.insert(b);
  }
  std::set<std::pair<OidId, OidId>> out;
  for (OidId start : field) {
    std::set<OidId> seen{start};
    std::deque<OidId> queue{start};
    while (!queue.empty()) {
      OidId cur = queue.front();
      queue.pop_front();
      auto it = e->forward.find(cur);
      if (it == e->forward.end()) continue;
      for (OidId next : it->second)
        if (seen.insert(next).second) queue.push_back(next);
    }
    for (OidId reached : seen) out.emplace_hint(out.end(), start, reached);
  }
  return out;
}

Ternary Evaluator::eval_real_predicate(const BasicPredicate& p, OidId id) {
  if (hook_) {
    if (auto v = hook_(p, id)) return *v;
  }
  return std::visit(
      [&](const auto& x) -> Ternary {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Membership>) {
          if (x.path.empty()) return eval_class(*x.target, id);
          const auto& target = class_values(*x.target, print(*x.target));
          Ternary out = Ternary::false_;
          for (OidId o : dot_path({id}, inverse_path(x.path))) {
            out = kleene_or(out, target[position_.at(o)]);
            if (out == Ternary::true_) break;
          }
          return out;
        } else if constexpr (std::is_same_v<T, AggregateCompare>) {
          std::vector<Value> values = dot_attribute_values({id}, x.attr);
          std::optional<AggValue> agg;
          try {
            agg = aggregate(x.fn, values);
          } catch (const Error&) {
            agg.reset();  // strings under a numeric aggregate
          }
          Ternary plain = agg ? to_ternary(holds(x.op, agg->compare(x.constant))) : Ternary::unknown;
          if (x.complement) return plain == Ternary::true_ ? Ternary::false_ : Ternary::true_;
          return plain;
        } else {
          std::vector<Value> values = dot_attribute_values({id}, x.attr);
          bool undefined = values.empty();
          if constexpr (std::is_same_v<T, TypeTest>) {
            if (undefined) return Ternary::unknown;
            return to_ternary(std::all_of(values.begin(), values.end(), [&](const Value& v) {
              return v.primitive_class() == x.cls;
            }));
          } else if constexpr (std::is_same_v<T, Compare>) {
            Ternary plain = Ternary::false_;
            for (const auto& v : values) {
              if (v.is_number() != x.constant.is_number()) {
                plain = Ternary::unknown;
                continue;
              }
              int cmp = v < x.constant ? -1 : x.constant < v ? 1 : 0;
              if (holds(x.op, cmp)) {
                plain = Ternary::true_;
                break;
              }
            }
            if (x.complement) return plain == Ternary::true_ ? Ternary::false_ : Ternary::true_;
            return plain;
          } else {
            auto occurs = [&](const Value& s) {
              return std::find(values.begin(), values.end(), s) != values.end();
            };
            bool plain = x.op == ContainOp::has
                             ? std::all_of(x.values.begin(), x.values.end(), occurs)
                             : std::any_of(values.begin(), values.end(), [&](const Value& v) {
                                 return std::binary_search(x.values.begin(), x.values.end(), v);
                               });
            switch (x.fusion) {
              case Fusion::plain: return to_ternary(!undefined && plain);
              case Fusion::complement: return to_ternary(undefined || !plain);
              case Fusion::quasi: return undefined ? Ternary::unknown : to_ternary(!plain);
              case Fusion::complement_quasi: return undefined ? Ternary::unknown : to_ternary(plain);
            }
            return Ternary::unknown;
          }
        }
      },
      p);
}

namespace {

// The plain atom an atom is a (possibly negated) restatement of: "~op" and
// "-op" negate the plain operator, "~-op" restates it.
std::pair<AtomPtr, bool> plain_form(const Atom& atom) {
  if (const auto* c = std::get_if<Compare>(&atom.pred); c && c->complement) {
    Compare plain = *c;
    plain.complement = false;
    return {make_atom(plain), true};
  }
  if (const auto* a = std::get_if<AggregateCompare>(&atom.pred); a && a->complement) {
    AggregateCompare plain = *a;
    plain.complement = false;
    return {make_atom(plain), true};
  }
  if (const auto* c = std::get_if<Contain>(&atom.pred); c && c->fusion != Fusion::plain) {
    Contain plain = *c;
    plain.fusion = Fusion::plain;
    return {make_atom(plain), c->fusion != Fusion::complement_quasi};
  }
  return {nullptr, false};
}

}  // namespace

Ternary home_atom_value(const Sdnf& home, const Atom& atom) {
  if (home.conjuncts().empty()) return Ternary::false_;
  auto [plain, negate] = plain_form(atom);
  const Atom& target = plain ? *plain : atom;
  bool asserted = false;
  for (const auto& l : home.conjuncts().front().literals) {
    auto [lp, lneg] = plain_form(*l.atom);
    // The literal asserts its plain atom when its sign and the restatement
    // agree.
    if (l.negated != lneg) continue;
    if (atom_entails(lp ? *lp : *l.atom, target)) {
      asserted = true;
      break;
    }
  }
  return to_ternary(asserted != negate);
}

Ternary eval_sdnf_at_home(const Sdnf& s, const Sdnf& home) {
  Ternary out = Ternary::false_;
  for (const auto& c : s.conjuncts()) {
    Ternary conj = Ternary::true_;
    for (const auto& l : c.literals) {
      Ternary v = home_atom_value(home, *l.atom);
      conj = kleene_and(conj, l.negated ? kleene_not(v) : v);
    }
    out = kleene_or(out, conj);
  }
  return out;
}

Ternary Evaluator::virtual_atom(const Atom& atom, OidId id) {
  return home_atom_value(snap_->ledger.allocations.at(id), atom);
}

Ternary Evaluator::eval_virtual_where(const WhereCond& w, OidId id) {
  return std::visit(
      [&](const auto& x) -> Ternary {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstCond>) {
          return to_ternary(x.value);
        } else if constexpr (std::is_same_v<T, NotCond>) {
          return kleene_not(eval_virtual_where(*x.operand, id));
        } else if constexpr (std::is_same_v<T, BinaryCond>) {
          Ternary a = eval_virtual_where(*x.lhs, id);
          Ternary b = eval_virtual_where(*x.rhs, id);
          return x.op == Connective::and_ ? kleene_and(a, b) : kleene_or(a, b);
        } else {
          return virtual_atom(*make_atom(x.pred), id);
        }
      },
      w.node);
}

Ternary Evaluator::eval_predicate(const BasicPredicate& p, OidId id) {
  if (snap_->is_virtual(id))
    return eval_virtual_where(*canonical_where(*make_pred(p), snap_->context()), id);
  if (!snap_->is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  return eval_real_predicate(p, id);
}

Ternary Evaluator::eval_where(const WhereCond& w, OidId id) {
  if (snap_->is_virtual(id))
    return eval_virtual_where(*canonical_where(w, snap_->context()), id);
  return std::visit(
      [&](const auto& x) -> Ternary {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstCond>) {
          return to_ternary(x.value);
        } else if constexpr (std::is_same_v<T, NotCond>) {
          return kleene_not(eval_where(*x.operand, id));
        } else if constexpr (std::is_same_v<T, BinaryCond>) {
          Ternary a = eval_where(*x.lhs, id);
          Ternary b = eval_where(*x.rhs, id);
          return x.op == Connective::and_ ? kleene_and(a, b) : kleene_or(a, b);
        } else {
          return eval_predicate(x.pred, id);
        }
      },
      w.node);
}

Ternary Evaluator::eval_sdnf(const Sdnf& s, OidId id) {
  bool virt = snap_->is_virtual(id);
  if (!virt && !snap_->is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  Ternary out = Ternary::false_;
  for (const auto& c : s.conjuncts()) {
    Ternary conj = Ternary::true_;
    for (const auto& l : c.literals) {
      Ternary v = virt ? virtual_atom(*l.atom, id) : eval_real_predicate(l.atom->pred, id);
      conj = kleene_and(conj, l.negated ? kleene_not(v) : v);
      if (conj == Ternary::false_) break;
    }
    out = kleene_or(out, conj);
    if (out == Ternary::true_) break;
  }
  return out;
}

Ternary Evaluator::eval_class(const ClassExpr& e, OidId id) {
  if (snap_->is_virtual(id))
    return eval_virtual_where(*to_where_form(e, snap_->context()), id);
  return std::visit(
      [&](const auto& x) -> Ternary {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ClassName>) {
          if (x.name == "any") return Ternary::true_;
          if (x.name == "empty") return Ternary::false_;
          const ClassDef* c = snap_->find_class(x.name);
          if (!c) throw Error(ErrorCode::UnknownClassName, "unknown class '" + x.name + "'");
          return eval_sdnf(c->intent, id);
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          Ternary a = eval_class(*x.lhs, id);
          Ternary b = eval_class(*x.rhs, id);
          switch (x.op) {
            case SetOp::union_: return kleene_or(a, b);
            case SetOp::intersection: return kleene_and(a, b);
            case SetOp::difference: return kleene_and(a, kleene_not(b));
          }
          return Ternary::unknown;
        } else if constexpr (std::is_same_v<T, DotExpr>) {
          const auto& base = class_values(*x.base, print(*x.base));
          Ternary out = Ternary::false_;
          for (OidId o : dot_relation({id}, flipped(x.step))) {
            out = kleene_or(out, base[position_.at(o)]);
            if (out == Ternary::true_) break;
          }
          return out;
        } else {
          Ternary b = eval_class(*x.base, id);
          if (b == Ternary::false_) return b;
          return kleene_and(b, eval_where(*x.cond, id));
        }
      },
      e.node);
}

ExtentResult Evaluator::partition(const std::function<Ternary(OidId)>& f) {
  ExtentResult out;
  for (OidId id : universe_) {
    switch (classify(f(id), id)) {
      case Ternary::true_: out.true_set.push_back(id); break;
      case Ternary::false_: out.false_set.push_back(id); break;
      case Ternary::unknown: out.unknown_set.push_back(id); break;
    }
  }
  return out;
}

ExtentResult Evaluator::extent(const ClassExpr& e) {
  WherePtr canonical;
  if (!snap_->ledger.allocations.empty()) canonical = to_where_form(e, snap_->context());
  return partition([&](OidId id) {
    return snap_->is_virtual(id) ? eval_virtual_where(*canonical, id) : eval_class(e, id);
  });
}

ExtentResult Evaluator::extent(const Sdnf& s) {
  return partition([&](OidId id) { return eval_sdnf(s, id); });
}

ExtentResult Evaluator::extent_where(const WhereCond& w) {
  WherePtr canonical;
  if (!snap_->ledger.allocations.empty()) canonical = canonical_where(w, snap_->context());
  return partition([&](OidId id) {
    return snap_->is_virtual(id) ? eval_virtual_where(*canonical, id) : eval_where(w, id);
  });
}

std::vector<Ternary> Evaluator::signature(const Sdnf& s) {
  std::vector<Ternary> out;
  out.reserve(universe_.size());
  for (OidId id : universe_) out.push_back(classify(eval_sdnf(s, id), id));
  return out;
}

}  // namespace classalg
