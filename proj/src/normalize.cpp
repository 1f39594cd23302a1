#include "classalg/normalize.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>

#include "classalg/error.hpp"

namespace classalg {

ClassResolver no_classes() {
  return [](const std::string&) -> const Sdnf* { return nullptr; };
}

// ---------------------------------------------------------------------------
// Step 1
// ---------------------------------------------------------------------------

namespace {

WherePtr membership_atom(Path path, const ClassExpr& target, const NormalizeContext& ctx) {
  if (path.empty()) return to_where_form(target, ctx);
  Sdnf s = sdnf(target, ctx);
  if (s.is_false()) return make_const(false);
  return make_pred(Membership{std::move(path), s.to_class()});
}

}  // namespace

WherePtr to_where_form(const ClassExpr& e, const NormalizeContext& ctx) {
  return std::visit(
      [&](const auto& x) -> WherePtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ClassName>) {
          if (x.name == "any") return make_const(true);
          if (x.name == "empty") return make_const(false);
          if (ctx.defining && *ctx.defining == x.name)
            throw Error(ErrorCode::InliningCycle, "class '" + x.name + "' refers to itself");
          const Sdnf* s = ctx.resolve(x.name);
          if (!s) throw Error(ErrorCode::UnknownClassName, "unknown class '" + x.name + "'");
          return s->to_where();
        } else if constexpr (std::is_same_v<T, SetExpr>) {
          WherePtr l = to_where_form(*x.lhs, ctx);
          WherePtr r = to_where_form(*x.rhs, ctx);
          switch (x.op) {
            case SetOp::union_: return make_or(l, r);
            case SetOp::intersection: return make_and(l, r);
            case SetOp::difference: return make_and(l, make_not(r));
          }
          return l;
        } else if constexpr (std::is_same_v<T, DotExpr>) {
          // C.r1.r2 is "inv(r1.r2) in C".
          Path path{x.step};
          const ClassExpr* root = x.base.get();
          while (const auto* d = std::get_if<DotExpr>(&root->node)) {
            path.push_back(d->step);
            root = d->base.get();
          }
          std::reverse(path.begin(), path.end());
          return membership_atom(std::move(path), *root, ctx);
        } else {
          return make_and(to_where_form(*x.base, ctx), canonical_where(*x.cond, ctx));
        }
      },
      e.node);
}

WherePtr canonical_where(const WhereCond& w, const NormalizeContext& ctx) {
  return std::visit(
      [&](const auto& x) -> WherePtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConstCond>) {
          return make_const(x.value);
        } else if constexpr (std::is_same_v<T, NotCond>) {
          return make_not(canonical_where(*x.operand, ctx));
        } else if constexpr (std::is_same_v<T, BinaryCond>) {
          WherePtr l = canonical_where(*x.lhs, ctx);
          WherePtr r = canonical_where(*x.rhs, ctx);
          return x.op == Connective::and_ ? make_and(l, r) : make_or(l, r);
        } else {
          if (const auto* m = std::get_if<Membership>(&x.pred))
            return membership_atom(m->path, *m->target, ctx);
          return make_pred(x.pred);
        }
      },
      w.node);
}

// ---------------------------------------------------------------------------
// Step 2
// ---------------------------------------------------------------------------

namespace {

using LitList = std::vector<Literal>;

struct DnfBuilder {
  const NormalizeOptions& opts;
  std::map<std::string, AtomPtr> atoms;

  void check(std::size_t n) const {
    if (n > opts.max_conjuncts)
      throw Error(ErrorCode::SizeBudgetExceeded,
                  "disjunctive form exceeds " + std::to_string(opts.max_conjuncts) + " conjuncts");
  }

  AtomPtr intern(const BasicPredicate& p) {
    AtomPtr a = make_atom(p);
    auto [it, inserted] = atoms.emplace(a->text, a);
    return it->second;
  }

  // Returns false when the merged conjunct contains x&~x.
  static bool merge(const LitList& a, const LitList& b, LitList& out) {
    out.clear();
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (std::size_t i = 1; i < out.size(); ++i)
      if (out[i - 1].atom->text == out[i].atom->text) return false;
    return true;
  }

  std::vector<LitList> product(const std::vector<LitList>& a, const std::vector<LitList>& b) {
    check(a.size() * b.size());
    std::vector<LitList> out;
    LitList tmp;
    for (const auto& x : a)
      for (const auto& y : b)
        if (merge(x, y, tmp)) out.push_back(tmp);
    return out;
  }

  std::vector<LitList> run(const WhereCond& w, bool neg) {
    return std::visit(
        [&](const auto& x) -> std::vector<LitList> {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConstCond>) {
            if (x.value != neg) return {LitList{}};
            return {};
          } else if constexpr (std::is_same_v<T, NotCond>) {
            return run(*x.operand, !neg);
          } else if constexpr (std::is_same_v<T, BinaryCond>) {
            auto l = run(*x.lhs, neg);
            auto r = run(*x.rhs, neg);
            bool conj = (x.op == Connective::and_) != neg;
            if (conj) return product(l, r);
            check(l.size() + r.size());
            l.insert(l.end(), r.begin(), r.end());
            return l;
          } else {
            return {LitList{Literal{intern(x.pred), neg}}};
          }
        },
        w.node);
  }
};

}  // namespace

std::vector<Conjunct> to_disjunctive_form(const WhereCond& w, const NormalizeOptions& opts) {
  DnfBuilder b{opts, {}};
  std::vector<Conjunct> out;
  for (auto& l : b.run(w, false)) out.push_back(Conjunct{std::move(l)});
  return out;
}

// ---------------------------------------------------------------------------
// Generalized subsumption
// ---------------------------------------------------------------------------

namespace {

bool chain_entails(RelOp a, const Value& y, RelOp b, const Value& z) {
  if (y.is_number() != z.is_number()) return false;
  switch (a) {
    case RelOp::lt:
      return (b == RelOp::lt || b == RelOp::le) && y <= z;
    case RelOp::le:
      return (b == RelOp::lt && y < z) || (b == RelOp::le && y <= z);
    case RelOp::gt:
      return (b == RelOp::gt || b == RelOp::ge) && y >= z;
    case RelOp::ge:
      return (b == RelOp::gt && y > z) || (b == RelOp::ge && y >= z);
    case RelOp::eq:
      switch (b) {
        case RelOp::lt: return y < z;
        case RelOp::le: return y <= z;
        case RelOp::gt: return y > z;
        case RelOp::ge: return y >= z;
        case RelOp::eq: return y == z;
      }
  }
  return false;
}

}  // namespace

bool atom_entails(const Atom& a, const Atom& b) {
  if (a.text == b.text) return true;
  if (const auto* x = std::get_if<Compare>(&a.pred)) {
    const auto* y = std::get_if<Compare>(&b.pred);
    if (!y || x->complement || y->complement || !(x->attr == y->attr)) return false;
    return chain_entails(x->op, x->constant, y->op, y->constant);
  }
  if (const auto* x = std::get_if<AggregateCompare>(&a.pred)) {
    const auto* y = std::get_if<AggregateCompare>(&b.pred);
    if (!y || x->complement || y->complement || x->fn != y->fn || !(x->attr == y->attr))
      return false;
    return chain_entails(x->op, Value(x->constant), y->op, Value(y->constant));
  }
  return false;
}

bool literal_entails(const Literal& a, const Literal& b) {
  if (a.negated != b.negated) return false;
  return a.negated ? atom_entails(*b.atom, *a.atom) : atom_entails(*a.atom, *b.atom);
}

bool conjunct_entails(const Conjunct& a, const Conjunct& b) {
  return std::all_of(b.literals.begin(), b.literals.end(), [&](const Literal& lb) {
    return std::any_of(a.literals.begin(), a.literals.end(),
                       [&](const Literal& la) { return literal_entails(la, lb); });
  });
}

bool logically_implies(const Sdnf& d, const Sdnf& e) {
  return std::all_of(d.conjuncts().begin(), d.conjuncts().end(), [&](const Conjunct& c) {
    return std::any_of(e.conjuncts().begin(), e.conjuncts().end(),
                       [&](const Conjunct& c2) { return conjunct_entails(c, c2); });
  });
}

// ---------------------------------------------------------------------------
// Steps 3 and 4
// ---------------------------------------------------------------------------

namespace {

struct Cube {
  std::uint64_t pos = 0, neg = 0;
  friend bool operator==(const Cube&, const Cube&) = default;
};

bool absorbs(const Cube& x, const Cube& y) {
  return (x.pos & ~y.pos) == 0 && (x.neg & ~y.neg) == 0;
}

// Iterated consensus with absorption: the Blake canonical form.
std::vector<Cube> blake(std::vector<Cube> input, const NormalizeOptions& opts) {
  std::vector<Cube> cur;
  std::vector<char> dead;
  auto add = [&](const Cube& c) {
    for (std::size_t k = 0; k < cur.size(); ++k)
      if (!dead[k] && absorbs(cur[k], c)) return;
    for (std::size_t k = 0; k < cur.size(); ++k)
      if (!dead[k] && absorbs(c, cur[k])) dead[k] = 1;
    cur.push_back(c);
    dead.push_back(0);
    if (cur.size() > opts.max_conjuncts)
      throw Error(ErrorCode::SizeBudgetExceeded,
                  "prime implicant search exceeds " + std::to_string(opts.max_conjuncts) +
                      " conjuncts");
  };
  for (const auto& c : input) add(c);
  for (std::size_t i = 0; i < cur.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (dead[i]) break;
      if (dead[j]) continue;
      const Cube a = cur[i], b = cur[j];
      std::uint64_t opp = (a.pos & b.neg) | (a.neg & b.pos);
      if (std::popcount(opp) != 1) continue;
      add(Cube{(a.pos | b.pos) & ~opp, (a.neg | b.neg) & ~opp});
    }
  }
  std::vector<Cube> out;
  for (std::size_t k = 0; k < cur.size(); ++k)
    if (!dead[k]) out.push_back(cur[k]);
  return out;
}

std::vector<Conjunct> prime_pass(const std::vector<Conjunct>& d, const NormalizeOptions& opts) {
  std::map<std::string, AtomPtr> by_text;
  for (const auto& c : d)
    for (const auto& l : c.literals) by_text.emplace(l.atom->text, l.atom);
  if (by_text.size() > opts.max_atoms || by_text.size() > 64)
    throw Error(ErrorCode::SizeBudgetExceeded,
                "expression has " + std::to_string(by_text.size()) + " distinct atoms (limit " +
                    std::to_string(std::min<std::size_t>(opts.max_atoms, 64)) + ")");
  std::vector<AtomPtr> atoms;
  std::map<std::string, int> index;
  for (auto& [t, a] : by_text) {
    index[t] = static_cast<int>(atoms.size());
    atoms.push_back(a);
  }
  const int n = static_cast<int>(atoms.size());
  // entails[i] = atoms j != i with atom i |- atom j
  std::vector<std::uint64_t> entails(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && atom_entails(*atoms[i], *atoms[j])) entails[i] |= std::uint64_t{1} << j;

  std::vector<Cube> cubes;
  for (const auto& c : d) {
    Cube q;
    for (const auto& l : c.literals) {
      std::uint64_t bit = std::uint64_t{1} << index[l.atom->text];
      (l.negated ? q.neg : q.pos) |= bit;
    }
    cubes.push_back(q);
  }
  // The negated theory: a & ~b for every a |- b.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (entails[i] >> j & 1) cubes.push_back(Cube{std::uint64_t{1} << i, std::uint64_t{1} << j});

  auto consistent = [&](const Cube& c) {
    for (int i = 0; i < n; ++i)
      if ((c.pos >> i & 1) && (entails[i] & c.neg)) return false;
    return true;
  };
  std::vector<Cube> pis;
  for (const auto& c : blake(std::move(cubes), opts))
    if (consistent(c)) pis.push_back(c);

  auto to_conjunct = [&](const Cube& c) {
    Conjunct out;
    for (int i = 0; i < n; ++i) {
      if (c.pos >> i & 1) out.literals.push_back(Literal{atoms[i], false});
      if (c.neg >> i & 1) out.literals.push_back(Literal{atoms[i], true});
    }
    std::sort(out.literals.begin(), out.literals.end(),
              [](const Literal& x, const Literal& y) { return x.text() < y.text(); });
    return out;
  };
  std::vector<Conjunct> conj;
  for (const auto& c : pis) conj.push_back(to_conjunct(c));

  std::vector<Conjunct> out;
  for (std::size_t i = 0; i < conj.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < conj.size() && !subsumed; ++j) {
      if (i == j || !conjunct_entails(conj[i], conj[j])) continue;
      subsumed = !conjunct_entails(conj[j], conj[i]) || conj[j].text() < conj[i].text();
    }
    if (!subsumed) out.push_back(conj[i]);
  }
  return out;
}

struct Interval {
  std::size_t lower = 0, upper = 0;  // literal positions
  Rational lo, hi;
};

// The strict numeric interval on `attr`, if the conjunct has exactly one.
std::map<std::string, Interval> intervals(const Conjunct& c) {
  std::map<std::string, std::vector<std::size_t>> gt, lt;
  for (std::size_t k = 0; k < c.literals.size(); ++k) {
    const auto& l = c.literals[k];
    const auto* cmp = std::get_if<Compare>(&l.atom->pred);
    if (l.negated || !cmp || cmp->complement || !cmp->constant.is_number()) continue;
    if (cmp->op == RelOp::gt) gt[print(cmp->attr)].push_back(k);
    if (cmp->op == RelOp::lt) lt[print(cmp->attr)].push_back(k);
  }
  std::map<std::string, Interval> out;
  for (const auto& [key, g] : gt) {
    auto it = lt.find(key);
    if (g.size() != 1 || it == lt.end() || it->second.size() != 1) continue;
    Interval iv;
    iv.lower = g[0];
    iv.upper = it->second[0];
    iv.lo = std::get<Compare>(c.literals[iv.lower].atom->pred).constant.number();
    iv.hi = std::get<Compare>(c.literals[iv.upper].atom->pred).constant.number();
    out.emplace(key, iv);
  }
  return out;
}

Conjunct without(const Conjunct& c, std::size_t a, std::size_t b) {
  Conjunct out;
  for (std::size_t k = 0; k < c.literals.size(); ++k)
    if (k != a && k != b) out.literals.push_back(c.literals[k]);
  return out;
}

Literal with_constant(const Literal& l, const Rational& v) {
  Compare cmp = std::get<Compare>(l.atom->pred);
  cmp.constant = Value(v);
  return Literal{make_atom(cmp), false};
}

}  // namespace

std::vector<Conjunct> expand_intervals(const std::vector<Conjunct>& d) {
  std::vector<Conjunct> out = d;
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i == j) continue;
      auto ivs_i = intervals(out[i]);
      auto ivs_j = intervals(out[j]);
      for (const auto& [key, b] : ivs_j) {
        auto it = ivs_i.find(key);
        if (it == ivs_i.end()) continue;
        const Interval& a = it->second;
        // Widening an interval only preserves meaning when they overlap.
        if (std::max(a.lo, b.lo) >= std::min(a.hi, b.hi)) continue;
        Rational lo = std::min(a.lo, b.lo), hi = std::max(a.hi, b.hi);
        if (lo == b.lo && hi == b.hi) continue;
        if (!conjunct_entails(without(out[j], b.lower, b.upper), without(out[i], a.lower, a.upper)))
          continue;
        Conjunct widened = out[j];
        widened.literals[b.lower] = with_constant(widened.literals[b.lower], lo);
        widened.literals[b.upper] = with_constant(widened.literals[b.upper], hi);
        std::sort(widened.literals.begin(), widened.literals.end(),
                  [](const Literal& x, const Literal& y) { return x.text() < y.text(); });
        out[j] = std::move(widened);
        break;  // intervals of out[j] changed; recompute
      }
    }
  }
  return out;
}

std::vector<Conjunct> prime_implicants(const std::vector<Conjunct>& d, const NormalizeOptions& opts) {
  std::vector<Conjunct> cur = prime_pass(d, opts);
  for (int round = 0; round < 64; ++round) {
    Sdnf before(cur);
    std::vector<Conjunct> widened = expand_intervals(Sdnf(cur).conjuncts());
    if (Sdnf(widened) == before) break;
    cur = prime_pass(widened, opts);
  }
  return cur;
}

Sdnf sort_sdnf(std::vector<Conjunct> d) { return Sdnf(std::move(d)); }

Sdnf sdnf_of_where(const WhereCond& w, const NormalizeContext& ctx) {
  WherePtr c = canonical_where(w, ctx);
  return sort_sdnf(prime_implicants(to_disjunctive_form(*c, ctx.options), ctx.options));
}

Sdnf sdnf(const ClassExpr& e, const NormalizeContext& ctx) {
  WherePtr w = to_where_form(e, ctx);
  return sort_sdnf(prime_implicants(to_disjunctive_form(*w, ctx.options), ctx.options));
}

Sdnf set_op(const Sdnf& x, const Sdnf& y, SdnfOp op, const NormalizeOptions& opts) {
  WherePtr a = x.to_where(), b = y.to_where();
  WherePtr w = op == SdnfOp::union_         ? make_or(a, b)
               : op == SdnfOp::intersection ? make_and(a, b)
                                            : make_and(a, make_not(b));
  return sort_sdnf(prime_implicants(to_disjunctive_form(*w, opts), opts));
}

Sdnf complement(const Sdnf& x, const NormalizeOptions& opts) {
  return sort_sdnf(prime_implicants(to_disjunctive_form(*make_not(x.to_where()), opts), opts));
}

}  // namespace classalg
