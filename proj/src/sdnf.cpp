#include "classalg/sdnf.hpp"

#include <algorithm>

namespace classalg {

AtomPtr make_atom(BasicPredicate pred) {
  std::string text = print(pred);
  return std::make_shared<const Atom>(Atom{std::move(pred), std::move(text)});
}

bool operator<(const Literal& a, const Literal& b) {
  if (a.atom->text != b.atom->text) return a.atom->text < b.atom->text;
  return a.negated < b.negated;
}

bool operator==(const Literal& a, const Literal& b) {
  return a.negated == b.negated && a.atom->text == b.atom->text;
}

std::string Conjunct::text() const {
  if (literals.empty()) return "true";
  std::string out;
  for (const auto& l : literals) {
    if (!out.empty()) out += '&';
    out += l.text();
  }
  return out;
}

namespace {

// Conjuncts compare as words over their literal strings.
bool word_less(const Conjunct& a, const Conjunct& b) {
  return std::lexicographical_compare(
      a.literals.begin(), a.literals.end(), b.literals.begin(), b.literals.end(),
      [](const Literal& x, const Literal& y) { return x.text() < y.text(); });
}

}  // namespace

Sdnf::Sdnf(std::vector<Conjunct> conjuncts) : conjuncts_(std::move(conjuncts)) {
  for (auto& c : conjuncts_) {
    std::sort(c.literals.begin(), c.literals.end(),
              [](const Literal& x, const Literal& y) { return x.text() < y.text(); });
    c.literals.erase(std::unique(c.literals.begin(), c.literals.end()), c.literals.end());
  }
  std::sort(conjuncts_.begin(), conjuncts_.end(), word_less);
  conjuncts_.erase(std::unique(conjuncts_.begin(), conjuncts_.end(),
                               [](const Conjunct& a, const Conjunct& b) {
                                 return a.literals == b.literals;
                               }),
                   conjuncts_.end());
  // A true conjunct swallows the rest.
  if (std::any_of(conjuncts_.begin(), conjuncts_.end(),
                  [](const Conjunct& c) { return c.literals.empty(); })) {
    conjuncts_.assign(1, Conjunct{});
  }
  if (conjuncts_.empty()) {
    text_ = "false";
    return;
  }
  text_.clear();
  for (const auto& c : conjuncts_) {
    if (!text_.empty()) text_ += " V ";
    text_ += c.text();
  }
}

WherePtr Sdnf::to_where() const {
  if (is_false()) return make_const(false);
  WherePtr out;
  for (const auto& c : conjuncts_) {
    WherePtr conj;
    for (const auto& l : c.literals) {
      WherePtr lit = make_pred(l.atom->pred);
      if (l.negated) lit = make_not(lit);
      conj = conj ? make_and(conj, lit) : lit;
    }
    if (!conj) conj = make_const(true);
    out = out ? make_or(out, conj) : conj;
  }
  return out;
}

ClassPtr Sdnf::to_class() const {
  if (is_true()) return make_class("any");
  if (is_false()) return make_class("empty");
  return make_where(make_class("any"), to_where());
}

}  // namespace classalg
