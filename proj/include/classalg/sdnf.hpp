#pragma once

#include <memory>
#include <string>
#include <vector>

#include "classalg/syntax.hpp"

namespace classalg {

// A normalized basic predicate. Membership targets are already in canonical
// "any where <sdnf>" form, so the printed text identifies the atom.
struct Atom {
  BasicPredicate pred;
  std::string text;
};
using AtomPtr = std::shared_ptr<const Atom>;

AtomPtr make_atom(BasicPredicate pred);

struct Literal {
  AtomPtr atom;
  bool negated = false;

  std::string text() const { return negated ? "~" + atom->text : atom->text; }
};

// Orders by atom text, then polarity, so x and ~x sort adjacently.
bool operator<(const Literal& a, const Literal& b);
bool operator==(const Literal& a, const Literal& b);

struct Conjunct {
  std::vector<Literal> literals;  // sorted by text, duplicate-free; empty = true

  std::string text() const;
};

// Disjunction of prime implicants, canonically sorted. No conjuncts is
// false; a single empty conjunct is true.
class Sdnf {
 public:
  Sdnf() = default;
  explicit Sdnf(std::vector<Conjunct> conjuncts);  // sorts and deduplicates

  static Sdnf truth() { return Sdnf(std::vector<Conjunct>{Conjunct{}}); }
  static Sdnf falsity() { return Sdnf(); }

  const std::vector<Conjunct>& conjuncts() const { return conjuncts_; }
  bool is_true() const { return conjuncts_.size() == 1 && conjuncts_[0].literals.empty(); }
  bool is_false() const { return conjuncts_.empty(); }

  // Literals joined by "&", conjuncts by " V ", constants "true"/"false".
  const std::string& text() const { return text_; }

  // The Sdnf as a where-condition tree and as the class expression
  // "any where <text>" ("any"/"empty" for the constants).
  WherePtr to_where() const;
  ClassPtr to_class() const;

  friend bool operator==(const Sdnf& a, const Sdnf& b) { return a.text_ == b.text_; }
  friend bool operator<(const Sdnf& a, const Sdnf& b) { return a.text_ < b.text_; }

 private:
  std::vector<Conjunct> conjuncts_;
  std::string text_ = "false";
};

}  // namespace classalg
