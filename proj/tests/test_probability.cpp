#include "classalg/error.hpp"
#include "classalg/probability.hpp"
#include "doctest.h"

using namespace classalg;

namespace {

Rational q(long long a, long long b) { return Rational(a, b); }

ClassPtr cls(const char* text) { return parse_class_expr(text); }

// n_b objects with b=1, the first n_ab of them also with a=1, plus `rest`
// objects with neither.
Store ab_store(int n_b, int n_ab, int rest = 0) {
  Store st;
  for (int i = 0; i < n_b; ++i) {
    Attributes a{{"b", {1}}};
    if (i < n_ab) a["a"] = {1};
    st.create_object(a);
  }
  for (int i = 0; i < rest; ++i) st.create_object({});
  st.define_class("A", "any where a=1");
  st.define_class("B", "any where b=1");
  return st;
}

std::vector<int> types(const std::vector<std::string>& texts, const Store& st) {
  std::vector<ProbConstraint> cs;
  for (const auto& t : texts) cs.push_back(ProbConstraint::parse(t));
  std::vector<int> out;
  for (const auto& v : validate_constraints(cs, st.snapshot()).violations) out.push_back(v.type);
  return out;
}

}  // namespace

TEST_CASE("closed-form counts") {
  CHECK(needed_lower(q(1, 2), 10, 2) == 6);
  CHECK(needed_lower(q(3, 10), 10, 5) == 0);
  CHECK(needed_lower(q(9, 10), 1, 0) == 9);
  CHECK(needed_lower(q(1, 5), 9, 1) == 1);
  CHECK(needed_lower(q(1, 2), 10, 2, true) == 7);
  CHECK(needed_lower(q(1, 2), 0, 0) == 1);
  CHECK(needed_upper(q(3, 5), 5, 4) == 2);
  CHECK(needed_upper(q(1, 2), 2, 2) == 2);
  CHECK(needed_upper(q(1, 2), 2, 2, true) == 3);
  CHECK(needed_upper(q(1, 2), 10, 1) == 0);
  CHECK(cascade_count(q(1, 2), 4, 2, 4) == 2);
  CHECK(cascade_count(q(1, 2), 4, 2, 0) == 0);
  CHECK_THROWS_AS(needed_lower(Rational(1), 1, 0), Error);
}

TEST_CASE("brute force agrees with the closed forms") {
  for (int num = 1; num < 10; ++num) {
    Rational c = q(num, 10);
    for (int nb = 0; nb < 12; ++nb) {
      for (int nab = 0; nab <= nb; ++nab) {
        Integer m = 0;
        while (!ratio_holds(RelOp::ge, c, nb + m, nab + m)) ++m;
        CHECK(needed_lower(c, nb, nab) == m);
        Integer u = 0;
        while (!ratio_holds(RelOp::le, c, nb + u, nab)) ++u;
        CHECK(needed_upper(c, nb, nab) == u);
      }
    }
  }
}

TEST_CASE("cascade never exceeds the added count") {
  for (int num = 1; num < 10; ++num) {
    Rational d = q(num, 10);
    for (int nab = 1; nab < 10; ++nab)
      for (int nx = 0; nx <= nab; ++nx) {
        if (!ratio_holds(RelOp::ge, d, nab, nx)) continue;
        for (int m = 0; m < 10; ++m) {
          Integer t = cascade_count(d, nab, nx, m);
          CHECK(t <= m);
          CHECK(ratio_holds(RelOp::ge, d, nab + m, nx + t));
          if (t > 0) CHECK(!ratio_holds(RelOp::ge, d, nab + m, nx + t - 1));
        }
      }
  }
}

TEST_CASE("constraint parsing") {
  ProbConstraint c = ProbConstraint::parse("Pr(A|B) >= 0.3");
  CHECK(c.text() == "Pr(A|B) >= 0.3");
  CHECK(c.lower_family());
  CHECK(ProbConstraint::parse("Pr(A)<0.6").text() == "Pr(A) < 0.6");
  auto code = [](const char* t) {
    try {
      ProbConstraint::parse(t);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotFound;
  };
  CHECK(code("Pr(A) = 0.5") == ErrorCode::InvalidConstraint);
  CHECK(code("Pr(A) >= 1") == ErrorCode::InvalidConstraint);
  CHECK(code("Pr(A) >= 0") == ErrorCode::InvalidConstraint);
  CHECK(code("Pr(A) ~>= 0.5") == ErrorCode::InvalidConstraint);
  CHECK(code("Pr(A >= 0.5") == ErrorCode::SyntaxError);
}

TEST_CASE("probability and belief intervals") {
  Store st;
  for (int i = 0; i < 3; ++i) st.create_object({{"x", {1}}});
  st.create_object({{"x", {2}}});
  st.create_object({});
  auto bi = belief_interval(*cls("any where x ~-in {1}"), st.snapshot());
  CHECK(bi.first == q(3, 5));
  CHECK(bi.second == q(4, 5));
  CHECK(probability(*cls("any"), st.snapshot()) == 1);
  CHECK(probability(*cls("empty"), st.snapshot()) == 0);
  CHECK(probability(*cls("(any where x=1)+(any where x~=1)"), st.snapshot()) == 1);
  CHECK(probability(*cls("(any where x=1)*(any where x~=1)"), st.snapshot()) == 0);
  auto two = belief_interval(*cls("any where x=1"), st.snapshot());
  CHECK(two.first == two.second);

  Store empty;
  CHECK_THROWS_AS(probability(*cls("any"), empty.snapshot()), Error);
}

TEST_CASE("structural constraints are checked") {
  Store st;
  st.create_object({{"a", {1}}, {"b", {1}}});
  st.create_object({{"a", {1}}});
  st.create_object({{"b", {1}}});
  st.create_object({});
  auto a = cls("any where a=1"), b = cls("any where b=1");
  StructuralCheck ind = translate_structural(Structural::indep, *a, *b, st.snapshot());
  CHECK(ind.satisfied);
  CHECK(ind.equation == "|A&B|*N = |A|*|B|: 1*4 = 2*2");
  CHECK(!translate_structural(Structural::nonoverlap, *a, *b, st.snapshot()).satisfied);
  CHECK(translate_structural(Structural::nonoverlap, *a, *cls("any where c=1"), st.snapshot()).satisfied);
  CHECK(translate_structural(Structural::subset, *cls("any where a=1&b=1"), *a, st.snapshot()).satisfied);
  CHECK(!translate_structural(Structural::subset, *a, *b, st.snapshot()).satisfied);
}

TEST_CASE("forbidden constraint types") {
  Store st = ab_store(4, 2);
  st.define_class("X", "any where x=1");
  st.define_class("Y", "any where y=1");
  CHECK(types({"Pr(A|B) >= 0.4", "Pr(B|A) >= 0.4"}, st) == std::vector<int>{1});
  CHECK(types({"Pr(X|A) >= 0.4", "Pr(Y|A) >= 0.4"}, st) == std::vector<int>{2});
  CHECK(types({"Pr(X) >= 0.4", "Pr(Y) > 0.1"}, st) == std::vector<int>{2});
  CHECK(types({"Pr(A|B) >= 0.4", "Pr(A|B) <= 0.6"}, st) == std::vector<int>{3});
  CHECK(types({"Pr(A|B) >= 0.5", "Pr(A*B*X) <= 0.5"}, st) == std::vector<int>{4});

  CHECK(types({"Pr(A|B) >= 0.4"}, st).empty());
  CHECK(types({"Pr(A|B) >= 0.4", "Pr(X|A*B) >= 0.3"}, st).empty());
  CHECK(types({"Pr(A|B) >= 0.4", "Pr(X|Y) <= 0.3"}, st).empty());
  CHECK(types({"Pr(A|B) >= 0.4", "Pr(A|B) > 0.3"}, st).empty());
  CHECK(types({"Pr(X) >= 0.4", "Pr(Y) <= 0.6"}, st).empty());
}

TEST_CASE("lower bound allocates at A&B") {
  Store st = ab_store(10, 2);
  ApplyReport r = apply_constraints(st, {ProbConstraint::parse("Pr(A|B) >= 0.5")});
  CHECK(r.allocated == 6);
  CHECK(r.moved == 0);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].fresh == 6);
  CHECK(r.steps[0].node == "a=1&b=1");
  CHECK(r.per_node_delta == std::map<std::string, long long>{{"a=1&b=1", 6}});
  REQUIRE(r.status.size() == 1);
  CHECK(r.status[0].n_ab == 8);
  CHECK(r.status[0].n_b == 16);
  CHECK(r.edges[0].up);
  CHECK(r.edges[0].modified);
  CHECK(st.state().ledger.total() == 6);
  CHECK(st.state().constraints == std::vector<std::string>{"Pr(A|B) >= 0.5"});

  Snapshot s = st.snapshot();
  CHECK(probability(*cls("A*B"), s) == q(8, 16));
  CHECK(probability(*cls("B"), s) == 1);
  Rational lhs = probability(*cls("A+B"), s);
  CHECK(lhs == probability(*cls("A"), s) + probability(*cls("B"), s) - probability(*cls("A*B"), s));

  // Running again adds nothing.
  auto rev = st.revision();
  ApplyReport again = apply_constraints(st);
  CHECK(again.allocated == 0);
  CHECK(again.movements.empty());
  CHECK(st.revision() == rev);
}

TEST_CASE("marginal lower bound") {
  Store st;
  st.create_object({{"a", {1}}});
  for (int i = 0; i < 8; ++i) st.create_object({});
  st.define_class("A", "any where a=1");
  ApplyReport r = apply_constraints(st, {ProbConstraint::parse("Pr(A) >= 0.2")});
  CHECK(r.allocated == 1);
  CHECK(probability(*cls("A"), st.snapshot()) == q(2, 10));
}

TEST_CASE("upper bound allocates in B outside A") {
  Store st = ab_store(5, 4);
  ApplyReport r = apply_constraints(st, {ProbConstraint::parse("Pr(A|B) <= 0.6")});
  CHECK(r.allocated == 2);
  CHECK(r.steps[0].node == "b=1&~a=1");
  CHECK(!r.edges[0].up);
  CHECK(probability(*cls("A*B"), st.snapshot()) == q(4, 7));
}

TEST_CASE("satisfied constraint leaves the ledger alone") {
  Store st = ab_store(10, 5);
  ApplyReport r = apply_constraints(st, {ProbConstraint::parse("Pr(A|B) >= 0.3")});
  CHECK(r.allocated == 0);
  CHECK(st.state().ledger.total() == 0);
  CHECK(!r.edges[0].modified);
}

TEST_CASE("cascade moves objects down") {
  Store st;
  for (int i = 0; i < 10; ++i) {
    Attributes a{{"b", {1}}};
    if (i < 2) a["a"] = {1};
    if (i < 1) a["c"] = {1};
    st.create_object(a);
  }
  st.define_class("A", "any where a=1");
  st.define_class("B", "any where b=1");
  st.define_class("C", "any where c=1");
  ApplyReport r = apply_constraints(
      st, {ProbConstraint::parse("Pr(C|A*B) >= 0.5"), ProbConstraint::parse("Pr(A|B) >= 0.5")});
  CHECK(r.allocated == 6);
  REQUIRE(r.cascades.size() == 1);
  CHECK(r.cascades[0].t == 3);
  CHECK(r.cascades[0].m == 6);
  CHECK(r.moved == 3);
  Snapshot s = st.snapshot();
  CHECK(probability(*cls("A*B"), s) == q(8, 16));
  CHECK(probability(*cls("A*B*C"), s) == q(4, 16));
  auto per = s->ledger.per_node();
  CHECK(per == std::map<std::string, std::size_t>{{"a=1&b=1", 3}, {"a=1&b=1&c=1", 3}});
  for (const auto& st : r.status) CHECK(st.satisfied);
}

TEST_CASE("forbidden sets leave the store untouched") {
  Store st = ab_store(4, 1);
  auto rev = st.revision();
  try {
    apply_constraints(st, {ProbConstraint::parse("Pr(A|B) >= 0.4"), ProbConstraint::parse("Pr(B|A) >= 0.4")});
    FAIL("expected ForbiddenConstraint");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ForbiddenConstraint);
    CHECK(std::string(e.what()).find("Type 1") != std::string::npos);
  }
  CHECK(st.revision() == rev);
  CHECK(st.state().constraints.empty());
}

TEST_CASE("a node that cannot receive objects is unsatisfiable") {
  Store st = ab_store(4, 4);
  st.define_class("AB", "any where a=1&b=1");
  CHECK_THROWS_AS(apply_constraints(st, {ProbConstraint::parse("Pr(A|AB) <= 0.5")}), Error);
}

TEST_CASE("objects move down to a meet of two homes") {
  Store st;
  for (int i = 0; i < 10; ++i) st.create_object({});
  st.define_class("A", "any where a=1");
  st.define_class("B", "any where b=1");
  st.define_class("C", "any where c=1");
  ApplyReport r = apply_constraints(
      st, {ProbConstraint::parse("Pr(C*B) > 0.8"), ProbConstraint::parse("Pr(A|C) >= 0.9")});
  for (const auto& s : r.status) CHECK(s.satisfied);
  CHECK(r.moved > 0);
  CHECK(st.state().ledger.per_node().count("a=1&b=1&c=1") == 1);
}

TEST_CASE("an inconsistent set that passes validation stops") {
  Store st = ab_store(10, 2);
  st.define_class("C", "any where c=1");
  auto rev = st.revision();
  try {
    apply_constraints(st, {ProbConstraint::parse("Pr(B*C|A) >= 0.7"), ProbConstraint::parse("Pr(B*A|A*C) <= 0.1")});
    FAIL("expected ValidationGap");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationGap);
  }
  CHECK(st.revision() == rev);
}
