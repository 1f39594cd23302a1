#include "classalg/error.hpp"
#include "classalg/evaluate.hpp"
#include "doctest.h"

using namespace classalg;

namespace {

Ternary ev(Store& s, OidId id, const std::string& cond) {
  return Evaluator(s.snapshot()).eval_where(*parse_where_cond(cond), id);
}

constexpr Ternary T = Ternary::true_, F = Ternary::false_, U = Ternary::unknown;

}  // namespace

TEST_CASE("existential comparison semantics") {
  Store s;
  OidId a = s.create_object({{"age", {3, 9}}});
  OidId u = s.create_object({});
  OidId str = s.create_object({{"age", {"old"}}});
  CHECK(ev(s, a, "age>5") == T);
  CHECK(ev(s, a, "age<5") == T);
  CHECK(ev(s, a, "age~>5") == F);
  CHECK(ev(s, a, "age~>10") == T);
  CHECK(ev(s, u, "age>5") == F);
  CHECK(ev(s, u, "age~>5") == T);
  CHECK(ev(s, str, "age>5") == U);
  CHECK(ev(s, str, "age~>5") == T);
  CHECK(ev(s, str, "age=\"old\"") == T);
}

TEST_CASE("containment and quasi-complement") {
  Store s;
  OidId a = s.create_object({{"tags", {"x", "y"}}});
  OidId u = s.create_object({});
  CHECK(ev(s, a, "tags has {\"x\",\"y\"}") == T);
  CHECK(ev(s, a, "tags has {\"x\",\"z\"}") == F);
  CHECK(ev(s, a, "tags in {\"z\",\"y\"}") == T);
  CHECK(ev(s, a, "tags ~in {\"z\",\"y\"}") == F);
  CHECK(ev(s, a, "tags -in {\"z\"}") == T);
  CHECK(ev(s, a, "tags ~-in {\"z\"}") == F);
  CHECK(ev(s, u, "tags in {1,2}") == F);
  CHECK(ev(s, u, "tags ~in {1,2}") == T);
  CHECK(ev(s, u, "tags -in {1,2}") == U);
  CHECK(ev(s, u, "tags ~-in {1,2}") == U);
  CHECK(ev(s, a, "tags has {}") == T);
  CHECK(ev(s, u, "tags has {}") == F);
}

TEST_CASE("type tests and Kleene connectives") {
  Store s;
  OidId a = s.create_object({{"age", {3}}, {"name", {"bo"}}});
  OidId m = s.create_object({{"age", {3, "x"}}});
  CHECK(ev(s, a, "name in string") == T);
  CHECK(ev(s, a, "age in string") == F);
  CHECK(ev(s, m, "age in number") == F);
  CHECK(ev(s, a, "nosuch in number") == U);
  CHECK(ev(s, a, "true & nosuch in number") == U);
  CHECK(ev(s, a, "true V nosuch in number") == T);
  CHECK(ev(s, a, "~nosuch in number") == U);
}

TEST_CASE("aggregates") {
  CHECK(aggregate(Aggr::cnt, {"a", "b"})->value == 2);
  CHECK(aggregate(Aggr::avg, {1, 2, 2})->value == Rational(5, 3));
  CHECK(aggregate(Aggr::std, {2, 2})->text() == "0");
  CHECK(aggregate(Aggr::std, {1, 3})->text() == "1");
  CHECK(aggregate(Aggr::cnt, {})->value == 0);
  CHECK(!aggregate(Aggr::max, {}).has_value());
  CHECK_THROWS_AS(aggregate(Aggr::sum, {1, "a"}), Error);

  Store s;
  OidId p = s.create_object({{"name", {"p"}}});
  OidId k1 = s.create_object({{"age", {3}}});
  OidId k2 = s.create_object({{"age", {3, 9}}});
  s.add_edge("kids", p, k1);
  s.add_edge("kids", p, k2);
  Evaluator e(s.snapshot());
  CHECK(e.dot_attribute_values({p}, AttrExp{{{"kids"}}, "age"}) == std::vector<Value>{3, 3, 9});
  CHECK(e.dot_relation({p}, Step{"kids"}) == OidSet{k1, k2});
  CHECK(ev(s, p, "cnt(kids.age)=3") == T);
  CHECK(ev(s, p, "cnt(kids)=2") == F);  // "kids" is no attribute of p
  CHECK(ev(s, p, "sum(kids.age)=15") == T);
  CHECK(ev(s, p, "std(kids.age)<3") == T);
  CHECK(ev(s, p, "max(name)>1") == U);
  CHECK(ev(s, p, "min(kids.nosuch)>1") == U);
  CHECK(ev(s, p, "min(kids.nosuch)~>1") == T);
  CHECK(ev(s, p, "cnt(kids.nosuch)=0") == T);
}

TEST_CASE("relations, inverses and membership") {
  Store s;
  for (int i = 0; i < 4; ++i) s.create_object({{"n", {i + 1}}});
  s.add_edge("owns", 1, 2);
  s.add_edge("owns", 1, 3);
  s.add_edge("owns", 4, 3);
  Evaluator e(s.snapshot());
  CHECK(e.dot_relation({1, 4}, Step{"owns"}) == OidSet{2, 3});
  CHECK(e.dot_relation({}, Step{"owns"}).empty());
  CHECK(e.inverse_image({3}, "owns") == OidSet{1, 4});
  CHECK(e.dot_relation({3}, Step{"owns", true}) == OidSet{1, 4});
  CHECK_THROWS_AS(e.dot_relation({1}, Step{"nosuch"}), Error);

  auto owned = e.extent(*parse_class_expr("(any where n=1).owns"));
  CHECK(owned.true_set == std::vector<OidId>{2, 3});
  CHECK(owned.false_set == std::vector<OidId>{1, 4});
  auto owners = e.extent(*parse_class_expr("any where inv(inv(owns)) in (any where n=3)"));
  CHECK(owners.true_set == std::vector<OidId>{1, 4});
  auto via_attr = e.extent(*parse_class_expr("any where owns.n>2"));
  CHECK(via_attr.true_set == std::vector<OidId>{1, 4});
  auto back = e.extent(*parse_class_expr("any where inv(owns).n=4"));
  CHECK(back.true_set == std::vector<OidId>{3});
}

TEST_CASE("composite and class relations") {
  Store s;
  OidId a = s.create_object({{"kind", {"person"}}});
  OidId b = s.create_object({{"kind", {"person"}}});
  OidId c = s.create_object({{"kind", {"person"}}});
  OidId co = s.create_object({{"kind", {"company"}}});
  s.add_edge("parent", a, b);
  s.add_edge("parent", b, c);
  s.define_relation(make_composite_relation("grandparent", {{"parent"}, {"parent"}}));
  s.define_class("person", "any where kind=\"person\"");
  s.define_class("company", "any where kind=\"company\"");
  s.define_relation(
      make_class_relation("worksAt", parse_class_expr("person"), parse_class_expr("company")));
  Evaluator e(s.snapshot());
  CHECK(e.dot_relation({a}, Step{"grandparent"}) == OidSet{c});
  CHECK(e.dot_relation({c}, Step{"grandparent", true}) == OidSet{a});
  CHECK(e.dot_relation({a}, Step{"worksAt"}) == OidSet{co});
  CHECK(e.dot_relation({co}, Step{"worksAt"}).empty());
  CHECK(e.dot_relation({co}, Step{"worksAt", true}) == OidSet{a, b, c});
}

TEST_CASE("closure") {
  Store s;
  for (int i = 0; i < 3; ++i) s.create_object({});
  s.add_edge("r", 1, 2);
  s.add_edge("r", 2, 3);
  s.add_edge("cyc", 1, 2);
  s.add_edge("cyc", 2, 1);
  Evaluator e(s.snapshot());
  using P = std::set<std::pair<OidId, OidId>>;
  CHECK(e.reflexive_transitive_closure("r") == P{{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}});
  CHECK(e.reflexive_transitive_closure("cyc") == P{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  s.define_relation(make_composite_relation("rr", {{"r"}, {"r"}}));
  Evaluator e2(s.snapshot());
  CHECK_THROWS_AS(e2.reflexive_transitive_closure("rr"), Error);
}

TEST_CASE("extents of builtins and virtual objects") {
  Store s;
  s.create_object({{"p", {1}}});
  s.create_object({{"p", {2}}});
  s.add_virtual(sdnf_of_where(*parse_where_cond("p=1&q=1")));
  Evaluator e(s.snapshot());
  CHECK(e.extent(*parse_class_expr("any")).true_set == std::vector<OidId>{1, 2, 3});
  CHECK(e.extent(*parse_class_expr("empty")).true_set.empty());
  auto p1 = e.extent(*parse_class_expr("any where p=1"));
  CHECK(p1.true_set == std::vector<OidId>{1, 3});
  auto r = e.extent(*parse_class_expr("any where r=1"));
  CHECK(r.false_set == std::vector<OidId>{1, 2, 3});
  auto notq = e.extent(*parse_class_expr("any where ~q=1"));
  CHECK(notq.true_set == std::vector<OidId>{1, 2});
  auto either = e.extent(*parse_class_expr("(any where p=1)+(any where r=1)"));
  CHECK(either.true_set == std::vector<OidId>{1, 3});
  auto implied = e.extent(*parse_class_expr("any where p<=1"));
  CHECK(implied.true_set == std::vector<OidId>{1, 3});
}
