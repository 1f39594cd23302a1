#include <algorithm>

#include "classalg/error.hpp"
#include "classalg/hierarchy.hpp"
#include "doctest.h"

using namespace classalg;

namespace {

bool has_pair(const std::vector<NamePair>& v, const std::string& a, const std::string& b) {
  return std::find(v.begin(), v.end(), NamePair{a, b}) != v.end();
}

std::size_t node_of(const Hierarchy& h, const std::string& member) {
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    const auto& m = h.nodes[i].members;
    if (std::find(m.begin(), m.end(), member) != m.end()) return i;
  }
  FAIL("no node for " << member);
  return 0;
}

}  // namespace

TEST_CASE("equivalence and implication of intents") {
  auto s = [](const char* t) { return sdnf(*parse_class_expr(t)); };
  CHECK(logically_equivalent(s("(any where x=1)+(any where y=1)"), s("(any where y=1)+(any where x=1)")));
  CHECK(logically_equivalent(s("any where p=1"), s("any where p=1&p=1")));
  CHECK(!logically_equivalent(s("any where p=1"), s("any where q=1")));
}

TEST_CASE("hierarchy of an empty schema") {
  Store st;
  st.create_object({});
  Hierarchy h = build_hierarchy(st.snapshot());
  REQUIRE(h.nodes.size() == 2);
  REQUIRE(h.edges.size() == 1);
  CHECK(h.edges[0].child == 1);
  CHECK(h.edges[0].parent == 0);
  CHECK(h.edges[0].logical);
  Store none;
  Hierarchy h0 = build_hierarchy(none.snapshot());
  CHECK(h0.edges.size() == 1);
}

TEST_CASE("logical edges and extensional merging") {
  Store st;
  st.create_object({{"p", {1}}, {"q", {1}}, {"r", {1}}});
  st.create_object({{"p", {1}}, {"r", {1}}});
  st.create_object({});
  st.define_class("A", "any where p=1");
  st.define_class("B", "any where p=1&q=1");
  st.define_class("C", "any where r=1");  // same data as A
  Hierarchy h = build_hierarchy(st.snapshot());
  std::size_t a = node_of(h, "A"), b = node_of(h, "B");
  CHECK(node_of(h, "C") == a);
  auto edge = std::find_if(h.edges.begin(), h.edges.end(),
                           [&](const HierarchyEdge& e) { return e.child == b && e.parent == a; });
  REQUIRE(edge != h.edges.end());
  CHECK(edge->logical);
  // Hasse reduced: B does not link straight to any.
  CHECK(std::none_of(h.edges.begin(), h.edges.end(),
                     [&](const HierarchyEdge& e) { return e.child == b && e.parent == 0; }));
  CHECK(h.nodes[a].n_true == 2);

  ImplicationReport r = implication_report(st.snapshot());
  CHECK(has_pair(r.logical_implications, "B", "A"));
  CHECK(has_pair(r.database_implications, "B", "A"));
  CHECK(has_pair(r.database_equivalences, "A", "C"));
  CHECK(r.logical_equivalences.empty());
  CHECK(!has_pair(r.logical_implications, "A", "C"));
  CHECK(has_pair(r.database_implications, "A", "C"));
}

TEST_CASE("disjoint classes have no implications") {
  Store st;
  st.create_object({{"p", {1}}});
  st.create_object({{"q", {1}}});
  st.define_class("P", "any where p=1");
  st.define_class("Q", "any where q=1");
  ImplicationReport r = implication_report(st.snapshot());
  CHECK(r.database_implications.empty());
  CHECK(r.logical_implications.empty());
}

TEST_CASE("describe") {
  Store st;
  OidId a = st.create_object({{"age", {25}}, {"p", {1}}});
  OidId b = st.create_object({{"age", {28}}, {"p", {1}}});
  OidId c = st.create_object({{"age", {50}}});
  st.define_class("Young", "any where age<30");
  st.define_class("Mid", "any where age<40");
  st.define_class("P", "any where p=1");
  Description d = describe(st.snapshot(), {a, b});
  CHECK(d.conjunct.text() == "age<30&p=1");
  CHECK(d.membership.at("Young") == 1);
  Description d2 = describe(st.snapshot(), {a, c});
  CHECK(d2.conjunct.text() == "true");
  CHECK(d2.membership.at("P") == Rational(1, 2));
  Description d3 = describe(st.snapshot(), {c});
  CHECK(d3.conjunct.text() == "~age<40&~p=1");
  CHECK_THROWS_AS(describe(st.snapshot(), {}), Error);
  CHECK_THROWS_AS(describe(st.snapshot(), {99}), Error);
}

TEST_CASE("rule suggestions") {
  Store st;
  st.create_object({{"k", {1}}, {"r", {1}}, {"s", {1}}});
  st.create_object({{"k", {1}}, {"r", {1}}, {"s", {1}}});
  st.create_object({{"k", {1}}, {"s", {1}}});
  st.create_object({{"r", {1}}});  // outside the context: r without s
  st.define_class("P", "any where k=1");
  st.define_class("R", "any where r=1");
  st.define_class("S", "any where s=1");
  auto rules = suggest_rules(st.snapshot());
  auto found = [&](const std::string& ctx, const std::string& r, const std::string& s) {
    return std::any_of(rules.begin(), rules.end(), [&](const RuleSuggestion& x) {
      return x.context == ctx && x.antecedent->text == r && x.consequent->text == s;
    });
  };
  CHECK(found("P", "r=1", "s=1"));
  CHECK(!found("any", "r=1", "s=1"));
  CHECK(!found("P", "s=1", "k=1"));  // P already implies k=1
  st.define_class("E", "any where k=9");
  for (const auto& x : suggest_rules(st.snapshot())) CHECK(x.context != "E");
}

TEST_CASE("summaries") {
  Store st;
  st.create_object({{"city", {"a"}}, {"age", {3, 9}}});
  st.create_object({{"city", {"a", "b"}}, {"age", {4}}, {"tag", {"x"}}});
  st.create_object({{"age", {1}}});
  auto rows = summarize(st.snapshot(), "city");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == Value("a"));
  CHECK(rows[0].count == 2);
  const auto& age = rows[0].others.at("age");
  CHECK(age.numeric);
  CHECK(age.values.at(Aggr::cnt)->value == 3);
  CHECK(age.values.at(Aggr::avg)->value == Rational(16, 3));
  CHECK(rows[1].count == 1);
  CHECK(!rows[1].others.at("tag").numeric);
  CHECK(rows[1].others.at("tag").values.size() == 1);
  auto by_age = summarize(st.snapshot(), "age");
  CHECK(by_age.size() == 4);  // 1, 3, 4, 9
  CHECK_THROWS_AS(summarize(st.snapshot(), "nosuch"), Error);
}
