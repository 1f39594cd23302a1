#include "classalg/error.hpp"
#include "classalg/evaluate.hpp"
#include "classalg/model.hpp"
#include "doctest.h"

using namespace classalg;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::NotFound;
}

}  // namespace

TEST_CASE("objects") {
  Store s;
  OidId a = s.create_object({{"age", {30}}, {"name", {"bo"}}});
  CHECK(a == 1);
  OidId b = s.create_object({});
  CHECK(b == 2);
  CHECK(code_of([&] { s.create_object({{"age", {}}}); }) == ErrorCode::EmptyValueList);
  CHECK(code_of([&] { s.create_object({{"where", {1}}}); }) == ErrorCode::InvalidIdentifier);
  s.set_attribute(a, "age", {31});
  CHECK(s.state().objects.at(a).at("age") == std::vector<Value>{31});
  s.delete_object(b);
  OidId c = s.create_object({});
  CHECK(c == 3);  // never reused
  CHECK(code_of([&] { s.delete_object(b); }) == ErrorCode::UnknownOid);
}

TEST_CASE("edges and integrity") {
  Store s;
  OidId a = s.create_object({}), b = s.create_object({});
  s.add_edge("owns", a, b);
  s.add_edge("owns", a, b);
  const auto& rel = std::get<ExplicitRelation>(s.state().relations.at("owns").body);
  CHECK(rel.edges.size() == 1);
  s.add_edge("owns", a, a);
  CHECK(code_of([&] { s.add_edge("owns", a, 99); }) == ErrorCode::UnknownOid);
  s.delete_object(b);
  const auto& after = std::get<ExplicitRelation>(s.state().relations.at("owns").body);
  CHECK(after.edges == std::set<std::pair<OidId, OidId>>{{a, a}});
}

TEST_CASE("relation definitions") {
  Store s;
  s.add_edge("parent", s.create_object({}), s.create_object({}));
  s.define_relation(make_composite_relation("grandparent", {{"parent"}, {"parent"}}));
  CHECK(code_of([&] { s.define_relation(make_composite_relation("r", {{"r"}})); }) ==
        ErrorCode::CyclicComposite);
  CHECK(code_of([&] { s.define_relation(make_composite_relation("parent", {{"grandparent"}})); }) ==
        ErrorCode::NameClash);
  CHECK(code_of([&] { s.add_edge("grandparent", 1, 2); }) == ErrorCode::NotExplicit);
  s.define_class("employee", "any where role=\"e\"");
  s.define_class("company", "any where kind=\"c\"");
  s.define_relation(
      make_class_relation("worksAt", parse_class_expr("employee"), parse_class_expr("company")));
  CHECK(code_of([&] {
          s.define_relation(make_class_relation("bad", parse_class_expr("nosuch"),
                                                parse_class_expr("any")));
        }) == ErrorCode::UnknownClassName);
}

TEST_CASE("classes") {
  Store s;
  s.define_class("P", "any where p=1");
  CHECK(s.state().classes.at("P").intent.text() == "p=1");
  CHECK(code_of([&] { s.define_class("Q", "P*P"); }) == ErrorCode::DuplicateIntent);
  CHECK(code_of([&] { s.define_class("P", "P where q=1"); }) == ErrorCode::InliningCycle);
  CHECK(code_of([&] { s.define_class("R", "nosuch"); }) == ErrorCode::UnknownClassName);
  CHECK(code_of([&] { s.define_class("any", "P"); }) == ErrorCode::InvalidIdentifier);
  s.define_class("P", "any where p=2");  // redefinition
  CHECK(s.state().classes.at("P").intent.text() == "p=2");
}

TEST_CASE("snapshots are isolated") {
  Store s;
  OidId a = s.create_object({{"age", {3}}});
  Snapshot snap = s.snapshot();
  auto before = Evaluator(snap).extent(*parse_class_expr("any where age<5")).true_set;
  s.set_attribute(a, "age", {9});
  s.create_object({{"age", {1}}});
  auto after = Evaluator(snap).extent(*parse_class_expr("any where age<5")).true_set;
  CHECK(before == after);
  CHECK(Evaluator(s.snapshot()).extent(*parse_class_expr("any where age<5")).true_set ==
        std::vector<OidId>{2});
  CHECK(snap->revision < s.revision());
}

TEST_CASE("virtual oids share the oid space") {
  Store s;
  s.create_object({});
  OidId v = s.add_virtual(Sdnf::truth());
  OidId r = s.create_object({});
  CHECK(v == 2);
  CHECK(r == 3);
  CHECK(s.state().all_oids().size() == 3);
  CHECK(code_of([&] { s.add_edge("owns", 1, v); }) == ErrorCode::UnknownOid);
}
