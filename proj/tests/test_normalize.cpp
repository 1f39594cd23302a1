#include <random>

#include "classalg/error.hpp"
#include "classalg/normalize.hpp"
#include "doctest.h"
#include "gen.hpp"
#include "oracle.hpp"

using namespace classalg;

namespace {

std::string nf(const std::string& text) { return sdnf(*parse_class_expr(text)).text(); }
std::string nfw(const std::string& text) { return sdnf_of_where(*parse_where_cond(text)).text(); }

std::set<std::set<std::string>> conjunct_sets(const Sdnf& s) {
  std::set<std::set<std::string>> out;
  for (const auto& c : s.conjuncts()) {
    std::set<std::string> lits;
    for (const auto& l : c.literals) lits.insert(l.text());
    out.insert(lits);
  }
  return out;
}

}  // namespace

TEST_CASE("disjunctive form") {
  auto d = to_disjunctive_form(*parse_where_cond("x=1 & (y=1 V z=1)"));
  CHECK(Sdnf(d).text() == "x=1&y=1 V x=1&z=1");
  CHECK(Sdnf(to_disjunctive_form(*parse_where_cond("~(x=1 V y=1)"))).text() == "~x=1&~y=1");
  CHECK(Sdnf(to_disjunctive_form(*parse_where_cond("~~x=1"))).text() == "x=1");
  CHECK(to_disjunctive_form(*parse_where_cond("x=1&~x=1")).empty());
}

TEST_CASE("prime implicants and generalized subsumption") {
  CHECK(nfw("x=1&y=1 V ~x=1&z=1") == "x=1&y=1 V y=1&z=1 V z=1&~x=1");
  CHECK(nfw("age<30 V age<40") == "age<40");
  CHECK(nfw("p=1&q=1 V ~p=1&q=1") == "q=1");
  CHECK(nfw("age<30 & age<40") == "age<30");
  CHECK(nfw("age=5 V age<10") == "age<10");
  CHECK(nfw("age<=5 & ~age<10") == "false");
  CHECK(nfw("~age>=3 V age>5") == "age>5 V ~age>=3");
  CHECK(nfw("cnt(kids)>2 V cnt(kids)>=4") == "cnt(kids)>2");
  CHECK(nfw("age~<30 V age~<40") == "age~<30 V age~<40");
  CHECK(nfw("x=1 V ~x=1") == "true");
  CHECK(nfw("false V x=1&true") == "x=1");
}

TEST_CASE("interval widening") {
  std::string in = "q=1&age>30&age<50 V q=1&r=1&age>40&age<60";
  CHECK(nfw(in) == "age<50&age>30&q=1 V age<60&age>30&q=1&r=1");
  CHECK(nfw("q=1&age>30&age<50 V q=1&age>30&age<50") == "age<50&age>30&q=1");
  // context does not entail: unchanged
  CHECK(nfw("q=1&age>30&age<50 V r=1&age>40&age<60") ==
        "age<50&age>30&q=1 V age<60&age>40&r=1");
  // disjoint intervals: unchanged
  CHECK(nfw("q=1&age>30&age<40 V q=1&r=1&age>50&age<60") ==
        "age<40&age>30&q=1 V age<60&age>50&q=1&r=1");
}

TEST_CASE("class expressions") {
  CHECK(nf("(any where x=1) + (any where y=1)") == nf("(any where y=1)+(any where x=1)"));
  CHECK(nf("(any where x=1) - (any where x=1)") == "false");
  CHECK(nf("any") == "true");
  CHECK(nf("empty") == "false");
  CHECK(nf("any.owns") == "inv(owns) in any");
  CHECK(nf("(any where x=1).owns.inv(partOf) where y=2") ==
        "inv(owns.inv(partOf)) in (any where x=1)&y=2");
  CHECK(nf("any where This in (any where x=1)") == "x=1");
  CHECK(nf("empty.owns") == "false");
  CHECK(nf("any where inv(r) in ((any where x=1)+(any where ~x=1))") == "inv(r) in any");
}

TEST_CASE("named classes and errors") {
  std::map<std::string, Sdnf> classes;
  classes.emplace("P", sdnf(*parse_class_expr("any where p=1")));
  NormalizeContext ctx;
  ctx.resolve = [&](const std::string& n) -> const Sdnf* {
    auto it = classes.find(n);
    return it == classes.end() ? nullptr : &it->second;
  };
  CHECK(sdnf(*parse_class_expr("P*P"), ctx).text() == "p=1");
  CHECK_THROWS_AS(sdnf(*parse_class_expr("Q"), ctx), Error);
  ctx.defining = "P";
  try {
    sdnf(*parse_class_expr("P where x=1"), ctx);
    FAIL("expected InliningCycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InliningCycle);
  }
  NormalizeContext small;
  small.options.max_atoms = 3;
  CHECK_THROWS_AS(sdnf(*parse_class_expr("any where a=1 V b=1 V c=1 V d=1"), small), Error);
}

TEST_CASE("set operations and implication") {
  Sdnf x = sdnf_of_where(*parse_where_cond("p=1&q=1"));
  Sdnf p = sdnf_of_where(*parse_where_cond("p=1"));
  CHECK(set_op(x, Sdnf::truth(), SdnfOp::intersection) == x);
  CHECK(set_op(x, x, SdnfOp::difference).is_false());
  CHECK(set_op(p, complement(p), SdnfOp::union_).is_true());
  CHECK(logically_implies(x, p));
  CHECK(!logically_implies(p, x));
  CHECK(logically_implies(sdnf_of_where(*parse_where_cond("age<30")),
                          sdnf_of_where(*parse_where_cond("age<40"))));
  CHECK(!logically_implies(sdnf_of_where(*parse_where_cond("p=1 V q=1")), p));
  CHECK(logically_implies(Sdnf::falsity(), p));
}

TEST_CASE("agrees with Quine-McCluskey on independent atoms") {
  gen::Rng rng(7);
  std::vector<std::string> atoms{"a=1", "b=1", "c=1", "d=1"};
  for (int i = 0; i < 200; ++i) {
    WherePtr w = gen::random_where(rng, atoms, 4);
    CHECK(conjunct_sets(sdnf_of_where(*w)) == oracle::prime_implicants(*w));
  }
}

TEST_CASE("sound and idempotent with comparison chains") {
  gen::Rng rng(11);
  std::vector<std::string> atoms{"a=1", "b=1", "age<30", "age<40", "age>=35", "age=20"};
  for (int i = 0; i < 200; ++i) {
    WherePtr w = gen::random_where(rng, atoms, 4);
    Sdnf s = sdnf_of_where(*w);
    CHECK(oracle::equivalent(*w, *s.to_where()));
    CHECK(sdnf_of_where(*s.to_where()) == s);
    for (const auto& c1 : s.conjuncts())
      for (const auto& c2 : s.conjuncts())
        if (&c1 != &c2) CHECK(!conjunct_entails(c1, c2));
  }
}
