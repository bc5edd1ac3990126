#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "exlift/ground.hpp"
#include "exlift/parser.hpp"
#include "support.hpp"

using namespace exlift;

TEST_CASE("minimal model") {
  auto m = parse_model("domain 2\n1.5\tSmokes(x)");
  CHECK(m.predicates.size() == 1);
  CHECK(m.formulas.size() == 1);
  CHECK(m.domain_size() == 2);
  CHECK(m.constants == std::vector<std::string>{"C1", "C2"});
}

TEST_CASE("friends and smokers program") {
  auto m = parse_model(support::kFriendsSmokers);
  REQUIRE(m.predicates.size() == 3);
  CHECK(m.predicates[0].name == "Smokes");
  CHECK(m.predicates[0].arity == 1);
  CHECK(m.predicates[1].name == "Cancer");
  CHECK(m.predicates[1].arity == 1);
  CHECK(m.predicates[2].name == "Friends");
  CHECK(m.predicates[2].arity == 2);
  CHECK(m.formulas[0].weight == 1.3);
  CHECK(m.formulas[1].weight == 1.5);
  CHECK(m.constants == std::vector<std::string>{"A", "B"});
}

TEST_CASE("parse errors") {
  SUBCASE("constant in formula") {
    CHECK_THROWS_WITH_AS(parse_model("1.5\tSmokes(A)"), doctest::Contains("constant"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model("domain 2\n1.5\tSmokes(A)"), doctest::Contains("constant"), ParseError);
  }
  SUBCASE("undeclared domain") {
    CHECK_THROWS_WITH_AS(parse_model("1.5 Smokes(x)\n"), doctest::Contains("domain"), ParseError);
  }
  SUBCASE("syntax error position") {
    try {
      parse_model("domain 2\n1.5 Smokes(x) & \n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 1);
    }
  }
  SUBCASE("arity mismatch") { CHECK_THROWS_AS(parse_model("domain 2\n1 F(x,y)\n1 F(x)\n"), ParseError); }
  SUBCASE("bad weight") { CHECK_THROWS_AS(parse_model("domain 2\nabc S(x)\n"), ParseError); }
  SUBCASE("two headers") { CHECK_THROWS_AS(parse_model("domain 2\ndomain 3\n1 S(x)\n"), ParseError); }
}

TEST_CASE("comments, blank lines and duplicate formulas") {
  auto m = parse_model("# header next\ndomain 3\n\n1 S(x)  # trailing\n1 S(x)\n");
  CHECK(m.formulas.size() == 2);
  CHECK(ground(m).factors().size() == 6);
}

TEST_CASE("connective precedence and associativity") {
  // Evaluate each formula on every assignment of its atoms and compare with
  // an explicitly parenthesized version.
  auto same = [](const char* a, const char* b) {
    auto ma = parse_model(std::string("domain 1\n1 ") + a);
    auto mb = parse_model(std::string("domain 1\n1 ") + b);
    GroundModel ga(ma), gb(mb);
    REQUIRE(ga.atom_count() == gb.atom_count());
    for (std::uint64_t bits = 0; bits < (1u << ga.atom_count()); ++bits)
      if (ga.log_weight_bits(bits) != gb.log_weight_bits(bits)) return false;
    return true;
  };
  CHECK(same("A(x) | B(x) & C(x)", "A(x) | (B(x) & C(x))"));
  CHECK(same("!A(x) & B(x)", "(!A(x)) & B(x)"));
  CHECK(same("A(x) => B(x) => C(x)", "A(x) => (B(x) => C(x))"));
  CHECK_FALSE(same("A(x) => B(x) => C(x)", "(A(x) => B(x)) => C(x)"));
  CHECK(same("A(x) <=> B(x) <=> C(x)", "A(x) <=> (B(x) <=> C(x))"));
  CHECK(same("A(x) & B(x) => C(x) | A(x)", "(A(x) & B(x)) => (C(x) | A(x))"));
  CHECK(same("A(x) => B(x) <=> C(x)", "(A(x) => B(x)) <=> C(x)"));
}

TEST_CASE("grounding sizes") {
  SUBCASE("friends and smokers over {A,B}") {
    GroundModel g(parse_model(support::kFriendsSmokers));
    CHECK(g.atom_count() == 8);
    CHECK(g.factors().size() == 6);
  }
  SUBCASE("one variable") {
    GroundModel g(parse_model("domain 3\n1.5 Smokes(x)"));
    CHECK(g.atom_count() == 3);
    CHECK(g.factors().size() == 3);
  }
  SUBCASE("pairs include x = y") {
    GroundModel g(parse_model("domain 2\n1.5 Smokes(x) & Smokes(y)"));
    CHECK(g.atom_count() == 2);
    CHECK(g.factors().size() == 4);
  }
  SUBCASE("sum over formulas of k^v") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
      auto m = support::random_monadic(rng, 1 + round % 4);
      std::size_t expected = 0;
      for (const auto& f : m.formulas) {
        std::size_t n = 1;
        for (std::size_t v = 0; v < f.formula.variable_count(); ++v) n *= m.domain_size();
        expected += n;
      }
      CHECK(GroundModel(m).factors().size() == expected);
    }
  }
}

TEST_CASE("grounding order is lexicographic in the bindings") {
  GroundModel g(parse_model("domain 3\n1 F(x,y)"));
  REQUIRE(g.factors().size() == 9);
  std::size_t i = 0;
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 3; ++y, ++i) CHECK(g.factors()[i].binding == std::vector<std::size_t>{x, y});
}

TEST_CASE("atom index follows predicate, then arguments") {
  auto m = parse_model("constants A B C\n1 S(x) & F(x,y)");
  AtomTable t(m.predicates, m.constants);
  CHECK(t.size() == 12);
  std::vector<GroundAtom> atoms;
  for (AtomId a = 0; a < t.size(); ++a) atoms.push_back(t.atom(a));
  CHECK(std::is_sorted(atoms.begin(), atoms.end()));
  CHECK(t.name(0) == "S(A)");
  CHECK(t.name(3) == "F(A,A)");
  CHECK(t.name(4) == "F(A,B)");
  CHECK(t.parse("F(C,B)") == t.id(1, {2, 1}));
  CHECK_THROWS_AS(t.parse("F(A)"), std::invalid_argument);
  CHECK_THROWS_AS(t.parse("G(A)"), std::invalid_argument);
  CHECK_THROWS_AS(t.parse("S(D)"), std::invalid_argument);
}

TEST_CASE("eval_formula") {
  GroundModel g(parse_model(support::kFriendsSmokers));
  const auto& atoms = g.atoms();
  const AtomId sa = atoms.parse("Smokes(A)"), ca = atoms.parse("Cancer(A)");
  const AtomId sb = atoms.parse("Smokes(B)"), fab = atoms.parse("Friends(A,B)");
  const GroundFactor& cancer_a = g.factors()[0];  // Smokes(A) => Cancer(A)
  REQUIRE(cancer_a.binding == std::vector<std::size_t>{0});

  World w(g.atom_count());
  w.set(sa, true);
  w.set(ca, false);
  CHECK_FALSE(eval_formula(g, cancer_a, w));
  w.set(sa, false);
  CHECK(eval_formula(g, cancer_a, w));

  const GroundFactor* friends_ab = nullptr;
  for (const auto& f : g.factors())
    if (f.formula == 1 && f.binding == std::vector<std::size_t>{0, 1}) friends_ab = &f;
  REQUIRE(friends_ab);
  w.set(sa, true);
  w.set(fab, true);
  w.set(sb, true);
  CHECK(eval_formula(g, *friends_ab, w));

  Evidence partial{{sa, true}};
  CHECK_THROWS_AS(eval_formula(g, cancer_a, partial), std::invalid_argument);
  partial.assign(ca, true);
  CHECK(eval_formula(g, cancer_a, partial));
}

TEST_CASE("parse, serialize, parse round trip") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 30; ++round) {
    auto m = support::random_monadic(rng, 1 + round % 5);
    auto again = parse_model(serialize_model(m));
    REQUIRE(again.formulas.size() == m.formulas.size());
    CHECK(again.constants == m.constants);
    REQUIRE(again.predicates.size() == m.predicates.size());
    for (std::size_t p = 0; p < m.predicates.size(); ++p) {
      CHECK(again.predicates[p].name == m.predicates[p].name);
      CHECK(again.predicates[p].arity == m.predicates[p].arity);
    }
    for (std::size_t f = 0; f < m.formulas.size(); ++f) {
      CHECK(again.formulas[f].weight == m.formulas[f].weight);
      CHECK(formula_to_string(again, again.formulas[f].formula) == formula_to_string(m, m.formulas[f].formula));
      CHECK(again.formulas[f].formula.nodes().size() == m.formulas[f].formula.nodes().size());
    }
  }
  auto named = parse_model("constants Ann Bob\n-0.25 F(x,y) <=> !F(y,x)\n");
  auto again = parse_model(serialize_model(named));
  CHECK(again.constants == named.constants);
  CHECK(serialize_model(again) == serialize_model(named));
}
