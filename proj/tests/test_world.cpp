#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "exlift/ground.hpp"
#include "exlift/log_space.hpp"
#include "exlift/parser.hpp"
#include "support.hpp"

using namespace exlift;

TEST_CASE("log_weight examples") {
  SUBCASE("n smokers give 1.5 n^2") {
    GroundModel g(parse_model("domain 3\n1.5 Smokes(x) & Smokes(y)"));
    CHECK(log_weight(g, World::from_string("110")) == 6.0);
  }
  SUBCASE("no satisfied factor") {
    GroundModel g(parse_model("domain 3\n1.5 Smokes(x)"));
    CHECK(log_weight(g, World::from_string("000")) == 0.0);
  }
  SUBCASE("friends and smokers, all atoms true") {
    GroundModel g(parse_model(support::kFriendsSmokers));
    // Every one of the six ground formulas is satisfied.
    CHECK(log_weight(g, World::from_string("11111111")) == doctest::Approx(1.3 * 2 + 1.5 * 4).epsilon(1e-15));
  }
}

TEST_CASE("log_weight_bits agrees with log_weight") {
  GroundModel g(support::friends_smokers(2));
  for (std::uint64_t bits = 0; bits < 256; ++bits)
    CHECK(g.log_weight_bits(bits) == g.log_weight(World::from_bits(bits, 8)));
}

TEST_CASE("log_weight does not depend on factor order") {
  GroundModel g(support::friends_smokers(3));
  std::mt19937_64 rng(3);
  std::vector<std::size_t> order(g.factors().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int round = 0; round < 50; ++round) {
    World w(g.atom_count());
    for (std::size_t a = 0; a < w.size(); ++a) w.set(a, rng() & 1);
    std::shuffle(order.begin(), order.end(), rng);
    double shuffled = 0.0;
    for (auto i : order)
      if (eval_formula(g, g.factors()[i], w)) shuffled += g.factors()[i].weight;
    CHECK(shuffled == doctest::Approx(log_weight(g, w)).epsilon(1e-14));
  }
}

TEST_CASE("compatible") {
  const World w = World::from_string("101");
  CHECK(compatible(w, Evidence{{0, true}}));
  CHECK_FALSE(compatible(w, Evidence{{1, true}}));
  CHECK(compatible(w, Evidence{}));
}

TEST_CASE("world helpers") {
  CHECK(World::from_bits(0b101, 3).to_string() == "101");
  CHECK(World::from_bits(0b001, 3).to_string() == "100");
  CHECK_THROWS_AS(World::from_string("10x"), std::invalid_argument);
}

TEST_CASE("evidence") {
  Evidence e;
  e.assign(2, true);
  CHECK(e.find(2) == true);
  CHECK_FALSE(e.find(1).has_value());
  CHECK_THROWS_AS(e.assign(2, false), std::invalid_argument);
  CHECK_THROWS_AS(e.assign(2, true), std::invalid_argument);
  CHECK(merge(Evidence{{0, true}}, Evidence{{1, false}})->size() == 2);
  CHECK(merge(Evidence{{0, true}}, Evidence{{0, true}})->size() == 1);
  CHECK_FALSE(merge(Evidence{{0, true}}, Evidence{{0, false}}).has_value());
}

TEST_CASE("evidence and query text") {
  GroundModel g(parse_model(support::kFriendsSmokers));
  const auto& atoms = g.atoms();
  auto e = parse_evidence("# observed\nSmokes(A) = 1\n\nFriends(A,B)=0 # note\n", atoms);
  CHECK(e.size() == 2);
  CHECK(e.find(atoms.parse("Smokes(A)")) == true);
  CHECK(e.find(atoms.parse("Friends(A,B)")) == false);
  CHECK_THROWS_AS(parse_evidence("Smokes(A) = 2\n", atoms), ParseError);
  CHECK_THROWS_AS(parse_evidence("Smokes(A) = 1\nSmokes(A) = 0\n", atoms), ParseError);
  CHECK_THROWS_AS(parse_evidence("Smokes(Z) = 1\n", atoms), ParseError);

  auto q = parse_query("Smokes(A)=1,Friends(B,A)=0", atoms);
  CHECK(q.size() == 2);
  CHECK(q.find(atoms.parse("Friends(B,A)")) == false);
  CHECK_THROWS_AS(parse_query("Smokes(A)", atoms), ParseError);
}

TEST_CASE("log-sum-exp") {
  LogSumExp acc;
  CHECK(acc.value() == kNegInf);
  acc.add(1000.0);
  acc.add(1000.0);
  CHECK(acc.value() == doctest::Approx(1000.0 + std::log(2.0)));
  LogSumExp other;
  other.add(-5.0);
  acc.merge(other);
  CHECK(acc.value() == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add(0.0, 0.0) == doctest::Approx(std::log(2.0)));
}
