#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "exlift/oracle.hpp"
#include "support.hpp"

using namespace exlift;

namespace {

GroundModel model_k(const char* text, std::size_t k) { return ground(with_domain_size(parse_model(text), k)); }

// Plain sums in descending world order, shifted by the largest weight.
std::pair<double, double> reverse_sums(const GroundModel& g, const Evidence& e) {
  const std::size_t n = g.atom_count();
  double top = -INFINITY;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) top = std::max(top, g.log_weight_bits(b));
  double num = 0.0, den = 0.0;
  for (std::uint64_t b = std::uint64_t{1} << n; b-- > 0;) {
    const double w = std::exp(g.log_weight_bits(b) - top);
    den += w;
    if (compatible(World::from_bits(b, n), e)) num += w;
  }
  return {num, den};
}

}  // namespace

TEST_CASE("brute_marginal examples") {
  const auto one = model_k("domain 1\n1.5 S(x)\n", 1);
  const double closed = std::exp(1.5) / (1.0 + std::exp(1.5));
  CHECK(brute_marginal(one, parse_query("S(C1)=1", one.atoms())).probability ==
        doctest::Approx(closed).epsilon(1e-14));
  CHECK(brute_marginal(one, Evidence{}).probability == doctest::Approx(1.0).epsilon(1e-15));

  const auto pairs = model_k("domain 1\n1.5 S(x) & S(y)\n", 3);
  double num = 0.0, den = 0.0;
  for (int n = 0; n <= 3; ++n) {
    const double w = std::exp(1.5 * n * n);
    den += static_cast<double>(binomial(3, n).get_ui()) * w;
    if (n >= 1) num += static_cast<double>(binomial(2, n - 1).get_ui()) * w;
  }
  const auto r = brute_marginal(pairs, parse_query("S(C1)=1", pairs.atoms()));
  CHECK(support::rel_error(r.probability, num / den) < 1e-12);
  CHECK(support::rel_error(r.log_partition, std::log(den)) < 1e-12);
}

TEST_CASE("partition function of a single unary formula") {
  for (double w : {1.5, -0.7, 2.0}) {
    for (std::size_t k = 1; k <= 20; ++k) {
      char text[64];
      std::snprintf(text, sizeof text, "domain 1\n%.2f S(x)\n", w);
      const auto g = model_k(text, k);
      const double expected = static_cast<double>(k) * std::log1p(std::exp(w));
      CHECK(support::rel_error(brute_marginal(g, Evidence{}).log_partition, expected) < 1e-12);
    }
  }
}

TEST_CASE("masses, partition and enumeration order") {
  std::mt19937_64 rng(3);
  const auto g = ground(support::friends_smokers(2));
  std::vector<Evidence> es;
  for (int i = 0; i < 10; ++i) {
    Evidence e;
    std::bernoulli_distribution pick(0.3), value(0.5);
    for (AtomId a = 0; a < g.atom_count(); ++a)
      if (pick(rng)) e.assign(a, value(rng));
    es.push_back(e);
  }
  const auto masses = brute_log_masses(g, es);
  REQUIRE(masses.size() == es.size() + 1);
  for (std::size_t i = 0; i < es.size(); ++i) {
    const auto r = brute_marginal(g, es[i]);
    CHECK(support::rel_error(r.log_partition, masses.back()) < 1e-14);
    CHECK(support::rel_error(r.probability, std::exp(masses[i] - masses.back())) < 1e-12);
    const auto [num, den] = reverse_sums(g, es[i]);
    CHECK(support::rel_error(r.probability, num / den) < 1e-12);
    const auto parallel = brute_marginal(g, es[i], OracleOptions{25, 4});
    CHECK(parallel.probability == r.probability);
  }
}

TEST_CASE("brute_mpe") {
  const auto g = model_k("domain 1\n1.5 S(x)\n", 2);
  const auto r = brute_mpe(g, Evidence{});
  CHECK(r.world.to_string() == "11");
  CHECK(r.log_weight == doctest::Approx(3.0).epsilon(1e-15));

  const auto flat = model_k("domain 1\n0 S(x) => C(x)\n", 3);
  CHECK(brute_mpe(flat, Evidence{}).world.to_string() == "000000");
  const auto pinned = brute_mpe(flat, parse_query("C(C2)=1", flat.atoms()));
  CHECK(pinned.world.to_string() == "000010");  // S(C1..C3) then C(C1..C3)

  const auto neg = model_k("domain 1\n-1.5 S(x)\n", 3);
  CHECK(brute_mpe(neg, Evidence{}).world.to_string() == "000");
  CHECK(brute_mpe(neg, Evidence{}).log_weight == 0.0);
}

TEST_CASE("brute_marginal_mpe sums out the rest") {
  // Max over S(C1) of sum over C(C1): with S=1 the implication constrains C.
  const auto g = model_k("domain 1\n1.0 S(x) => C(x)\n0.2 S(x)\n", 1);
  const AtomId s = g.atoms().parse("S(C1)");
  const auto r = brute_marginal_mpe(g, std::vector<AtomId>{s}, Evidence{});
  const double off = std::log(2.0 * std::exp(1.0));
  const double on = std::log(std::exp(0.2) + std::exp(1.2));
  CHECK(r.world[s] == (on > off));
  CHECK(r.log_weight == doctest::Approx(std::max(on, off)).epsilon(1e-14));
}

TEST_CASE("cap") {
  const auto g = ground(support::friends_smokers(3));
  CHECK(g.atom_count() == 15);
  CHECK_THROWS_AS(brute_marginal(g, Evidence{}, OracleOptions{14, 1}), OracleCapError);
  CHECK_NOTHROW(brute_marginal(g, Evidence{}, OracleOptions{15, 1}));
  CHECK_THROWS_AS(brute_mpe(ground(support::friends_smokers(6)), Evidence{}), OracleCapError);
}

TEST_CASE("brute_suborbit") {
  Decomposition d({{0}, {1}, {2}}, 1);
  CHECK(brute_suborbit({1, 2}, Evidence{}, d) == 3);
  CHECK(brute_suborbit({1, 2}, Evidence{{0, true}}, d) == 2);
  CHECK(brute_suborbit({3, 0}, Evidence{{0, true}}, d) == 0);
  const auto h = brute_suborbit_histogram(Evidence{{0, true}}, d);
  CHECK(h.size() == 3);
  CHECK_THROWS_AS(brute_suborbit({1, 2}, Evidence{}, d, 2), OracleCapError);
}
