#include "exlift/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "exlift/log_space.hpp"
#include "parallel.hpp"

namespace exlift {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

double weigh(const WeightOracle& weights, const Statistic& t) {
  if (weights.per_statistic()) return weights.statistic_log_weight(t);
  auto patterns = canonical_patterns(t);
  return weights.patterns_log_weight(patterns);
}

void require_full_scope(const GroundModel& model, const Decomposition& decomp) {
  if (decomp.scope_size() != model.atom_count())
    throw std::invalid_argument("decomposition covers " + std::to_string(decomp.scope_size()) + " of " +
                                std::to_string(model.atom_count()) + " ground atoms");
  for (const auto& block : decomp.blocks())
    for (AtomId a : block)
      if (a >= model.atom_count()) throw std::invalid_argument("decomposition names an unknown atom");
}

Evidence assignment_from_patterns(const Decomposition& decomp, std::span<const std::uint32_t> patterns) {
  Evidence out;
  const std::size_t w = decomp.width();
  for (std::size_t b = 0; b < patterns.size(); ++b)
    for (std::size_t p = 0; p < w; ++p) out.assign(decomp.block(b)[p], pattern_bit(patterns[b], w, p));
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double WeightOracle::statistic_log_weight(const Statistic&) const {
  throw std::logic_error("this weight oracle has no statistic-level weights");
}

GroundWeights::GroundWeights(const GroundModel& model, const Decomposition& decomp)
    : model_(model), decomp_(decomp) {}

double GroundWeights::patterns_log_weight(std::span<const std::uint32_t> patterns) const {
  World world(model_.atom_count());
  write_patterns(decomp_, patterns, world);
  return model_.log_weight(world);
}

MonadicStatisticWeights::MonadicStatisticWeights(const MLNModel& model) : width_(model.predicates.size()) {
  if (model.max_arity() > 1) throw std::invalid_argument("statistic-level weights need a monadic model");
  const std::size_t m = bit_pattern_count(width_);
  for (const auto& wf : model.formulas) {
    const Formula& f = wf.formula;
    Term term{f.variable_count(), wf.weight, {}};
    std::size_t size = 1;
    for (std::size_t i = 0; i < term.arity; ++i) size *= m;
    std::vector<std::size_t> tau(term.arity, 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t rest = idx;
      for (std::size_t p = term.arity; p-- > 0;) {
        tau[p] = rest % m;
        rest /= m;
      }
      const bool sat = f.evaluate([&](std::size_t atom) {
        const auto& a = f.atoms()[atom];
        return pattern_bit(tau[a.args[0]], width_, a.predicate);
      });
      if (sat) term.satisfied.push_back(idx);
    }
    terms_.push_back(std::move(term));
  }
}

// Same arithmetic as GroundModel::log_weight: an exact grounding count per
// formula, then one multiply-add per formula.
double MonadicStatisticWeights::statistic_log_weight(const Statistic& t) const {
  const std::size_t m = t.size();
  double total = 0.0;
  for (const auto& term : terms_) {
    std::uint64_t n = 0;
    for (std::size_t idx : term.satisfied) {
      std::uint64_t groundings = 1;
      std::size_t rest = idx;
      for (std::size_t p = 0; p < term.arity && groundings != 0; ++p) {
        groundings *= t[rest % m];
        rest /= m;
      }
      n += groundings;
    }
    if (n != 0) total += term.weight * static_cast<double>(n);
  }
  return total;
}

double MonadicStatisticWeights::patterns_log_weight(std::span<const std::uint32_t> patterns) const {
  Statistic t(bit_pattern_count(width_), 0);
  for (auto p : patterns) ++t[p];
  return statistic_log_weight(t);
}

OrbitSums orbit_sums(const Decomposition& decomp, const WeightOracle& weights, std::span<const Evidence> evidences,
                     const EngineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto k = static_cast<std::uint32_t>(decomp.block_count());
  const std::size_t w = decomp.width();
  std::vector<EvidenceProfile> profiles;
  for (const auto& e : evidences) profiles.push_back(evidence_profile(e, decomp));

  struct Chunk {
    std::vector<LogSumExp> acc;
    std::uint64_t visited = 0;
    std::uint64_t infeasible = 0;
  };
  // One chunk per value of c_0; merged in chunk order so the result does not
  // depend on the number of workers.
  std::vector<Chunk> chunks(k + 1, Chunk{std::vector<LogSumExp>(evidences.size()), 0, 0});
  const unsigned workers = detail::worker_count(options.jobs, chunks.size());
  std::vector<std::vector<SuborbitCounter>> counters(workers);
  for (auto& per_worker : counters)
    for (const auto& d : profiles) per_worker.emplace_back(d, w);

  detail::run_chunks(chunks.size(), workers, [&](unsigned worker, std::size_t c) {
    Chunk& chunk = chunks[c];
    auto& local = counters[worker];
    for_each_statistic_with_first(k, w, static_cast<std::uint32_t>(c), [&](const Statistic& t) {
      ++chunk.visited;
      bool weighed = false;
      double log_w = 0.0;
      for (std::size_t r = 0; r < local.size(); ++r) {
        BigInt count = local[r].count(t);
        if (options.count_hook) options.count_hook(count);
        if (sgn(count) <= 0) {
          if (r == 0) ++chunk.infeasible;
          continue;
        }
        if (!weighed) {
          log_w = weigh(weights, t);
          weighed = true;
        }
        chunk.acc[r].add(log_of(count) + log_w);
      }
    });
  });

  OrbitSums out;
  std::vector<LogSumExp> total(evidences.size());
  for (const auto& chunk : chunks) {
    for (std::size_t r = 0; r < total.size(); ++r) total[r].merge(chunk.acc[r]);
    out.diagnostics.statistics_visited += chunk.visited;
    out.diagnostics.infeasible += chunk.infeasible;
  }
  for (const auto& acc : total) out.log_mass.push_back(acc.value());
  out.diagnostics.elapsed_ms = elapsed_ms(start);
  return out;
}

MpeSearch mpe_search(const Decomposition& decomp, const WeightOracle& weights, const Evidence& e,
                     const EngineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto k = static_cast<std::uint32_t>(decomp.block_count());
  const std::size_t w = decomp.width();
  const auto block_evidence = block_evidence_patterns(e, decomp);
  EvidenceProfile profile(evidence_pattern_count(w), 0);
  for (auto m : block_evidence) ++profile[m];

  struct Chunk {
    bool feasible = false;
    Statistic best;
    double log_weight = 0.0;
    std::uint64_t visited = 0;
    std::uint64_t infeasible = 0;
  };
  std::vector<Chunk> chunks(k + 1);
  const unsigned workers = detail::worker_count(options.jobs, chunks.size());
  std::vector<SuborbitCounter> counters;
  for (unsigned i = 0; i < workers; ++i) counters.emplace_back(profile, w);

  detail::run_chunks(chunks.size(), workers, [&](unsigned worker, std::size_t c) {
    Chunk& chunk = chunks[c];
    for_each_statistic_with_first(k, w, static_cast<std::uint32_t>(c), [&](const Statistic& t) {
      ++chunk.visited;
      if (!counters[worker].feasible(t)) {
        ++chunk.infeasible;
        return;
      }
      double log_w = weigh(weights, t);
      if (!chunk.feasible || log_w > chunk.log_weight) {
        chunk.feasible = true;
        chunk.best = t;
        chunk.log_weight = log_w;
      }
    });
  });

  MpeSearch out;
  for (const auto& chunk : chunks) {
    out.diagnostics.statistics_visited += chunk.visited;
    out.diagnostics.infeasible += chunk.infeasible;
    if (chunk.feasible && (!out.feasible || chunk.log_weight > out.log_weight)) {
      out.feasible = true;
      out.statistic = chunk.best;
      out.log_weight = chunk.log_weight;
    }
  }
  if (out.feasible) {
    auto a = counters[0].first_matrix(out.statistic);
    out.patterns = completion_patterns(*a, block_evidence);
  }
  out.diagnostics.elapsed_ms = elapsed_ms(start);
  return out;
}

namespace {

QueryResult marginal_from(const OrbitSums& sums) {
  QueryResult r;
  r.probability = sums.log_mass[0] == kNegInf ? 0.0 : std::exp(sums.log_mass[0] - sums.log_mass[1]);
  r.log_partition = sums.log_mass[1];
  r.log_weight = kNaN;
  r.diagnostics = sums.diagnostics;
  return r;
}

QueryResult mpe_from(const MpeSearch& search, const Decomposition& decomp) {
  if (!search.feasible) throw std::domain_error("evidence is infeasible under every statistic");
  QueryResult r;
  r.probability = kNaN;
  r.assignment = assignment_from_patterns(decomp, search.patterns);
  r.log_weight = search.log_weight;
  r.log_partition = kNaN;
  r.diagnostics = search.diagnostics;
  return r;
}

}  // namespace

QueryResult lifted_marginal(const GroundModel& model, const Decomposition& decomp, const Evidence& e,
                            const EngineOptions& options) {
  require_full_scope(model, decomp);
  GroundWeights weights(model, decomp);
  const Evidence sets[] = {e, Evidence{}};
  return marginal_from(orbit_sums(decomp, weights, sets, options));
}

QueryResult lifted_mpe(const GroundModel& model, const Decomposition& decomp, const Evidence& e,
                       const EngineOptions& options) {
  require_full_scope(model, decomp);
  GroundWeights weights(model, decomp);
  return mpe_from(mpe_search(decomp, weights, e, options), decomp);
}

OrbitSums monadic_log_masses(const MLNModel& model, std::span<const Evidence> evidences,
                             const EngineOptions& options) {
  Decomposition decomp = monadic_decomposition(model);
  if (options.memoize) {
    MonadicStatisticWeights weights(model);
    return orbit_sums(decomp, weights, evidences, options);
  }
  GroundModel grounded(model);
  GroundWeights weights(grounded, decomp);
  return orbit_sums(decomp, weights, evidences, options);
}

QueryResult monadic_marginal(const MLNModel& model, const Evidence& e, const EngineOptions& options) {
  const Evidence sets[] = {e, Evidence{}};
  return marginal_from(monadic_log_masses(model, sets, options));
}

QueryResult monadic_mpe(const MLNModel& model, const Evidence& e, const EngineOptions& options) {
  Decomposition decomp = monadic_decomposition(model);
  if (options.memoize) {
    MonadicStatisticWeights weights(model);
    return mpe_from(mpe_search(decomp, weights, e, options), decomp);
  }
  GroundModel grounded(model);
  GroundWeights weights(grounded, decomp);
  return mpe_from(mpe_search(decomp, weights, e, options), decomp);
}

}  // namespace exlift

// ---------------------------------------------------------------------------
// Two-variable fragment

namespace exlift {

namespace {

double factor_log_sum(const GroundModel& model, std::span<const std::size_t> factors, const World& world) {
  double s = 0.0;
  for (auto i : factors) {
    const auto& f = model.factors()[i];
    if (model.satisfied(f, [&](AtomId a) { return world[a]; })) s += f.weight;
  }
  return s;
}

// log sum over all assignments of `atoms` of exp(factor_log_sum). Leaves the
// atoms in an unspecified state.
double enumerate_log_sum(const GroundModel& model, std::span<const AtomId> atoms,
                         std::span<const std::size_t> factors, World& world) {
  if (atoms.size() > 30) throw std::invalid_argument("too many pair atoms to sum out");
  LogSumExp acc;
  const std::uint64_t n = std::uint64_t{1} << atoms.size();
  for (std::uint64_t bits = 0; bits < n; ++bits) {
    for (std::size_t i = 0; i < atoms.size(); ++i) world.set(atoms[i], (bits >> i) & 1);
    acc.add(factor_log_sum(model, factors, world));
  }
  return acc.value();
}

bool off_diagonal(const AtomTable& atoms, AtomId a) {
  GroundAtom g = atoms.atom(a);
  return g.args.size() == 2 && g.args[0] != g.args[1];
}

void check_bound(std::span<const std::size_t> k_constants, const EngineOptions& options) {
  if (k_constants.size() > options.k_bound)
    throw std::invalid_argument("binary atoms in the query touch " + std::to_string(k_constants.size()) +
                                " constants; the bound is " + std::to_string(options.k_bound));
}

struct SplitEvidence {
  Evidence fixed;  // on Q atoms
  Evidence rest;   // on block atoms
};

SplitEvidence split(const GroundModel& model, const ReducedProblem& problem, const Evidence& e) {
  SplitEvidence out;
  for (auto [a, v] : e) {
    if (std::binary_search(problem.q_atoms.begin(), problem.q_atoms.end(), a))
      out.fixed.assign(a, v);
    else if (problem.blocks.in_scope(a))
      out.rest.assign(a, v);
    else
      throw std::invalid_argument("evidence atom " + model.atoms().name(a) + " is summed out by the engine");
  }
  return out;
}

Evidence q_assignment(const ReducedProblem& problem, std::uint64_t bits) {
  Evidence q;
  for (std::size_t i = 0; i < problem.q_atoms.size(); ++i) q.assign(problem.q_atoms[i], (bits >> i) & 1);
  return q;
}

bool agrees(const Evidence& q, const Evidence& fixed) {
  for (auto [a, v] : fixed)
    if (q.find(a) != v) return false;
  return true;
}

void accumulate(Diagnostics& total, const Diagnostics& part) {
  total.statistics_visited += part.statistics_visited;
  total.infeasible += part.infeasible;
}

}  // namespace

std::size_t ReducedProblem::pair_index(std::size_t bi, std::size_t bj) const {
  if (bi > bj) std::swap(bi, bj);
  const std::size_t k = blocks.block_count();
  return bi * k - bi * (bi + 1) / 2 + (bj - bi - 1);
}

ReducedProblem reduce_problem(const GroundModel& model, const ConditionalStructure& structure,
                              std::span<const std::size_t> k_constants) {
  const AtomTable& atoms = model.atoms();
  const std::size_t k = atoms.domain_size();
  ReducedProblem r;
  r.k_constants.assign(k_constants.begin(), k_constants.end());
  std::sort(r.k_constants.begin(), r.k_constants.end());
  r.k_constants.erase(std::unique(r.k_constants.begin(), r.k_constants.end()), r.k_constants.end());
  for (auto c : r.k_constants)
    if (c >= k) throw std::invalid_argument("constant index out of range");

  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> block_of(k, npos);
  for (std::size_t c = 0; c < k; ++c) {
    if (std::binary_search(r.k_constants.begin(), r.k_constants.end(), c)) continue;
    block_of[c] = r.kept_constants.size();
    r.kept_constants.push_back(c);
  }

  std::vector<std::vector<AtomId>> blocks;
  for (auto i : r.kept_constants) {
    std::vector<AtomId> block = structure.y_decomp.block(i);
    for (auto q : structure.binary_predicates)
      for (auto c : r.k_constants) {
        block.push_back(atoms.id(q, {i, c}));
        block.push_back(atoms.id(q, {c, i}));
      }
    blocks.push_back(std::move(block));
  }
  const std::size_t width = structure.y_decomp.width() + 2 * structure.binary_predicates.size() * r.k_constants.size();
  r.blocks = Decomposition(std::move(blocks), width);

  for (std::size_t bi = 0; bi < r.kept_constants.size(); ++bi)
    for (std::size_t bj = bi + 1; bj < r.kept_constants.size(); ++bj) {
      const auto& p = structure.pairs[structure.pair_index(r.kept_constants[bi], r.kept_constants[bj])];
      r.pairs.push_back({bi, bj, p.atoms});
    }

  for (auto p : structure.unary_predicates)
    for (auto c : r.k_constants) r.q_atoms.push_back(atoms.id(p, {c}));
  for (auto q : structure.binary_predicates)
    for (auto c1 : r.k_constants)
      for (auto c2 : r.k_constants) r.q_atoms.push_back(atoms.id(q, {c1, c2}));
  std::sort(r.q_atoms.begin(), r.q_atoms.end());

  enum class Role : std::uint8_t { None, Block, Pair, Fixed };
  std::vector<Role> role(atoms.size(), Role::None);
  std::vector<std::size_t> owner(atoms.size(), 0);
  for (std::size_t b = 0; b < r.blocks.block_count(); ++b)
    for (auto a : r.blocks.block(b)) {
      role[a] = Role::Block;
      owner[a] = b;
    }
  for (std::size_t p = 0; p < r.pairs.size(); ++p)
    for (auto a : r.pairs[p].atoms) {
      role[a] = Role::Pair;
      owner[a] = p;
    }
  for (auto a : r.q_atoms) role[a] = Role::Fixed;

  for (const auto& f : model.factors()) {
    std::vector<std::size_t> touched;
    std::size_t pair = npos;
    for (auto a : f.atoms) {
      switch (role[a]) {
        case Role::None:
          throw std::logic_error("atom " + atoms.name(a) + " has no place in the reduced problem");
        case Role::Block:
          if (std::find(touched.begin(), touched.end(), owner[a]) == touched.end()) touched.push_back(owner[a]);
          break;
        case Role::Pair:
          if (pair != npos && pair != owner[a]) throw std::logic_error("factor spans two pairs");
          pair = owner[a];
          break;
        case Role::Fixed:
          break;
      }
    }
    std::sort(touched.begin(), touched.end());
    using Kind = ReducedProblem::FactorKind;
    if (pair != npos) {
      for (auto b : touched)
        if (b != r.pairs[pair].first && b != r.pairs[pair].second)
          throw std::logic_error("factor reaches outside its pair");
      r.roles.push_back({Kind::Pair, pair, 0});
    } else if (touched.empty()) {
      r.roles.push_back({Kind::Constant, 0, 0});
    } else if (touched.size() == 1) {
      r.roles.push_back({Kind::Unary, touched[0], 0});
    } else if (touched.size() == 2) {
      r.roles.push_back({Kind::BinaryY, touched[0], touched[1]});
    } else {
      throw std::logic_error("factor touches more than two blocks");
    }
  }
  return r;
}

ConditionalWeights::ConditionalWeights(const GroundModel& model, const ReducedProblem& problem, const Evidence& q,
                                       bool memoize)
    : model_(model), problem_(problem), q_(q), memoize_(memoize), pair_factors_(problem.pairs.size()) {
  using Kind = ReducedProblem::FactorKind;
  std::vector<std::size_t> constant, unary0, binary01;
  for (std::size_t i = 0; i < problem.roles.size(); ++i) {
    const auto& role = problem.roles[i];
    if (role.kind == Kind::Pair) {
      pair_factors_[role.a].push_back(i);
      continue;
    }
    y_factors_.push_back(i);
    if (role.kind == Kind::Constant) constant.push_back(i);
    if (role.kind == Kind::Unary && role.a == 0) unary0.push_back(i);
    if (role.kind == Kind::BinaryY && role.a == 0 && role.b == 1) binary01.push_back(i);
  }
  if (!memoize_) return;

  const std::size_t kb = problem.blocks.block_count();
  const std::size_t w = problem.blocks.width();
  const std::size_t m = bit_pattern_count(w);
  World world = base_world();
  constant_ = factor_sum(constant, world);
  auto write_block = [&](std::size_t b, std::size_t pattern) {
    for (std::size_t p = 0; p < w; ++p) world.set(problem.blocks.block(b)[p], pattern_bit(pattern, w, p));
  };
  if (kb >= 1) {
    unary_.resize(m);
    for (std::size_t a = 0; a < m; ++a) {
      write_block(0, a);
      unary_[a] = factor_sum(unary0, world);
    }
  }
  if (kb >= 2) {
    pair_.resize(m * m);
    z_sum_.resize(m * m);
    for (std::size_t a = 0; a < m; ++a) {
      write_block(0, a);
      for (std::size_t b = 0; b < m; ++b) {
        write_block(1, b);
        z_sum_[a * m + b] = pair_log_sum(0, world);
        pair_[a * m + b] = factor_sum(binary01, world) + z_sum_[a * m + b];
      }
    }
  }
}

World ConditionalWeights::base_world() const {
  World world(model_.atom_count());
  for (auto [a, v] : q_) world.set(a, v);
  return world;
}

double ConditionalWeights::factor_sum(std::span<const std::size_t> factors, const World& world) const {
  return factor_log_sum(model_, factors, world);
}

double ConditionalWeights::pair_log_sum(std::size_t pair, World& world) const {
  return enumerate_log_sum(model_, problem_.pairs[pair].atoms, pair_factors_[pair], world);
}

double ConditionalWeights::pair_table(std::uint32_t a, std::uint32_t b) const {
  if (z_sum_.empty()) throw std::logic_error("pair table needs memoized mode and two blocks");
  return z_sum_[a * bit_pattern_count(problem_.blocks.width()) + b];
}

double ConditionalWeights::statistic_log_weight(const Statistic& t) const {
  if (!memoize_) return WeightOracle::statistic_log_weight(t);
  const std::size_t m = t.size();
  std::vector<std::size_t> used;
  for (std::size_t a = 0; a < m; ++a)
    if (t[a] != 0) used.push_back(a);
  double s = constant_;
  for (std::size_t i = 0; i < used.size(); ++i) {
    const std::size_t a = used[i];
    const double ca = t[a];
    s += ca * unary_[a];
    if (pair_.empty()) continue;
    s += ca * (ca - 1) / 2 * pair_[a * m + a];
    for (std::size_t j = i + 1; j < used.size(); ++j) s += ca * t[used[j]] * pair_[a * m + used[j]];
  }
  return s;
}

double ConditionalWeights::patterns_log_weight(std::span<const std::uint32_t> patterns) const {
  World world = base_world();
  write_patterns(problem_.blocks, patterns, world);
  double s = factor_sum(y_factors_, world);
  for (std::size_t p = 0; p < problem_.pairs.size(); ++p) s += pair_log_sum(p, world);
  return s;
}

double pair_factor_sum(const GroundModel& model, const ConditionalStructure& structure, std::uint32_t pattern_i,
                       std::uint32_t pattern_j, std::size_t pair) {
  const auto& p = structure.pairs.at(pair);
  const auto& decomp = structure.y_decomp;
  const std::size_t w = decomp.width();
  World world(model.atom_count());
  for (std::size_t pos = 0; pos < w; ++pos) {
    world.set(decomp.block(p.first)[pos], pattern_bit(pattern_i, w, pos));
    world.set(decomp.block(p.second)[pos], pattern_bit(pattern_j, w, pos));
  }
  std::vector<std::size_t> factors;
  for (std::size_t i = 0; i < structure.factor_group.size(); ++i)
    if (structure.factor_group[i] == pair) factors.push_back(i);
  return enumerate_log_sum(model, p.atoms, factors, world);
}

std::vector<std::size_t> binary_query_constants(const GroundModel& model, const Evidence& e) {
  std::vector<std::size_t> out;
  for (auto [a, v] : e) {
    (void)v;
    if (!off_diagonal(model.atoms(), a)) continue;
    for (auto c : model.atoms().atom(a).args) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OrbitSums conditional_log_masses(const GroundModel& model, const ConditionalStructure& structure,
                                 std::span<const Evidence> evidences, const EngineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> k_constants;
  for (const auto& e : evidences) {
    auto c = binary_query_constants(model, e);
    k_constants.insert(k_constants.end(), c.begin(), c.end());
  }
  std::sort(k_constants.begin(), k_constants.end());
  k_constants.erase(std::unique(k_constants.begin(), k_constants.end()), k_constants.end());
  check_bound(k_constants, options);

  const ReducedProblem problem = reduce_problem(model, structure, k_constants);
  if (problem.q_atoms.size() > 24) throw std::invalid_argument("too many atoms among the query constants");
  std::vector<SplitEvidence> parts;
  for (const auto& e : evidences) parts.push_back(split(model, problem, e));

  std::vector<LogSumExp> acc(evidences.size());
  OrbitSums out;
  const std::uint64_t assignments = std::uint64_t{1} << problem.q_atoms.size();
  for (std::uint64_t bits = 0; bits < assignments; ++bits) {
    const Evidence q = q_assignment(problem, bits);
    std::vector<std::size_t> live;
    std::vector<Evidence> rests;
    for (std::size_t r = 0; r < parts.size(); ++r)
      if (agrees(q, parts[r].fixed)) {
        live.push_back(r);
        rests.push_back(parts[r].rest);
      }
    if (live.empty()) continue;
    ConditionalWeights weights(model, problem, q, options.memoize);
    OrbitSums sums = orbit_sums(problem.blocks, weights, rests, options);
    for (std::size_t i = 0; i < live.size(); ++i) acc[live[i]].add(sums.log_mass[i]);
    accumulate(out.diagnostics, sums.diagnostics);
  }
  for (const auto& a : acc) out.log_mass.push_back(a.value());
  out.diagnostics.elapsed_ms = elapsed_ms(start);
  return out;
}

QueryResult conditional_marginal(const GroundModel& model, const ConditionalStructure& structure,
                                 const Evidence& e, const EngineOptions& options) {
  if (!binary_query_constants(model, e).empty())
    throw std::invalid_argument("evidence assigns off-diagonal binary atoms");
  const Evidence sets[] = {e, Evidence{}};
  return marginal_from(conditional_log_masses(model, structure, sets, options));
}

QueryResult bounded_binary_query(const GroundModel& model, const ConditionalStructure& structure,
                                 const Evidence& e, const EngineOptions& options) {
  const Evidence sets[] = {e, Evidence{}};
  return marginal_from(conditional_log_masses(model, structure, sets, options));
}

QueryResult conditional_mpe(const GroundModel& model, const ConditionalStructure& structure, const Evidence& e,
                            const EngineOptions& options) {
  if (!binary_query_constants(model, e).empty())
    throw std::invalid_argument("MPE evidence assigns off-diagonal binary atoms");
  const ReducedProblem problem = reduce_problem(model, structure, {});
  const SplitEvidence parts = split(model, problem, e);
  ConditionalWeights weights(model, problem, Evidence{}, options.memoize);
  return mpe_from(mpe_search(problem.blocks, weights, parts.rest, options), problem.blocks);
}

}  // namespace exlift
