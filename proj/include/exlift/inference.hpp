#pragma once

// Orbit-sum inference over exchangeable decompositions.
//
// For a statistic T with orbits S_t, an unnormalized marginal is
//   sum_t |S_{t,e}| * w(x_t),   x_t any member of S_t,
// and MPE picks the feasible t maximizing w(x_t). Everything runs in log
// space; cardinalities enter through their exact logs.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "exlift/detectors.hpp"
#include "exlift/exchange.hpp"
#include "exlift/ground.hpp"

namespace exlift {

struct EngineOptions {
  unsigned jobs = 1;
  /// Statistic-level weights (monadic) and pair-type tables (two-variable).
  /// Off means every statistic is weighed through a representative world.
  bool memoize = true;
  /// Largest constant set K a binary-atom query may touch.
  std::size_t k_bound = 2;
  /// Fault injection: rewrites each suborbit count before it is used.
  std::function<void(BigInt&)> count_hook;
};

struct Diagnostics {
  std::uint64_t statistics_visited = 0;
  std::uint64_t infeasible = 0;  // statistics with an empty suborbit
  double elapsed_ms = 0.0;
};

struct QueryResult {
  double probability = 0.0;  // marginal mode
  Evidence assignment;       // MPE mode: the maximizing assignment
  double log_weight = 0.0;   // MPE mode: its unnormalized log weight
  double log_partition = 0.0;
  Diagnostics diagnostics;
};

/// Log unnormalized probability of scope assignments. Implementations must
/// be invariant under permuting blocks of the decomposition they serve, and
/// safe to call concurrently.
class WeightOracle {
 public:
  virtual ~WeightOracle() = default;
  /// True when statistic_log_weight is available and exact.
  virtual bool per_statistic() const { return false; }
  virtual double statistic_log_weight(const Statistic& t) const;
  /// Weight of the scope assignment with the given block patterns.
  virtual double patterns_log_weight(std::span<const std::uint32_t> patterns) const = 0;
};

/// Writes the patterns into a world and evaluates every ground factor.
class GroundWeights final : public WeightOracle {
 public:
  GroundWeights(const GroundModel& model, const Decomposition& decomp);
  double patterns_log_weight(std::span<const std::uint32_t> patterns) const override;

 private:
  const GroundModel& model_;
  const Decomposition& decomp_;
};

/// Monadic models: a formula with v logical variables is satisfied by
///   sum over type tuples tau in [2^w]^v of [f true under tau] * prod_p c_{tau_p}
/// groundings, since each atom only reads its variable's block pattern.
/// The counts are exact integers (k^v must fit in 64 bits).
class MonadicStatisticWeights final : public WeightOracle {
 public:
  explicit MonadicStatisticWeights(const MLNModel& model);
  bool per_statistic() const override { return true; }
  double statistic_log_weight(const Statistic& t) const override;
  double patterns_log_weight(std::span<const std::uint32_t> patterns) const override;

 private:
  struct Term {  // one per formula
    std::size_t arity;                  // number of logical variables
    double weight;
    std::vector<std::size_t> satisfied;  // type tuples under which it holds
  };
  std::size_t width_;
  std::vector<Term> terms_;
};

/// Sums computed in one pass over all statistics, one per evidence set.
struct OrbitSums {
  std::vector<double> log_mass;
  Diagnostics diagnostics;
};

OrbitSums orbit_sums(const Decomposition& decomp, const WeightOracle& weights,
                     std::span<const Evidence> evidences, const EngineOptions& options);

struct MpeSearch {
  bool feasible = false;
  Statistic statistic;
  double log_weight = 0.0;
  std::vector<std::uint32_t> patterns;  // representative block patterns
  Diagnostics diagnostics;
};

/// Feasible statistic with the largest weight; ties go to the
/// lexicographically smallest statistic.
MpeSearch mpe_search(const Decomposition& decomp, const WeightOracle& weights, const Evidence& e,
                     const EngineOptions& options);

/// P(e) for a decomposition covering every ground atom.
QueryResult lifted_marginal(const GroundModel& model, const Decomposition& decomp, const Evidence& e,
                            const EngineOptions& options = {});
QueryResult lifted_mpe(const GroundModel& model, const Decomposition& decomp, const Evidence& e,
                       const EngineOptions& options = {});

/// Monadic engine that never grounds the model (statistic-level weights).
QueryResult monadic_marginal(const MLNModel& model, const Evidence& e, const EngineOptions& options = {});
QueryResult monadic_mpe(const MLNModel& model, const Evidence& e, const EngineOptions& options = {});
/// log P(e_r) unnormalized for each evidence set, plus diagnostics; the
/// monadic decomposition is built from the model.
OrbitSums monadic_log_masses(const MLNModel& model, std::span<const Evidence> evidences,
                             const EngineOptions& options = {});

// ---------------------------------------------------------------------------
// Two-variable fragment

/// The exchangeable problem left after fixing the atoms among a constant set
/// K. With K empty this is the plain Y/Z structure.
struct ReducedProblem {
  enum class FactorKind : std::uint8_t { Constant, Unary, BinaryY, Pair };
  struct FactorRole {
    FactorKind kind;
    std::size_t a = 0;  // block (Unary, BinaryY) or pair index (Pair)
    std::size_t b = 0;  // second block for BinaryY
  };

  std::vector<std::size_t> kept_constants;  // block order
  std::vector<std::size_t> k_constants;
  Decomposition blocks;
  std::vector<ConditionalStructure::Pair> pairs;  // among kept constants
  std::vector<AtomId> q_atoms;                    // atoms with all constants in K
  std::vector<FactorRole> roles;                  // per ground factor

  std::size_t pair_index(std::size_t bi, std::size_t bj) const;
};

/// Widened blocks: the original Y-block atoms, then Q(i,c), Q(c,i) for every
/// binary predicate Q and every c in K (domain order).
ReducedProblem reduce_problem(const GroundModel& model, const ConditionalStructure& structure,
                              std::span<const std::size_t> k_constants);

/// Weights of a reduced problem under a fixed assignment q of its Q atoms,
/// with the Z atoms summed out. Memoized mode tabulates the per-block,
/// per-block-pair and per-pair-type terms from blocks 0 and 1.
class ConditionalWeights final : public WeightOracle {
 public:
  ConditionalWeights(const GroundModel& model, const ReducedProblem& problem, const Evidence& q, bool memoize);

  bool per_statistic() const override { return memoize_; }
  double statistic_log_weight(const Statistic& t) const override;
  double patterns_log_weight(std::span<const std::uint32_t> patterns) const override;

  /// Memoized log-sum over Z of the pair (block 0, block 1) given their
  /// patterns. Only valid in memoized mode with at least two blocks.
  double pair_table(std::uint32_t a, std::uint32_t b) const;

 private:
  double factor_sum(std::span<const std::size_t> factors, const World& world) const;
  double pair_log_sum(std::size_t pair, World& world) const;
  World base_world() const;

  const GroundModel& model_;
  const ReducedProblem& problem_;
  Evidence q_;
  bool memoize_;
  std::vector<std::size_t> y_factors_;                  // Constant, Unary, BinaryY
  std::vector<std::vector<std::size_t>> pair_factors_;  // per pair
  // Memoized tables.
  double constant_ = 0.0;
  std::vector<double> unary_;  // per pattern
  std::vector<double> pair_;   // per pattern pair: binary Y terms + Z log-sum
  std::vector<double> z_sum_;  // per pattern pair: Z log-sum only
};

/// log of the sum over the 2^{2N} assignments of Z_{i,j} of exp(weights of
/// satisfied factors assigned to that pair), given the two Y-block patterns.
double pair_factor_sum(const GroundModel& model, const ConditionalStructure& structure, std::uint32_t pattern_i,
                       std::uint32_t pattern_j, std::size_t pair);

/// Constants of the off-diagonal binary atoms in `e`, in domain order.
std::vector<std::size_t> binary_query_constants(const GroundModel& model, const Evidence& e);

/// P(e) for evidence on Y atoms only.
QueryResult conditional_marginal(const GroundModel& model, const ConditionalStructure& structure,
                                 const Evidence& e, const EngineOptions& options = {});

/// Unnormalized log masses for several evidence sets, which may include
/// off-diagonal binary atoms over at most k_bound constants in total.
OrbitSums conditional_log_masses(const GroundModel& model, const ConditionalStructure& structure,
                                 std::span<const Evidence> evidences, const EngineOptions& options = {});

/// P(e) where e may assign a bounded number of binary atoms.
QueryResult bounded_binary_query(const GroundModel& model, const ConditionalStructure& structure,
                                 const Evidence& e, const EngineOptions& options = {});

/// argmax over Y (and any Q atoms) of the Z-marginal weight, given e.
QueryResult conditional_mpe(const GroundModel& model, const ConditionalStructure& structure, const Evidence& e,
                            const EngineOptions& options = {});

}  // namespace exlift
