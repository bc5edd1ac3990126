#pragma once

// Exact inference by enumerating every world. Worlds are visited in the
// integer order of their bit strings (atom 0 least significant).

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "exlift/combinatorics.hpp"
#include "exlift/exchange.hpp"
#include "exlift/ground.hpp"

namespace exlift {

struct OracleOptions {
  std::size_t cap = 25;  // largest number of enumerated atoms
  unsigned jobs = 1;
};

class OracleCapError : public std::runtime_error {
 public:
  OracleCapError(std::size_t atoms, std::size_t cap);
};

struct OracleResult {
  double probability = 0.0;
  World world;             // MPE: argmax world (or its maximized atoms)
  double log_weight = 0.0;
  double log_partition = 0.0;
  bool feasible = true;    // false when no world is compatible with e
};

/// Pr(e) = sum over worlds ~ e / sum over all worlds.
OracleResult brute_marginal(const GroundModel& model, const Evidence& e, const OracleOptions& options = {});

/// Unnormalized log P(e_r) for each evidence set; the last entry of the
/// result is log Z.
std::vector<double> brute_log_masses(const GroundModel& model, std::span<const Evidence> evidences,
                                     const OracleOptions& options = {});

/// Heaviest world compatible with e; ties go to the smallest bit string.
OracleResult brute_mpe(const GroundModel& model, const Evidence& e, const OracleOptions& options = {});

/// Maximizes over assignments of `maximized`, summing out every other atom.
/// The returned world holds the winning values on `maximized`, zero elsewhere.
OracleResult brute_marginal_mpe(const GroundModel& model, std::span<const AtomId> maximized, const Evidence& e,
                                const OracleOptions& options = {});

/// |{x over the scope : T(x) = t, x ~ e}| by enumerating the scope atoms e
/// leaves free.
BigInt brute_suborbit(const Statistic& t, const Evidence& e, const Decomposition& decomp, std::size_t cap = 25);
/// The same count for every statistic at once, from a single enumeration.
/// Statistics with no compatible world are absent.
std::map<Statistic, BigInt> brute_suborbit_histogram(const Evidence& e, const Decomposition& decomp,
                                                     std::size_t cap = 25);

}  // namespace exlift
