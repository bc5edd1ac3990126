#pragma once

// Fragment classification and the decompositions each fragment guarantees.

#include <cstddef>
#include <string>
#include <vector>

#include "exlift/exchange.hpp"
#include "exlift/fol.hpp"
#include "exlift/ground.hpp"

namespace exlift {

enum class FragmentKind { Monadic, TwoVariable, Unsupported };

std::string to_string(FragmentKind kind);

struct FragmentClass {
  FragmentKind kind = FragmentKind::Unsupported;
  std::string reason;  // why the model is Unsupported; empty otherwise
};

/// Monadic when every predicate is unary; TwoVariable when arities are <= 2
/// and no formula has more than two logical variables. Monadic wins when
/// both hold.
FragmentClass classify(const MLNModel& model);

/// Block i = {P_1(i), ..., P_M(i)} in predicate order. Needs only the atom
/// table, so it works at domain sizes where grounding would be wasteful.
Decomposition monadic_decomposition(const MLNModel& model);

/// Y/Z split of a two-variable model.
///
/// Y-block i holds the unary atoms P(i) in predicate order followed by the
/// reflexive atoms Q(i,i) of every binary predicate. Z_{i,j} (i < j) holds
/// Q_1(i,j)..Q_N(i,j) then Q_1(j,i)..Q_N(j,i). Every ground factor belongs
/// to the Y-group (no off-diagonal binary atom) or to exactly one pair.
struct ConditionalStructure {
  struct Pair {
    std::size_t first;   // constant index, first < second
    std::size_t second;
    std::vector<AtomId> atoms;
  };

  Decomposition y_decomp;
  std::vector<Pair> pairs;
  std::vector<std::size_t> unary_predicates;   // M of them
  std::vector<std::size_t> binary_predicates;  // N of them
  /// Per ground factor: kYGroup or an index into `pairs`.
  std::vector<std::size_t> factor_group;

  static constexpr std::size_t kYGroup = static_cast<std::size_t>(-1);

  std::size_t pair_index(std::size_t i, std::size_t j) const;
};

/// Throws std::invalid_argument for models outside the two-variable fragment
/// and std::logic_error if a ground factor straddles two pairs.
ConditionalStructure two_var_structure(const GroundModel& model);

}  // namespace exlift
