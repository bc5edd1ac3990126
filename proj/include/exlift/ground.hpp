#pragma once

// Grounding of an MLN over its finite domain, and world weights.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "exlift/fol.hpp"
#include "exlift/world.hpp"

namespace exlift {

struct GroundAtom {
  std::size_t predicate = 0;
  std::vector<std::size_t> args;  // constant indices

  auto operator<=>(const GroundAtom&) const = default;
};

/// Canonical bijection between ground atoms and 0..n-1: atoms are ordered by
/// predicate index, then lexicographically by argument indices. Computed
/// arithmetically, so it does not need the grounding itself.
class AtomTable {
 public:
  AtomTable() = default;
  AtomTable(std::vector<Predicate> predicates, std::vector<std::string> constants);

  std::size_t size() const { return size_; }
  std::size_t domain_size() const { return constants_.size(); }
  const std::vector<Predicate>& predicates() const { return predicates_; }
  const std::vector<std::string>& constants() const { return constants_; }

  AtomId id(std::size_t predicate, std::span<const std::size_t> args) const;
  AtomId id(std::size_t predicate, std::initializer_list<std::size_t> args) const {
    return id(predicate, std::span<const std::size_t>(args.begin(), args.size()));
  }
  GroundAtom atom(AtomId id) const;
  std::string name(AtomId id) const;
  /// Parses "Pred(C1,C2)" against this table. Throws std::invalid_argument.
  AtomId parse(std::string_view text) const;

 private:
  std::vector<Predicate> predicates_;
  std::vector<std::string> constants_;
  std::vector<std::size_t> offsets_;  // first atom id per predicate, plus end
  std::size_t size_ = 0;
};

/// One grounding of one first-order formula.
struct GroundFactor {
  double weight = 0.0;
  std::size_t formula = 0;            // index into MLNModel::formulas
  std::vector<std::size_t> binding;   // constant per logical variable
  std::vector<AtomId> slots;          // atom id per formula atom occurrence
  std::vector<AtomId> atoms;          // distinct atoms, ascending
  std::vector<std::uint8_t> table;    // truth table over `atoms`; empty when too wide
};

/// The ground distribution: indexed ground atoms plus weighted ground
/// formulas. Immutable after construction.
class GroundModel {
 public:
  explicit GroundModel(MLNModel model);

  const MLNModel& model() const { return *model_; }
  const AtomTable& atoms() const { return atoms_; }
  const std::vector<GroundFactor>& factors() const { return factors_; }
  std::size_t atom_count() const { return atoms_.size(); }

  /// Truth of a factor. `value(atom)` supplies each atom's value.
  template <class AtomValue>
  bool satisfied(const GroundFactor& f, AtomValue&& value) const {
    if (!f.table.empty()) {
      std::size_t idx = 0;
      for (std::size_t p = 0; p < f.atoms.size(); ++p)
        if (value(f.atoms[p])) idx |= std::size_t{1} << p;
      return f.table[idx] != 0;
    }
    return model_->formulas[f.formula].formula.evaluate(
        [&](std::size_t slot) { return static_cast<bool>(value(f.slots[slot])); });
  }

  /// Sum over formulas of weight times the number of satisfied groundings,
  /// i.e. log of the unnormalized world weight.
  double log_weight(const World& world) const;
  /// Same, with atom i read from bit i. Requires atom_count() <= 64.
  double log_weight_bits(std::uint64_t bits) const;

 private:
  std::shared_ptr<const MLNModel> model_;
  AtomTable atoms_;
  std::vector<GroundFactor> factors_;
  std::vector<std::size_t> formula_end_;  // factors of formula f end here

  template <class AtomValue>
  double weighted_counts(AtomValue&& value) const;
};

GroundModel ground(const MLNModel& model);

bool eval_formula(const GroundModel& model, const GroundFactor& factor, const World& world);
/// Throws std::invalid_argument if the factor mentions an unassigned atom.
bool eval_formula(const GroundModel& model, const GroundFactor& factor, const Evidence& partial);

double log_weight(const GroundModel& model, const World& world);

/// Evidence file: one "Atom = 0|1" per line, '#' comments.
Evidence parse_evidence(std::string_view text, const AtomTable& atoms);
/// Query list: "Atom=0|1[,Atom=0|1...]".
Evidence parse_query(std::string_view text, const AtomTable& atoms);

}  // namespace exlift
