#include "exlift/detectors.hpp"

#include <algorithm>
#include <stdexcept>

namespace exlift {

std::string to_string(FragmentKind kind) {
  switch (kind) {
    case FragmentKind::Monadic:
      return "Monadic";
    case FragmentKind::TwoVariable:
      return "TwoVariable";
    case FragmentKind::Unsupported:
      return "Unsupported";
  }
  return "Unsupported";
}

FragmentClass classify(const MLNModel& model) {
  std::size_t max_arity = model.max_arity();
  if (max_arity <= 1) return {FragmentKind::Monadic, {}};
  if (max_arity > 2) {
    for (const auto& p : model.predicates)
      if (p.arity > 2)
        return {FragmentKind::Unsupported, "predicate " + p.name + " has arity " + std::to_string(p.arity)};
  }
  for (std::size_t i = 0; i < model.formulas.size(); ++i) {
    std::size_t v = model.formulas[i].formula.variable_count();
    if (v > 2)
      return {FragmentKind::Unsupported,
              "formula " + std::to_string(i + 1) + " has " + std::to_string(v) + " logical variables"};
  }
  return {FragmentKind::TwoVariable, {}};
}

Decomposition monadic_decomposition(const MLNModel& model) {
  if (classify(model).kind != FragmentKind::Monadic)
    throw std::invalid_argument("monadic decomposition needs a model with only unary predicates");
  AtomTable atoms(model.predicates, model.constants);
  const std::size_t k = model.domain_size();
  std::vector<std::vector<AtomId>> blocks(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t p = 0; p < model.predicates.size(); ++p) blocks[i].push_back(atoms.id(p, {i}));
  return Decomposition(std::move(blocks), model.predicates.size());
}

std::size_t ConditionalStructure::pair_index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Pairs are listed (0,1), (0,2), ..., (1,2), ... so index arithmetically.
  const std::size_t k = y_decomp.block_count();
  return i * k - i * (i + 1) / 2 + (j - i - 1);
}

ConditionalStructure two_var_structure(const GroundModel& ground) {
  const MLNModel& model = ground.model();
  if (classify(model).kind != FragmentKind::TwoVariable)
    throw std::invalid_argument("two-variable structure needs a model in the two-variable fragment");
  const AtomTable& atoms = ground.atoms();
  const std::size_t k = model.domain_size();

  ConditionalStructure s;
  for (std::size_t p = 0; p < model.predicates.size(); ++p)
    (model.predicates[p].arity == 1 ? s.unary_predicates : s.binary_predicates).push_back(p);

  std::vector<std::vector<AtomId>> blocks(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (auto p : s.unary_predicates) blocks[i].push_back(atoms.id(p, {i}));
    for (auto q : s.binary_predicates) blocks[i].push_back(atoms.id(q, {i, i}));
  }
  s.y_decomp = Decomposition(std::move(blocks), s.unary_predicates.size() + s.binary_predicates.size());

  // Which pair each off-diagonal atom belongs to.
  std::vector<std::size_t> atom_pair(atoms.size(), ConditionalStructure::kYGroup);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      ConditionalStructure::Pair pair{i, j, {}};
      for (auto q : s.binary_predicates) pair.atoms.push_back(atoms.id(q, {i, j}));
      for (auto q : s.binary_predicates) pair.atoms.push_back(atoms.id(q, {j, i}));
      for (auto a : pair.atoms) atom_pair[a] = s.pairs.size();
      s.pairs.push_back(std::move(pair));
    }
  }

  s.factor_group.reserve(ground.factors().size());
  for (const auto& f : ground.factors()) {
    std::size_t group = ConditionalStructure::kYGroup;
    for (AtomId a : f.atoms) {
      std::size_t p = atom_pair[a];
      if (p == ConditionalStructure::kYGroup) continue;
      if (group != ConditionalStructure::kYGroup && group != p)
        throw std::logic_error("ground factor of formula " + std::to_string(f.formula + 1) +
                               " mentions atoms of two different pairs");
      group = p;
    }
    s.factor_group.push_back(group);
  }
  return s;
}

}  // namespace exlift
