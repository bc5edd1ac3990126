#include "exlift/fol.hpp"

#include <algorithm>

namespace exlift {

std::size_t Formula::add_atom(FormulaAtom atom) {
  atoms_.push_back(std::move(atom));
  nodes_.push_back({Connective::Atom, atoms_.size() - 1, 0});
  return nodes_.size() - 1;
}

std::size_t Formula::add_not(std::size_t child) {
  nodes_.push_back({Connective::Not, child, 0});
  return nodes_.size() - 1;
}

std::size_t Formula::add_binary(Connective op, std::size_t lhs, std::size_t rhs) {
  nodes_.push_back({op, lhs, rhs});
  return nodes_.size() - 1;
}

std::size_t Formula::variable_id(const std::string& name) {
  auto it = std::find(variables_.begin(), variables_.end(), name);
  if (it != variables_.end()) return static_cast<std::size_t>(it - variables_.begin());
  variables_.push_back(name);
  return variables_.size() - 1;
}

std::size_t MLNModel::find_predicate(const std::string& name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i].name == name) return i;
  return npos;
}

std::size_t MLNModel::find_constant(const std::string& name) const {
  for (std::size_t i = 0; i < constants.size(); ++i)
    if (constants[i] == name) return i;
  return npos;
}

std::size_t MLNModel::max_arity() const {
  std::size_t a = 0;
  for (const auto& p : predicates) a = std::max(a, static_cast<std::size_t>(p.arity));
  return a;
}

std::vector<std::string> numbered_constants(std::size_t k) {
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) out.push_back("C" + std::to_string(i));
  return out;
}

MLNModel with_domain_size(const MLNModel& model, std::size_t k) {
  MLNModel out = model;
  out.constants = numbered_constants(k);
  return out;
}

}  // namespace exlift
