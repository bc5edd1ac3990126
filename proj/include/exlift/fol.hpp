#pragma once

// Function-free first-order formulas and weighted models (MLNs).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace exlift {

struct Predicate {
  std::string name;
  int arity = 0;

  bool operator==(const Predicate&) const = default;
};

enum class Connective : std::uint8_t { Atom, Not, And, Or, Implies, Iff };

/// An atom inside a first-order formula. Arguments are logical variables,
/// referenced by their index in the owning Formula's variable list.
struct FormulaAtom {
  std::size_t predicate = 0;
  std::vector<std::size_t> args;

  bool operator==(const FormulaAtom&) const = default;
};

/// A formula tree stored as a flat node array; children always precede their
/// parent, so the root is the last node.
///
/// Variables are numbered in order of first appearance (left to right in the
/// source text). That order fixes the grounding order downstream.
class Formula {
 public:
  struct Node {
    Connective op = Connective::Atom;
    std::size_t lhs = 0;  // child node, or atom index for Connective::Atom
    std::size_t rhs = 0;

    bool operator==(const Node&) const = default;
  };

  std::size_t add_atom(FormulaAtom atom);
  std::size_t add_not(std::size_t child);
  std::size_t add_binary(Connective op, std::size_t lhs, std::size_t rhs);
  std::size_t variable_id(const std::string& name);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<FormulaAtom>& atoms() const { return atoms_; }
  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t root() const { return nodes_.size() - 1; }

  /// Truth value given a callback mapping atom index -> bool.
  template <class AtomValue>
  bool evaluate(AtomValue&& value) const {
    return eval_node(root(), value);
  }

  bool operator==(const Formula&) const = default;

 private:
  template <class AtomValue>
  bool eval_node(std::size_t id, AtomValue& value) const {
    const Node& n = nodes_[id];
    switch (n.op) {
      case Connective::Atom:
        return value(n.lhs);
      case Connective::Not:
        return !eval_node(n.lhs, value);
      case Connective::And:
        return eval_node(n.lhs, value) && eval_node(n.rhs, value);
      case Connective::Or:
        return eval_node(n.lhs, value) || eval_node(n.rhs, value);
      case Connective::Implies:
        return !eval_node(n.lhs, value) || eval_node(n.rhs, value);
      case Connective::Iff:
        return eval_node(n.lhs, value) == eval_node(n.rhs, value);
    }
    return false;
  }

  std::vector<Node> nodes_;
  std::vector<FormulaAtom> atoms_;
  std::vector<std::string> variables_;
};

struct WeightedFormula {
  double weight = 0.0;
  Formula formula;

  bool operator==(const WeightedFormula&) const = default;
};

/// A weighted first-order model over a finite, ordered domain of constants.
struct MLNModel {
  std::vector<Predicate> predicates;
  std::vector<WeightedFormula> formulas;
  std::vector<std::string> constants;

  std::size_t domain_size() const { return constants.size(); }
  /// Index of the named predicate, or npos.
  std::size_t find_predicate(const std::string& name) const;
  std::size_t find_constant(const std::string& name) const;
  std::size_t max_arity() const;

  bool operator==(const MLNModel&) const = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Same formulas, domain replaced by k auto-named constants C1..Ck.
MLNModel with_domain_size(const MLNModel& model, std::size_t k);

std::vector<std::string> numbered_constants(std::size_t k);

}  // namespace exlift
