#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "exlift/fol.hpp"

namespace exlift {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads the model text format:
///
///   # comment
///   domain 3            (or: constants A B C)
///   1.3  Smokes(x) => Cancer(x)
///   1.5  Smokes(x) & Friends(x,y) => Smokes(y)
///
/// Connectives by decreasing precedence: ! & | => <=>. Implication and
/// biconditional associate to the right.
MLNModel parse_model(std::string_view text);

/// Inverse of parse_model, up to whitespace and redundant parentheses.
std::string serialize_model(const MLNModel& model);

std::string formula_to_string(const MLNModel& model, const Formula& f);

}  // namespace exlift
