#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "exlift/fol.hpp"
#include "exlift/parser.hpp"

namespace support {

inline const char* kFriendsSmokers =
    "constants A B\n"
    "1.3 Smokes(x) => Cancer(x)\n"
    "1.5 Smokes(x) & Friends(x,y) => Smokes(y)\n";

inline exlift::MLNModel friends_smokers(std::size_t k) {
  return exlift::with_domain_size(exlift::parse_model(kFriendsSmokers), k);
}

inline double rel_error(double value, double reference) {
  const double d = std::fabs(value - reference);
  return reference == 0.0 ? d : d / std::fabs(reference);
}

inline std::string write_temp(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "exlift_tests";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

// Random formula text over the given atoms, joined by random connectives.
inline std::string random_formula(std::mt19937_64& rng, std::vector<std::string> atoms) {
  std::shuffle(atoms.begin(), atoms.end(), rng);
  static const char* ops[] = {" & ", " | ", " => ", " <=> "};
  std::uniform_int_distribution<int> op(0, 3), coin(0, 1);
  std::string text;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::string a = (coin(rng) ? "!" : "") + atoms[i];
    text = i == 0 ? a : "(" + text + ")" + ops[op(rng)] + a;
  }
  return text;
}

// Monadic model with up to `max_preds` predicates, `max_formulas` formulas
// and `max_vars` logical variables per formula; weights in [-2, 2].
inline exlift::MLNModel random_monadic(std::mt19937_64& rng, std::size_t k, std::size_t max_preds = 3,
                                       std::size_t max_formulas = 3, std::size_t max_vars = 3) {
  std::uniform_int_distribution<std::size_t> preds_d(1, max_preds), formulas_d(1, max_formulas),
      vars_d(1, max_vars), extra_d(0, 2);
  std::uniform_real_distribution<double> weight_d(-2.0, 2.0);
  const std::size_t preds = preds_d(rng);
  std::string text = "domain " + std::to_string(k) + "\n";
  // Mention every predicate at least once so the width is `preds`.
  const std::size_t formulas = std::max(formulas_d(rng), std::size_t{1});
  for (std::size_t f = 0; f < formulas; ++f) {
    const std::size_t vars = vars_d(rng);
    std::vector<std::string> atoms;
    std::uniform_int_distribution<std::size_t> pick_pred(0, preds - 1), pick_var(0, vars - 1);
    for (std::size_t v = 0; v < vars; ++v)
      atoms.push_back("P" + std::to_string(pick_pred(rng)) + "(" + std::string(1, char('x' + v)) + ")");
    for (std::size_t e = extra_d(rng); e > 0; --e)
      atoms.push_back("P" + std::to_string(pick_pred(rng)) + "(" + std::string(1, char('x' + pick_var(rng))) + ")");
    if (f + 1 == formulas)
      for (std::size_t p = 0; p < preds; ++p) atoms.push_back("P" + std::to_string(p) + "(x)");
    char w[32];
    std::snprintf(w, sizeof w, "%.6f", weight_d(rng));
    text += std::string(w) + " " + random_formula(rng, atoms) + "\n";
  }
  return exlift::parse_model(text);
}

}  // namespace support
