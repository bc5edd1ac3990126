#include "exlift/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace exlift {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Recursive-descent parser for one formula line.
class FormulaParser {
 public:
  FormulaParser(std::string_view text, std::size_t line, std::size_t offset, MLNModel& model)
      : text_(text), line_(line), offset_(offset), model_(model) {}

  Formula parse() {
    parse_iff();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(formula_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, offset_ + pos_ + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  std::size_t parse_iff() {
    std::size_t lhs = parse_implies();
    if (accept("<=>")) {
      std::size_t rhs = parse_iff();
      return formula_.add_binary(Connective::Iff, lhs, rhs);
    }
    return lhs;
  }

  std::size_t parse_implies() {
    std::size_t lhs = parse_or();
    if (accept("=>")) {
      std::size_t rhs = parse_implies();
      return formula_.add_binary(Connective::Implies, lhs, rhs);
    }
    return lhs;
  }

  std::size_t parse_or() {
    std::size_t lhs = parse_and();
    while (accept("|")) lhs = formula_.add_binary(Connective::Or, lhs, parse_and());
    return lhs;
  }

  std::size_t parse_and() {
    std::size_t lhs = parse_unary();
    while (accept("&")) lhs = formula_.add_binary(Connective::And, lhs, parse_unary());
    return lhs;
  }

  std::size_t parse_unary() {
    if (accept("!")) return formula_.add_not(parse_unary());
    if (accept("(")) {
      std::size_t inner = parse_iff();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    return parse_atom();
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::size_t parse_atom() {
    skip_space();
    std::size_t start = pos_;
    if (pos_ >= text_.size()) fail("expected an atom");
    if (!std::isupper(static_cast<unsigned char>(text_[pos_]))) {
      if (std::islower(static_cast<unsigned char>(text_[pos_])))
        fail("predicate names must start with an upper-case letter");
      fail("expected an atom");
    }
    std::string name = identifier();
    if (!accept("(")) fail("expected '(' after predicate " + name);
    FormulaAtom atom;
    do {
      skip_space();
      std::size_t arg_pos = pos_;
      std::string arg = identifier();
      if (arg.empty()) fail("expected a logical variable");
      if (!std::islower(static_cast<unsigned char>(arg[0]))) {
        pos_ = arg_pos;
        fail("constant '" + arg + "' in formula; formulas may only use logical variables");
      }
      atom.args.push_back(formula_.variable_id(arg));
    } while (accept(","));
    if (!accept(")")) fail("expected ')' closing atom " + name);

    std::size_t pred = model_.find_predicate(name);
    const int arity = static_cast<int>(atom.args.size());
    if (pred == MLNModel::npos) {
      model_.predicates.push_back({name, arity});
      pred = model_.predicates.size() - 1;
    } else if (model_.predicates[pred].arity != arity) {
      pos_ = start;
      fail("predicate " + name + " used with arity " + std::to_string(arity) + ", declared with " +
           std::to_string(model_.predicates[pred].arity));
    }
    atom.predicate = pred;
    return formula_.add_atom(std::move(atom));
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
  MLNModel& model_;
  Formula formula_;
};

std::vector<std::pair<std::string, std::size_t>> split_words(std::string_view s) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(std::string(s.substr(start, i - start)), start);
  }
  return out;
}

}  // namespace

MLNModel parse_model(std::string_view text) {
  MLNModel model;
  bool have_domain = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto words = split_words(line);
    if (words.empty()) continue;

    const std::string& head = words[0].first;
    if (head == "domain" || head == "constants") {
      if (have_domain) throw ParseError("duplicate domain declaration", line_no, words[0].second + 1);
      have_domain = true;
      if (head == "domain") {
        if (words.size() != 2) throw ParseError("expected 'domain <k>'", line_no, words[0].second + 1);
        const std::string& num = words[1].first;
        std::size_t k = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
        if (ec != std::errc() || ptr != num.data() + num.size() || k == 0)
          throw ParseError("domain size must be a positive integer", line_no, words[1].second + 1);
        model.constants = numbered_constants(k);
      } else {
        if (words.size() < 2)
          throw ParseError("'constants' needs at least one constant", line_no, words[0].second + 1);
        std::set<std::string> seen;
        for (std::size_t i = 1; i < words.size(); ++i) {
          const auto& [name, col] = words[i];
          bool ok = std::all_of(name.begin(), name.end(), is_ident_char);
          if (!ok) throw ParseError("invalid constant name '" + name + "'", line_no, col + 1);
          if (!seen.insert(name).second)
            throw ParseError("duplicate constant '" + name + "'", line_no, col + 1);
          model.constants.push_back(name);
        }
      }
      continue;
    }

    // <weight><whitespace><formula>
    const std::string& wtok = words[0].first;
    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(wtok.data(), wtok.data() + wtok.size(), weight);
    if (ec != std::errc() || ptr != wtok.data() + wtok.size())
      throw ParseError("expected a weight, got '" + wtok + "'", line_no, words[0].second + 1);
    if (!std::isfinite(weight))
      throw ParseError("weights must be finite", line_no, words[0].second + 1);
    std::size_t body_start = words[0].second + wtok.size();
    FormulaParser fp(line.substr(body_start), line_no, body_start, model);
    model.formulas.push_back({weight, fp.parse()});
  }
  if (!have_domain) throw ParseError("undeclared domain: expected 'domain <k>' or 'constants ...'", line_no, 1);
  return model;
}

namespace {

void print_node(const MLNModel& model, const Formula& f, std::size_t id, bool top,
                std::ostringstream& os) {
  const auto& n = f.nodes()[id];
  switch (n.op) {
    case Connective::Atom: {
      const auto& atom = f.atoms()[n.lhs];
      os << model.predicates[atom.predicate].name << '(';
      for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i) os << ',';
        os << f.variables()[atom.args[i]];
      }
      os << ')';
      return;
    }
    case Connective::Not:
      os << '!';
      print_node(model, f, n.lhs, false, os);
      return;
    default:
      break;
  }
  const char* op = n.op == Connective::And       ? " & "
                   : n.op == Connective::Or      ? " | "
                   : n.op == Connective::Implies ? " => "
                                                 : " <=> ";
  if (!top) os << '(';
  print_node(model, f, n.lhs, false, os);
  os << op;
  print_node(model, f, n.rhs, false, os);
  if (!top) os << ')';
}

}  // namespace

std::string formula_to_string(const MLNModel& model, const Formula& f) {
  std::ostringstream os;
  print_node(model, f, f.root(), true, os);
  return os.str();
}

std::string serialize_model(const MLNModel& model) {
  std::ostringstream os;
  if (model.constants == numbered_constants(model.domain_size())) {
    os << "domain " << model.domain_size() << '\n';
  } else {
    os << "constants";
    for (const auto& c : model.constants) os << ' ' << c;
    os << '\n';
  }
  char buf[64];
  for (const auto& wf : model.formulas) {
    std::snprintf(buf, sizeof buf, "%.17g", wf.weight);
    os << buf << '\t' << formula_to_string(model, wf.formula) << '\n';
  }
  return os.str();
}

}  // namespace exlift
