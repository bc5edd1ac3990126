#include "exlift/ground.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>

#include "exlift/parser.hpp"

namespace exlift {

namespace {

constexpr std::size_t kMaxTableAtoms = 10;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Odometer over variable bindings; the first variable is most significant.
bool next_binding(std::vector<std::size_t>& binding, std::size_t k) {
  for (std::size_t pos = binding.size(); pos-- > 0;) {
    if (++binding[pos] < k) return true;
    binding[pos] = 0;
  }
  return false;
}

}  // namespace

AtomTable::AtomTable(std::vector<Predicate> predicates, std::vector<std::string> constants)
    : predicates_(std::move(predicates)), constants_(std::move(constants)) {
  const std::size_t k = constants_.size();
  offsets_.reserve(predicates_.size() + 1);
  std::size_t total = 0;
  for (const auto& p : predicates_) {
    offsets_.push_back(total);
    std::size_t count = 1;
    for (int a = 0; a < p.arity; ++a) {
      if (k != 0 && count > (std::size_t{1} << 31) / k)
        throw std::length_error("too many ground atoms for predicate " + p.name);
      count *= k;
    }
    total += count;
  }
  offsets_.push_back(total);
  if (total > std::numeric_limits<AtomId>::max()) throw std::length_error("too many ground atoms");
  size_ = total;
}

AtomId AtomTable::id(std::size_t predicate, std::span<const std::size_t> args) const {
  const std::size_t k = constants_.size();
  std::size_t local = 0;
  for (std::size_t a : args) local = local * k + a;
  return static_cast<AtomId>(offsets_[predicate] + local);
}

GroundAtom AtomTable::atom(AtomId id) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), static_cast<std::size_t>(id));
  GroundAtom out;
  out.predicate = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  std::size_t local = id - offsets_[out.predicate];
  const std::size_t k = constants_.size();
  out.args.resize(static_cast<std::size_t>(predicates_[out.predicate].arity));
  for (std::size_t a = out.args.size(); a-- > 0;) {
    out.args[a] = local % k;
    local /= k;
  }
  return out;
}

std::string AtomTable::name(AtomId id) const {
  GroundAtom a = atom(id);
  std::string s = predicates_[a.predicate].name + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += constants_[a.args[i]];
  }
  return s + ")";
}

AtomId AtomTable::parse(std::string_view text) const {
  text = trim(text);
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw std::invalid_argument("malformed ground atom '" + std::string(text) + "'");
  std::string pred(trim(text.substr(0, open)));
  auto pit = std::find_if(predicates_.begin(), predicates_.end(),
                          [&](const Predicate& p) { return p.name == pred; });
  if (pit == predicates_.end()) throw std::invalid_argument("unknown predicate '" + pred + "'");
  std::vector<std::size_t> args;
  std::string_view rest = text.substr(open + 1, text.size() - open - 2);
  while (true) {
    auto comma = rest.find(',');
    std::string c(trim(rest.substr(0, comma)));
    auto cit = std::find(constants_.begin(), constants_.end(), c);
    if (cit == constants_.end()) throw std::invalid_argument("unknown constant '" + c + "'");
    args.push_back(static_cast<std::size_t>(cit - constants_.begin()));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (static_cast<int>(args.size()) != pit->arity)
    throw std::invalid_argument("wrong number of arguments for '" + pred + "'");
  return id(static_cast<std::size_t>(pit - predicates_.begin()), args);
}

GroundModel::GroundModel(MLNModel model)
    : model_(std::make_shared<const MLNModel>(std::move(model))),
      atoms_(model_->predicates, model_->constants) {
  const std::size_t k = model_->domain_size();
  for (std::size_t fi = 0; fi < model_->formulas.size(); ++fi) {
    const auto& wf = model_->formulas[fi];
    const Formula& f = wf.formula;
    const std::size_t v = f.variable_count();
    std::vector<std::size_t> binding(v, 0);
    do {
      GroundFactor g;
      g.weight = wf.weight;
      g.formula = fi;
      g.binding = binding;
      std::vector<std::size_t> args;
      for (const auto& a : f.atoms()) {
        args.clear();
        for (std::size_t var : a.args) args.push_back(binding[var]);
        g.slots.push_back(atoms_.id(a.predicate, args));
      }
      g.atoms = g.slots;
      std::sort(g.atoms.begin(), g.atoms.end());
      g.atoms.erase(std::unique(g.atoms.begin(), g.atoms.end()), g.atoms.end());
      if (g.atoms.size() <= kMaxTableAtoms) {
        g.table.resize(std::size_t{1} << g.atoms.size());
        for (std::size_t idx = 0; idx < g.table.size(); ++idx) {
          g.table[idx] = f.evaluate([&](std::size_t slot) {
            auto pos = std::lower_bound(g.atoms.begin(), g.atoms.end(), g.slots[slot]) - g.atoms.begin();
            return ((idx >> pos) & 1u) != 0;
          });
        }
      }
      factors_.push_back(std::move(g));
    } while (next_binding(binding, k));
    formula_end_.push_back(factors_.size());
  }
}

// w . n(x): satisfied groundings are counted per formula, then weighted, so
// the result does not depend on the order factors are visited in.
template <class AtomValue>
double GroundModel::weighted_counts(AtomValue&& value) const {
  double sum = 0.0;
  std::size_t begin = 0;
  for (std::size_t fi = 0; fi < formula_end_.size(); ++fi) {
    std::uint64_t n = 0;
    for (std::size_t i = begin; i < formula_end_[fi]; ++i) n += satisfied(factors_[i], value) ? 1 : 0;
    if (n != 0) sum += model_->formulas[fi].weight * static_cast<double>(n);
    begin = formula_end_[fi];
  }
  return sum;
}

double GroundModel::log_weight(const World& world) const {
  return weighted_counts([&](AtomId a) { return world[a]; });
}

double GroundModel::log_weight_bits(std::uint64_t bits) const {
  return weighted_counts([&](AtomId a) { return ((bits >> a) & 1u) != 0; });
}

GroundModel ground(const MLNModel& model) { return GroundModel(model); }

bool eval_formula(const GroundModel& model, const GroundFactor& factor, const World& world) {
  for (AtomId a : factor.atoms)
    if (a >= world.size()) throw std::invalid_argument("world does not assign atom " + std::to_string(a));
  return model.satisfied(factor, [&](AtomId a) { return world[a]; });
}

bool eval_formula(const GroundModel& model, const GroundFactor& factor, const Evidence& partial) {
  for (AtomId a : factor.atoms)
    if (!partial.contains(a))
      throw std::invalid_argument("unassigned atom " + model.atoms().name(a));
  return model.satisfied(factor, [&](AtomId a) { return *partial.find(a); });
}

double log_weight(const GroundModel& model, const World& world) { return model.log_weight(world); }

namespace {

void assign_atom(Evidence& e, std::string_view lhs, std::string_view rhs, const AtomTable& atoms,
                 std::size_t line) {
  rhs = trim(rhs);
  if (rhs != "0" && rhs != "1")
    throw ParseError("expected 0 or 1 after '='", line, 1);
  AtomId id = 0;
  try {
    id = atoms.parse(lhs);
  } catch (const std::invalid_argument& ex) {
    throw ParseError(ex.what(), line, 1);
  }
  try {
    e.assign(id, rhs == "1");
  } catch (const std::invalid_argument&) {
    throw ParseError("atom " + atoms.name(id) + " assigned twice", line, 1);
  }
}

}  // namespace

Evidence parse_evidence(std::string_view text, const AtomTable& atoms) {
  Evidence e;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'Atom = 0|1'", line_no, 1);
    assign_atom(e, line.substr(0, eq), line.substr(eq + 1), atoms, line_no);
  }
  return e;
}

Evidence parse_query(std::string_view text, const AtomTable& atoms) {
  Evidence e;
  // Commas also separate atom arguments, so split on "=0"/"=1" terms instead.
  std::size_t pos = 0;
  text = trim(text);
  while (pos < text.size()) {
    auto eq = text.find('=', pos);
    if (eq == std::string_view::npos) throw ParseError("expected 'Atom=0|1'", 1, pos + 1);
    std::size_t val = eq + 1;
    while (val < text.size() && std::isspace(static_cast<unsigned char>(text[val]))) ++val;
    if (val >= text.size()) throw ParseError("missing value after '='", 1, eq + 1);
    assign_atom(e, text.substr(pos, eq - pos), text.substr(val, 1), atoms, 1);
    pos = val + 1;
    while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ','))
      ++pos;
  }
  return e;
}

}  // namespace exlift
