#include "exlift/exchange.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace exlift {

std::size_t bit_pattern_count(std::size_t width) { return std::size_t{1} << width; }

std::size_t evidence_pattern_count(std::size_t width) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < width; ++i) n *= 3;
  return n;
}

std::string bit_pattern_string(std::size_t index, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t p = 0; p < width; ++p)
    if (pattern_bit(index, width, p)) s[p] = '1';
  return s;
}

std::size_t bit_pattern_index(std::string_view pattern) {
  std::size_t idx = 0;
  for (char ch : pattern) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("bit patterns are over {0,1}");
    idx = idx * 2 + (ch == '1');
  }
  return idx;
}

std::string evidence_pattern_string(std::size_t index, std::size_t width) {
  std::string s(width, '*');
  for (std::size_t p = width; p-- > 0;) {
    s[p] = "01*"[index % 3];
    index /= 3;
  }
  return s;
}

std::size_t evidence_pattern_index(std::string_view pattern) {
  std::size_t idx = 0;
  for (char ch : pattern) {
    std::size_t digit = ch == '0' ? 0 : ch == '1' ? 1 : ch == '*' ? 2 : 3;
    if (digit == 3) throw std::invalid_argument("evidence patterns are over {0,1,*}");
    idx = idx * 3 + digit;
  }
  return idx;
}

bool patterns_compatible(std::size_t bit_index, std::size_t evidence_index, std::size_t width) {
  for (std::size_t p = width; p-- > 0;) {
    std::size_t digit = evidence_index % 3;
    evidence_index /= 3;
    if (digit != 2 && digit != ((bit_index >> (width - 1 - p)) & 1u)) return false;
  }
  return true;
}

Decomposition::Decomposition(std::vector<std::vector<AtomId>> blocks, std::size_t width)
    : blocks_(std::move(blocks)), width_(width) {
  if (width_ == 0) throw std::invalid_argument("decomposition width must be positive");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].size() != width_)
      throw std::invalid_argument("block " + std::to_string(b) + " has size " +
                                  std::to_string(blocks_[b].size()) + ", expected width " +
                                  std::to_string(width_));
    for (std::size_t p = 0; p < width_; ++p) {
      if (!index_.emplace(blocks_[b][p], Slot{b, p}).second)
        throw std::invalid_argument("atom " + std::to_string(blocks_[b][p]) + " appears in two blocks");
    }
  }
}

std::optional<Decomposition::Slot> Decomposition::locate(AtomId atom) const {
  auto it = index_.find(atom);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> block_patterns(const World& world, const Decomposition& decomp) {
  std::vector<std::uint32_t> out(decomp.block_count(), 0);
  for (std::size_t b = 0; b < decomp.block_count(); ++b) {
    std::uint32_t idx = 0;
    for (AtomId atom : decomp.block(b)) {
      if (atom >= world.size()) throw std::invalid_argument("world does not assign scope atom " + std::to_string(atom));
      idx = idx * 2 + (world[atom] ? 1 : 0);
    }
    out[b] = idx;
  }
  return out;
}

Statistic statistic_of(const World& world, const Decomposition& decomp) {
  Statistic t(bit_pattern_count(decomp.width()), 0);
  for (auto p : block_patterns(world, decomp)) ++t[p];
  return t;
}

std::vector<std::uint32_t> block_evidence_patterns(const Evidence& e, const Decomposition& decomp) {
  const std::size_t w = decomp.width();
  std::vector<std::vector<std::uint8_t>> digits(decomp.block_count(), std::vector<std::uint8_t>(w, 2));
  for (const auto& [atom, value] : e) {
    auto slot = decomp.locate(atom);
    if (!slot) throw std::invalid_argument("evidence atom " + std::to_string(atom) + " is outside the decomposition");
    digits[slot->block][slot->position] = value ? 1 : 0;
  }
  std::vector<std::uint32_t> out(decomp.block_count(), 0);
  for (std::size_t b = 0; b < out.size(); ++b) {
    std::uint32_t idx = 0;
    for (auto d : digits[b]) idx = idx * 3 + d;
    out[b] = idx;
  }
  return out;
}

EvidenceProfile evidence_profile(const Evidence& e, const Decomposition& decomp) {
  EvidenceProfile d(evidence_pattern_count(decomp.width()), 0);
  for (auto m : block_evidence_patterns(e, decomp)) ++d[m];
  return d;
}

WeakCompositions::WeakCompositions(std::uint32_t total, std::size_t parts) : current_(parts, 0) {
  if (parts == 0) throw std::invalid_argument("compositions need at least one part");
  current_.back() = total;
  last_ = total > 0 ? parts - 1 : parts;
}

void for_each_statistic(std::uint32_t k, std::size_t width, const std::function<void(const Statistic&)>& fn) {
  WeakCompositions comp(k, bit_pattern_count(width));
  do {
    fn(comp.current());
  } while (comp.next());
}

void for_each_statistic_with_first(std::uint32_t k, std::size_t width, std::uint32_t first,
                                   const std::function<void(const Statistic&)>& fn) {
  if (first > k) return;
  const std::size_t m = bit_pattern_count(width);
  Statistic t(m, 0);
  t[0] = first;
  WeakCompositions rest(k - first, m - 1);
  do {
    std::copy(rest.current().begin(), rest.current().end(), t.begin() + 1);
    fn(t);
  } while (rest.next());
}

std::vector<Statistic> enumerate_statistics(std::uint32_t k, std::size_t width) {
  std::vector<Statistic> out;
  for_each_statistic(k, width, [&](const Statistic& t) { out.push_back(t); });
  return out;
}

BigInt statistic_count(std::uint32_t k, std::size_t width) {
  const std::size_t m = bit_pattern_count(width);
  return binomial(k + m - 1, m - 1);
}

BigInt orbit_size(const Statistic& t) {
  FactorialTable f;
  return f.multinomial(t);
}

SuborbitCounter::SuborbitCounter(EvidenceProfile profile, std::size_t width)
    : profile_(std::move(profile)), width_(width) {
  const std::size_t rows = bit_pattern_count(width_);
  if (profile_.size() != evidence_pattern_count(width_))
    throw std::invalid_argument("evidence profile has the wrong length for width " + std::to_string(width_));
  for (std::size_t j = 0; j < profile_.size(); ++j) {
    if (profile_[j] == 0) continue;
    Column col{j, profile_[j], {}};
    for (std::size_t i = 0; i < rows; ++i)
      if (patterns_compatible(i, j, width_)) col.rows.push_back(i);
    columns_.push_back(std::move(col));
  }
  // reach_[c][i]: row i is compatible with some column at index >= c.
  reach_.assign(columns_.size() + 1, std::vector<bool>(rows, false));
  for (std::size_t c = columns_.size(); c-- > 0;) {
    reach_[c] = reach_[c + 1];
    for (auto i : columns_[c].rows) reach_[c][i] = true;
  }
  matrix_.rows = rows;
  matrix_.cols = profile_.size();
  matrix_.cells.assign(rows * matrix_.cols, 0);
  for (const auto& col : columns_) capacity_.emplace_back(col.rows.size() + 1, 0);
  factorials_.reserve(std::accumulate(profile_.begin(), profile_.end(), std::size_t{0}));
}

template <class Leaf>
bool SuborbitCounter::walk(std::size_t col, Leaf& leaf) {
  if (col == columns_.size()) return leaf();
  for (std::size_t i = 0; i < residual_.size(); ++i)
    if (residual_[i] != 0 && !reach_[col][i]) return true;  // row can no longer be filled
  // Rows after the current one keep their residuals while this column is
  // filled, so suffix capacities are fixed for the whole column.
  const auto& rows = columns_[col].rows;
  auto& cap = capacity_[col];
  for (std::size_t p = rows.size(); p-- > 0;) cap[p] = cap[p + 1] + residual_[rows[p]];
  return walk_column(col, 0, columns_[col].demand, leaf);
}

template <class Leaf>
bool SuborbitCounter::walk_column(std::size_t col, std::size_t row_pos, std::uint32_t remaining, Leaf& leaf) {
  const Column& column = columns_[col];
  if (row_pos == column.rows.size()) {
    if (remaining != 0) return true;
    return walk(col + 1, leaf);
  }
  const std::size_t i = column.rows[row_pos];
  const std::uint32_t capacity_after = capacity_[col][row_pos + 1];

  // A row no later column can reach must be emptied here.
  const bool forced = !reach_[col + 1][i];
  std::uint32_t lo = forced ? residual_[i] : 0;
  std::uint32_t hi = forced ? residual_[i] : std::min(remaining, residual_[i]);
  if (remaining > capacity_after) lo = std::max(lo, remaining - capacity_after);
  if (lo > hi) return true;

  std::uint32_t& cell = matrix_.cells[i * matrix_.cols + column.pattern];
  for (std::uint32_t a = lo; a <= hi; ++a) {
    cell = a;
    residual_[i] -= a;
    bool keep_going = walk_column(col, row_pos + 1, remaining - a, leaf);
    residual_[i] += a;
    cell = 0;
    if (!keep_going) return false;
  }
  return true;
}

BigInt SuborbitCounter::count(const Statistic& t) {
  BigInt total(0);
  enumerate_raw(t, [&]() {
    BigInt g(1);
    std::vector<std::uint32_t>& parts = parts_;
    for (const auto& column : columns_) {
      parts.clear();
      for (auto i : column.rows) parts.push_back(matrix_.cells[i * matrix_.cols + column.pattern]);
      factorials_.multiply_multinomial(g, parts);
    }
    total += g;
    return true;
  });
  return total;
}

void SuborbitCounter::enumerate(const Statistic& t, const std::function<bool(const CompletionMatrix&)>& fn) {
  enumerate_raw(t, [&]() { return fn(matrix_); });
}

std::optional<CompletionMatrix> SuborbitCounter::first_matrix(const Statistic& t) {
  std::optional<CompletionMatrix> out;
  enumerate_raw(t, [&]() {
    out = matrix_;
    return false;
  });
  return out;
}

bool SuborbitCounter::feasible(const Statistic& t) {
  bool found = false;
  enumerate_raw(t, [&]() {
    found = true;
    return false;
  });
  return found;
}

template <class Leaf>
void SuborbitCounter::enumerate_raw(const Statistic& t, Leaf leaf) {
  if (t.size() != matrix_.rows) throw std::invalid_argument("statistic has the wrong length for the width");
  std::uint64_t sum_t = std::accumulate(t.begin(), t.end(), std::uint64_t{0});
  std::uint64_t sum_d = std::accumulate(profile_.begin(), profile_.end(), std::uint64_t{0});
  if (sum_t != sum_d) return;
  residual_ = t;
  walk(0, leaf);  // cells are zero again once the walk returns
}

std::vector<CompletionMatrix> enumerate_completion_matrices(const Statistic& t, const EvidenceProfile& d,
                                                            std::size_t width) {
  std::vector<CompletionMatrix> out;
  SuborbitCounter counter(d, width);
  counter.enumerate(t, [&](const CompletionMatrix& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

BigInt gamma_size(const CompletionMatrix& a, const EvidenceProfile& d) {
  FactorialTable f;
  BigInt g(1);
  std::vector<std::uint32_t> parts(a.rows);
  for (std::size_t j = 0; j < a.cols; ++j) {
    if (d[j] == 0) continue;
    for (std::size_t i = 0; i < a.rows; ++i) parts[i] = a.at(i, j);
    f.multiply_multinomial(g, parts);
  }
  return g;
}

BigInt suborbit_size(const Statistic& t, const Evidence& e, const Decomposition& decomp) {
  SuborbitCounter counter(evidence_profile(e, decomp), decomp.width());
  return counter.count(t);
}

std::vector<std::uint32_t> completion_patterns(const CompletionMatrix& a,
                                               std::span<const std::uint32_t> block_evidence) {
  // Per column, a cursor over bit patterns with their remaining counts.
  std::vector<std::size_t> next_row(a.cols, 0);
  std::vector<std::uint32_t> used(a.rows * a.cols, 0);
  std::vector<std::uint32_t> out(block_evidence.size(), 0);
  for (std::size_t b = 0; b < block_evidence.size(); ++b) {
    const std::size_t j = block_evidence[b];
    std::size_t& i = next_row[j];
    while (i < a.rows && used[i * a.cols + j] == a.at(i, j)) ++i;
    if (i == a.rows) throw std::invalid_argument("completion matrix does not match the evidence");
    ++used[i * a.cols + j];
    out[b] = static_cast<std::uint32_t>(i);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> representative(const Statistic& t, const Evidence& e,
                                                        const Decomposition& decomp) {
  auto block_evidence = block_evidence_patterns(e, decomp);
  EvidenceProfile d(evidence_pattern_count(decomp.width()), 0);
  for (auto m : block_evidence) ++d[m];
  SuborbitCounter counter(d, decomp.width());
  auto a = counter.first_matrix(t);
  if (!a) return std::nullopt;
  return scope_bits(completion_patterns(*a, block_evidence), decomp.width());
}

std::vector<std::uint32_t> canonical_patterns(const Statistic& t) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.insert(out.end(), t[i], static_cast<std::uint32_t>(i));
  return out;
}

std::vector<std::uint8_t> scope_bits(std::span<const std::uint32_t> patterns, std::size_t width) {
  std::vector<std::uint8_t> bits;
  bits.reserve(patterns.size() * width);
  for (auto p : patterns)
    for (std::size_t pos = 0; pos < width; ++pos) bits.push_back(pattern_bit(p, width, pos) ? 1 : 0);
  return bits;
}

void write_patterns(const Decomposition& decomp, std::span<const std::uint32_t> patterns, World& world) {
  const std::size_t w = decomp.width();
  for (std::size_t b = 0; b < patterns.size(); ++b)
    for (std::size_t pos = 0; pos < w; ++pos) world.set(decomp.block(b)[pos], pattern_bit(patterns[b], w, pos));
}

}  // namespace exlift
