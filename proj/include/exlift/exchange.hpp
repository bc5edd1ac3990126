#pragma once

// Sufficient statistics of exchangeable decompositions and exact orbit /
// suborbit counting.
//
// Bit patterns b in {0,1}^w are indexed lexicographically with position 0 the
// most significant digit, so index 0 is all zeros. Evidence patterns
// m in {0,1,*}^w are indexed the same way in base 3 with digits 0 < 1 < *.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exlift/combinatorics.hpp"
#include "exlift/world.hpp"

namespace exlift {

/// Counts c_i of blocks taking bit pattern i; sums to the block count k.
using Statistic = std::vector<std::uint32_t>;
/// Counts d_j of blocks whose evidence projection has pattern j.
using EvidenceProfile = std::vector<std::uint32_t>;

std::size_t bit_pattern_count(std::size_t width);
std::size_t evidence_pattern_count(std::size_t width);
std::string bit_pattern_string(std::size_t index, std::size_t width);
std::size_t bit_pattern_index(std::string_view pattern);
std::string evidence_pattern_string(std::size_t index, std::size_t width);
std::size_t evidence_pattern_index(std::string_view pattern);
/// Value at `pos` of bit pattern `index`.
inline bool pattern_bit(std::size_t index, std::size_t width, std::size_t pos) {
  return ((index >> (width - 1 - pos)) & 1u) != 0;
}
/// b ~ m: b agrees with m at every non-* position.
bool patterns_compatible(std::size_t bit_index, std::size_t evidence_index, std::size_t width);

/// k disjoint, equal-width blocks of atoms. Position p plays the same role in
/// every block.
class Decomposition {
 public:
  Decomposition() = default;
  /// Throws std::invalid_argument on overlapping or ragged blocks.
  Decomposition(std::vector<std::vector<AtomId>> blocks, std::size_t width);

  std::size_t block_count() const { return blocks_.size(); }
  std::size_t width() const { return width_; }
  std::size_t scope_size() const { return blocks_.size() * width_; }
  const std::vector<std::vector<AtomId>>& blocks() const { return blocks_; }
  const std::vector<AtomId>& block(std::size_t i) const { return blocks_[i]; }

  struct Slot {
    std::size_t block;
    std::size_t position;
  };
  std::optional<Slot> locate(AtomId atom) const;
  bool in_scope(AtomId atom) const { return index_.count(atom) != 0; }

 private:
  std::vector<std::vector<AtomId>> blocks_;
  std::size_t width_ = 0;
  std::unordered_map<AtomId, Slot> index_;
};

/// Bit pattern of each block under `world`.
std::vector<std::uint32_t> block_patterns(const World& world, const Decomposition& decomp);
Statistic statistic_of(const World& world, const Decomposition& decomp);
/// Evidence pattern of each block (unassigned positions are *). Throws
/// std::invalid_argument for evidence outside the decomposition's scope.
std::vector<std::uint32_t> block_evidence_patterns(const Evidence& e, const Decomposition& decomp);
EvidenceProfile evidence_profile(const Evidence& e, const Decomposition& decomp);

/// Weak compositions of `total` into `parts` non-negative integers, in
/// lexicographic order starting from (0,...,0,total).
class WeakCompositions {
 public:
  WeakCompositions(std::uint32_t total, std::size_t parts);
  const std::vector<std::uint32_t>& current() const { return current_; }
  // Successor of (..., a, v, 0, ..., 0), v the last nonzero part, is
  // (..., a + 1, 0, ..., 0, v - 1): O(1) per step.
  bool next() {
    const std::size_t n = current_.size();
    if (last_ == 0 || last_ == n) return false;
    const std::uint32_t v = current_[last_];
    current_[last_] = 0;
    ++current_[last_ - 1];
    current_[n - 1] = v - 1;
    last_ = v > 1 ? n - 1 : last_ - 1;
    return true;
  }

 private:
  std::vector<std::uint32_t> current_;
  std::size_t last_;  // index of the last nonzero part; size() when all zero
};

/// Calls fn(t) for every statistic over k blocks of width w, lexicographically.
void for_each_statistic(std::uint32_t k, std::size_t width,
                        const std::function<void(const Statistic&)>& fn);
/// Inlined form of for_each_statistic for hot loops.
template <class Fn>
void visit_statistics(std::uint32_t k, std::size_t width, Fn&& fn) {
  WeakCompositions comp(k, std::size_t{1} << width);
  do {
    fn(comp.current());
  } while (comp.next());
}
/// Only the statistics with c_0 == first (one chunk of the full stream).
void for_each_statistic_with_first(std::uint32_t k, std::size_t width, std::uint32_t first,
                                   const std::function<void(const Statistic&)>& fn);
std::vector<Statistic> enumerate_statistics(std::uint32_t k, std::size_t width);
/// C(k + 2^w - 1, 2^w - 1).
BigInt statistic_count(std::uint32_t k, std::size_t width);

/// |S_t| = k! / prod c_i!
BigInt orbit_size(const Statistic& t);

/// 2^w x 3^w non-negative matrix with row sums c, column sums d, and zeros on
/// incompatible (b_i, m_j) cells.
struct CompletionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> cells;  // row-major

  std::uint32_t at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
  bool operator==(const CompletionMatrix&) const = default;
};

/// Enumerates completion matrices for a fixed evidence profile, and counts
/// and constructs suborbit members from them. Reusable across statistics;
/// not thread-safe (keeps scratch state).
class SuborbitCounter {
 public:
  SuborbitCounter(EvidenceProfile profile, std::size_t width);

  const EvidenceProfile& profile() const { return profile_; }
  std::size_t width() const { return width_; }

  /// |S_{t,e}| = sum over completion matrices A of |gamma(A)|.
  BigInt count(const Statistic& t);
  /// Calls fn for each matrix. Returning false from fn stops the walk.
  void enumerate(const Statistic& t, const std::function<bool(const CompletionMatrix&)>& fn);
  /// The first enumerated matrix, if any.
  std::optional<CompletionMatrix> first_matrix(const Statistic& t);
  /// |S_{t,e}| > 0, without building the matrix.
  bool feasible(const Statistic& t);

 private:
  struct Column {
    std::size_t pattern;
    std::uint32_t demand;
    std::vector<std::size_t> rows;  // compatible bit patterns, ascending
  };

  template <class Leaf>
  void enumerate_raw(const Statistic& t, Leaf leaf);
  template <class Leaf>
  bool walk(std::size_t col, Leaf& leaf);
  template <class Leaf>
  bool walk_column(std::size_t col, std::size_t row_pos, std::uint32_t remaining, Leaf& leaf);

  EvidenceProfile profile_;
  std::size_t width_;
  std::vector<Column> columns_;
  std::vector<std::vector<bool>> reach_;
  std::vector<std::uint32_t> residual_;
  std::vector<std::vector<std::uint32_t>> capacity_;  // per column: residual summed over rows[p..]
  std::vector<std::uint32_t> parts_;
  CompletionMatrix matrix_;
  FactorialTable factorials_;
};

std::vector<CompletionMatrix> enumerate_completion_matrices(const Statistic& t, const EvidenceProfile& d,
                                                            std::size_t width);
/// prod_j multinomial(d_j; a_{1,j}, ..., a_{2^w,j})
BigInt gamma_size(const CompletionMatrix& a, const EvidenceProfile& d);
BigInt suborbit_size(const Statistic& t, const Evidence& e, const Decomposition& decomp);

/// Block patterns of a world with statistic t compatible with the given
/// per-block evidence patterns, built from `a`: within each evidence-pattern
/// column the blocks, in block order, take bit patterns in ascending order.
std::vector<std::uint32_t> completion_patterns(const CompletionMatrix& a,
                                               std::span<const std::uint32_t> block_evidence);

/// A scope assignment (block-major bits, block 0 position 0 first) with
/// statistic t that agrees with e, or nullopt when S_{t,e} is empty.
std::optional<std::vector<std::uint8_t>> representative(const Statistic& t, const Evidence& e,
                                                        const Decomposition& decomp);

/// Canonical member of S_t: block order follows ascending bit pattern.
std::vector<std::uint32_t> canonical_patterns(const Statistic& t);

/// Block-major bits for the given block patterns.
std::vector<std::uint8_t> scope_bits(std::span<const std::uint32_t> patterns, std::size_t width);
/// Writes block patterns into the decomposition's atoms of `world`.
void write_patterns(const Decomposition& decomp, std::span<const std::uint32_t> patterns, World& world);

}  // namespace exlift
