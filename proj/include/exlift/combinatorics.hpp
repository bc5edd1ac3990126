#pragma once

// Exact counting with arbitrary-precision integers (GMP).

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace exlift {

using BigInt = mpz_class;

/// Natural log of a non-negative integer, converted once from the exact
/// value. Returns -inf for zero.
double log_of(const BigInt& value);

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Caches n! for 0..limit so multinomials reduce to one exact division.
class FactorialTable {
 public:
  explicit FactorialTable(std::size_t limit = 0);

  void reserve(std::size_t limit);
  const BigInt& factorial(std::size_t n);

  /// (sum counts)! / prod(counts!)
  BigInt multinomial(std::span<const std::uint32_t> counts);
  /// Multiplies `acc` by multinomial(counts) in place.
  void multiply_multinomial(BigInt& acc, std::span<const std::uint32_t> counts);

 private:
  std::vector<BigInt> table_;
  BigInt scratch_;
};

}  // namespace exlift
