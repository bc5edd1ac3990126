#include "exlift/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace exlift {

double log_of(const BigInt& value) {
  if (sgn(value) == 0) return -std::numeric_limits<double>::infinity();
  long exponent = 0;
  double mantissa = mpz_get_d_2exp(&exponent, value.get_mpz_t());
  return std::log(mantissa) + static_cast<double>(exponent) * std::log(2.0);
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  BigInt out;
  if (k > n) return out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

FactorialTable::FactorialTable(std::size_t limit) { reserve(limit); }

void FactorialTable::reserve(std::size_t limit) {
  if (table_.empty()) table_.emplace_back(1);
  while (table_.size() <= limit) table_.push_back(table_.back() * static_cast<unsigned long>(table_.size()));
}

const BigInt& FactorialTable::factorial(std::size_t n) {
  reserve(n);
  return table_[n];
}

BigInt FactorialTable::multinomial(std::span<const std::uint32_t> counts) {
  BigInt out(1);
  multiply_multinomial(out, counts);
  return out;
}

void FactorialTable::multiply_multinomial(BigInt& acc, std::span<const std::uint32_t> counts) {
  std::size_t total = 0;
  std::uint32_t largest = 0;
  for (auto c : counts) {
    total += c;
    largest = std::max(largest, c);
  }
  if (largest == total) return;  // a single non-zero part
  reserve(total);
  scratch_ = table_[total];
  for (auto c : counts)
    if (c > 1) mpz_divexact(scratch_.get_mpz_t(), scratch_.get_mpz_t(), table_[c].get_mpz_t());
  acc *= scratch_;
}

}  // namespace exlift
