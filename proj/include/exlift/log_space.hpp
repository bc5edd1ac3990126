#pragma once

#include <cmath>
#include <limits>

namespace exlift {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Streaming max-shifted log-sum-exp. Holds (max, sum of exp(x - max)).
/// Merging two accumulators in a fixed order gives a fixed result, which is
/// what makes chunked parallel reductions reproducible.
class LogSumExp {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x > max_) {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    } else {
      sum_ += std::exp(x - max_);
    }
  }

  void merge(const LogSumExp& other) {
    if (other.max_ == kNegInf) return;
    if (other.max_ > max_) {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    } else {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    }
  }

  bool empty() const { return max_ == kNegInf; }
  double value() const { return empty() ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace exlift
