#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace belgrad {

/// Neumaier's variant of Kahan summation: also compensates when the
/// incoming term is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
      compensation_ += (sum_ - t) + value;
    else
      compensation_ += (value - t) + sum_;
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) {
    add(value);
    return *this;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// A Monte Carlo result. stderr is the sample standard deviation over sqrt(n).
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;

  double stderr() const { return stderr_; }
};

/// Mean and standard error of samples, reduced in index order with
/// compensated summation (two-pass variance).
Estimate estimate_from_samples(std::span<const double> samples);

/// sqrt(a.stderr^2 + b.stderr^2): the standard error of a difference of two
/// independent estimates.
inline double combined_stderr(const Estimate& a, const Estimate& b) {
  return std::hypot(a.stderr(), b.stderr());
}

/// |a - b| <= k * combined_stderr(a, b).
inline bool agree_within(const Estimate& a, const Estimate& b, double k = 3.0) {
  return std::abs(a.value - b.value) <= k * combined_stderr(a, b);
}

}  // namespace belgrad
