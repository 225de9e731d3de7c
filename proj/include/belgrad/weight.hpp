#pragma once

#include "belgrad/types.hpp"

namespace belgrad {

/// Parameters of the growth weight
///   f(t) = m0 * exp(c0 * int_1^t s^-gamma ds),  t >= 1,
/// and of the Lyapunov potential V(x) = f(1 + |x|^2).
class WeightSpec {
 public:
  /// Throws std::invalid_argument unless gamma in [1/2, 1], m0 > 0, c0 >= 1.
  WeightSpec(double gamma, double m0, double c0);

  double gamma() const { return gamma_; }
  double m0() const { return m0_; }
  double c0() const { return c0_; }

 private:
  double gamma_;
  double m0_;
  double c0_;
};

/// int_1^t s^-gamma ds in closed form. Requires t >= 1.
double weight_exponent_integral(double gamma, double t);

/// f(t). Throws std::domain_error for t < 1.
double weight_f(const WeightSpec& spec, double t);

/// f'(t) = c0 f(t) / t^gamma. Throws std::domain_error for t < 1.
double weight_f_prime(const WeightSpec& spec, double t);

double lyapunov_V(const WeightSpec& spec, const Vec& x);

/// Gradient 2 f'(1 + |x|^2) x. Its norm never exceeds 2 c0 V(x).
Vec grad_V(const WeightSpec& spec, const Vec& x);

}  // namespace belgrad
