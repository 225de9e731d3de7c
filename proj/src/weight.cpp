#include "belgrad/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace belgrad {

WeightSpec::WeightSpec(double gamma, double m0, double c0) : gamma_(gamma), m0_(m0), c0_(c0) {
  if (!(gamma >= 0.5 && gamma <= 1.0)) throw std::invalid_argument("WeightSpec: gamma must lie in [1/2, 1]");
  if (!(m0 > 0.0)) throw std::invalid_argument("WeightSpec: m0 must be positive");
  if (!(c0 >= 1.0)) throw std::invalid_argument("WeightSpec: c0 must be >= 1");
}

double weight_exponent_integral(double gamma, double t) {
  if (!(t >= 1.0)) throw std::domain_error("weight_f: argument must be >= 1");
  const double log_t = std::log(t);
  if (gamma == 1.0) return log_t;
  // (t^(1-g) - 1) / (1-g), written with expm1 so gamma -> 1 stays accurate.
  const double q = 1.0 - gamma;
  return std::expm1(q * log_t) / q;
}

double weight_f(const WeightSpec& spec, double t) {
  if (spec.gamma() == 1.0) {
    if (!(t >= 1.0)) throw std::domain_error("weight_f: argument must be >= 1");
    return spec.c0() == 1.0 ? spec.m0() * t : spec.m0() * std::pow(t, spec.c0());
  }
  return spec.m0() * std::exp(spec.c0() * weight_exponent_integral(spec.gamma(), t));
}

double weight_f_prime(const WeightSpec& spec, double t) {
  const double f = weight_f(spec, t);
  return spec.gamma() == 1.0 ? spec.c0() * f / t : spec.c0() * f / std::pow(t, spec.gamma());
}

double lyapunov_V(const WeightSpec& spec, const Vec& x) { return weight_f(spec, 1.0 + x.squaredNorm()); }

Vec grad_V(const WeightSpec& spec, const Vec& x) {
  return (2.0 * weight_f_prime(spec, 1.0 + x.squaredNorm())) * x;
}

}  // namespace belgrad
