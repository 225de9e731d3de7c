#include "belgrad/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace belgrad {

double smootherstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

double smootherstep_prime(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double v = u * (1.0 - u);
  return 30.0 * v * v;
}

double smootherstep_second(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

double cutoff_profile(double r) { return 1.0 - smootherstep(r - 1.0); }

double cutoff_profile_prime(double r) { return -smootherstep_prime(r - 1.0); }

double cutoff_eta(const Vec& z) { return cutoff_profile(z.norm()); }

Vec cutoff_eta_gradient(const Vec& z) {
  const double r = z.norm();
  if (r <= 1.0 || r >= 2.0) return Vec::Zero(z.size());
  return (cutoff_profile_prime(r) / r) * z;
}

Vec phi_n(int n, const Vec& y) {
  if (n < 1) throw std::invalid_argument("phi_n: n must be >= 1");
  const double scale = static_cast<double>(n);
  if (y.norm() <= scale) return y;
  const Vec z = y / scale;
  const double s = 1.0 + (1.0 - cutoff_eta(z)) * z.squaredNorm();
  return y / std::sqrt(s);
}

Mat dphi_n_matrix(int n, const Vec& y) {
  if (n < 1) throw std::invalid_argument("dphi_n: n must be >= 1");
  const int d = static_cast<int>(y.size());
  const double scale = static_cast<double>(n);
  if (y.norm() <= scale) return Mat::Identity(d, d);
  const Vec z = y / scale;
  const double eta = cutoff_eta(z);
  const double z2 = z.squaredNorm();
  const double s = 1.0 + (1.0 - eta) * z2;
  // gradient of s(z) = 1 + (1 - eta(z)) |z|^2
  const Vec grad_s = -z2 * cutoff_eta_gradient(z) + 2.0 * (1.0 - eta) * z;
  return Mat::Identity(d, d) / std::sqrt(s) - (0.5 * std::pow(s, -1.5)) * (z * grad_s.transpose());
}

Vec dphi_n(int n, const Vec& y, const Vec& h) { return dphi_n_matrix(n, y) * h; }

double dphi_norm_bound() {
  // DPhi_1 at z is symmetric with eigenvalue 1/sqrt(s) across z and a radial
  // eigenvalue along z, so a fine radial scan in 1-d covers every dimension.
  double sup = 1.0;
  const int steps = 200000;
  for (int k = 0; k <= steps; ++k) {
    const double r = 1.0 + 1.5 * k / steps;
    Vec z(1);
    z(0) = r;
    sup = std::max(sup, std::abs(dphi_n_matrix(1, z)(0, 0)));
  }
  return sup;
}

namespace {

SdeModel regularized_coefficients(const SdeModel& base, int n, double h1_inflation) {
  if (n == 0) return base;
  SdeModel out = base;
  out.name = base.name + "@n=" + std::to_string(n);
  out.lyapunov_L = base.lyapunov_L * h1_inflation;
  out.drift = [b = base.drift, n](const Vec& x) { return b(phi_n(n, x)); };
  out.drift_jacobian = [db = base.drift_jacobian, n](const Vec& x) {
    return Mat(db(phi_n(n, x)) * dphi_n_matrix(n, x));
  };
  out.diffusion = [s = base.diffusion, n](const Vec& x) { return s(phi_n(n, x)); };
  out.diffusion_jacobians = [ds = base.diffusion_jacobians, n](const Vec& x) {
    DiffusionJacobians inner = ds(phi_n(n, x));
    const Mat jac = dphi_n_matrix(n, x);
    for (int i = 0; i < inner.count; ++i) inner[i] = inner[i] * jac;
    return inner;
  };
  return out;
}

Potential regularized_potential(const WeightSpec& spec, int n, double c1) {
  if (n == 0) return weight_potential(spec);
  return Potential{[spec, n, c1](const Vec& x) { return c1 * lyapunov_V(spec, phi_n(n, x)); },
                   [spec, n, c1](const Vec& x) {
                     return Vec(c1 * (dphi_n_matrix(n, x).transpose() * grad_V(spec, phi_n(n, x))));
                   }};
}

}  // namespace

RegularizationConstants calibrate_constants(const SdeModel& model, int n, const RegularizationOptions& options) {
  validate(model);
  std::set<int> levels(options.calibration_levels.begin(), options.calibration_levels.end());
  if (n > 0) levels.insert(n);
  const auto dirs = direction_set(model.dim);
  const double gamma = model.weight.gamma();

  RegularizationConstants constants;
  for (int m : levels) {
    if (m < 1) throw std::invalid_argument("calibrate_constants: levels must be >= 1");
    const SdeModel coeffs = regularized_coefficients(model, m, 1.0);
    for (const Vec& x : audit_grid(model.dim, 4.0 * m, options.n_radial, options.n_random)) {
      const Vec y = phi_n(m, x);
      const double ratio = h2_lhs(coeffs.drift_jacobian(x), coeffs.diffusion_jacobians(x), dirs) /
                           lyapunov_V(model.weight, y);
      constants.c1 = std::max(constants.c1, ratio);
      const double growth = model.lyapunov_L * std::pow(1.0 + x.squaredNorm(), gamma);
      constants.h1_inflation = std::max(constants.h1_inflation, h1_lhs(coeffs, x) / growth);
    }
  }
  return constants;
}

RegularizedModel regularize_with(const SdeModel& model, int n, RegularizationConstants constants) {
  validate(model);
  if (n < 1) throw std::invalid_argument("regularize: n must be >= 1");
  RegularizedModel out;
  out.base = model;
  out.n = n;
  out.c1 = constants.c1;
  out.h1_inflation = constants.h1_inflation;
  out.coefficients = regularized_coefficients(model, n, constants.h1_inflation);
  out.potential = regularized_potential(model.weight, n, constants.c1);
  return out;
}

RegularizedModel regularize(const SdeModel& model, int n, const RegularizationOptions& options) {
  return regularize_with(model, n, calibrate_constants(model, n, options));
}

RegularizedModel unregularized(const SdeModel& model) {
  validate(model);
  RegularizedModel out;
  out.base = model;
  out.n = 0;
  out.coefficients = model;
  out.potential = weight_potential(model.weight);
  return out;
}

}  // namespace belgrad
