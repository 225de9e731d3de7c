#include "belgrad/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "belgrad/rng.hpp"

namespace belgrad {

void validate(const SdeModel& model) {
  if (model.dim < 1 || model.dim > kMaxDim)
    throw std::invalid_argument("model '" + model.name + "': dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(model.nu > 0.0)) throw std::invalid_argument("model '" + model.name + "': nu must be positive");
  if (!(model.lyapunov_L > 0.0)) throw std::invalid_argument("model '" + model.name + "': L must be positive");
  if (!model.drift || !model.drift_jacobian || !model.diffusion || !model.diffusion_jacobians)
    throw std::invalid_argument("model '" + model.name + "': missing coefficient function");
}

SdeModel with_finite_difference_jacobians(SdeModel model) {
  const int d = model.dim;
  auto drift = model.drift;
  auto diffusion = model.diffusion;
  model.drift_jacobian = [drift, d](const Vec& x) {
    const double step = 1e-5 * (1.0 + x.norm());
    Mat jac(d, d);
    for (int k = 0; k < d; ++k) {
      Vec xp = x, xm = x;
      xp(k) += step;
      xm(k) -= step;
      jac.col(k) = (drift(xp) - drift(xm)) / (2.0 * step);
    }
    return jac;
  };
  model.diffusion_jacobians = [diffusion, d](const Vec& x) {
    const double step = 1e-5 * (1.0 + x.norm());
    DiffusionJacobians out(d);
    for (int k = 0; k < d; ++k) {
      Vec xp = x, xm = x;
      xp(k) += step;
      xm(k) -= step;
      const Mat diff = (diffusion(xp) - diffusion(xm)) / (2.0 * step);
      // column i of sigma is sigma_i; its x_k derivative is column k of D sigma_i
      for (int i = 0; i < d; ++i) out[i].col(k) = diff.col(i);
    }
    return out;
  };
  return model;
}

Potential weight_potential(const WeightSpec& spec) {
  return Potential{[spec](const Vec& x) { return lyapunov_V(spec, x); },
                   [spec](const Vec& x) { return grad_V(spec, x); }};
}

Potential constant_potential(int dim, double v) {
  return Potential{[v](const Vec&) { return v; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); }};
}

std::vector<Vec> direction_set(int dim) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(2 * dim + 16));
  for (int i = 0; i < dim; ++i) {
    dirs.push_back(unit_vec(dim, i));
    dirs.push_back(-unit_vec(dim, i));
  }
  // Sign patterns with a positive first coordinate; at most 8 of them.
  const int n_patterns = std::min(1 << (dim - 1), 8);
  for (int p = 0; p < n_patterns && dim > 1; ++p) {
    Vec v = Vec::Ones(dim);
    for (int i = 1; i < dim; ++i)
      if (p & (1 << (i - 1))) v(i) = -1.0;
    dirs.push_back(v / v.norm());
  }
  NormalStream normals(derive_key(0x5eed, StreamTag::kDirections), 0);
  while (dirs.size() < static_cast<std::size_t>(2 * dim + 16)) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normals.next();
    dirs.push_back(v / v.norm());
  }
  return dirs;
}

double h2_lhs(const Mat& db, const DiffusionJacobians& dsigma, const std::vector<Vec>& dirs) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec& h : dirs) {
    double value = 2.0 * (db * h).norm();
    for (int i = 0; i < dsigma.count; ++i) value += (dsigma[i] * h).squaredNorm();
    worst = std::max(worst, value);
  }
  return worst;
}

double h1_lhs(const SdeModel& model, const Vec& x) {
  const Mat sigma = model.diffusion(x);
  const Mat a = sigma * sigma.transpose();
  const double r2 = 1.0 + x.squaredNorm();
  return 2.0 * model.drift(x).dot(x) + a.trace() +
         8.0 * model.weight.c0() * x.dot(a * x) / std::pow(r2, model.weight.gamma());
}

std::vector<Vec> audit_grid(int dim, double radius, int n_radial, int n_random, std::uint64_t seed) {
  std::vector<Vec> points;
  const auto dirs = direction_set(dim);
  points.push_back(Vec::Zero(dim));
  for (int k = 1; k <= n_radial; ++k) {
    const double r = radius * k / n_radial;
    for (const Vec& h : dirs) points.push_back(r * h);
  }
  NormalStream normals(derive_key(seed, StreamTag::kAuditPoints), 0);
  for (int k = 0; k < n_random; ++k) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = normals.next();
    const double r = radius * std::pow(normals.uniform(), 1.0 / dim);
    points.push_back(r * v / v.norm());
  }
  return points;
}

HypothesisReport check_hypotheses(const SdeModel& model, const std::vector<Vec>& sample) {
  validate(model);
  if (sample.empty()) throw std::invalid_argument("check_hypotheses: empty sample");
  const auto dirs = direction_set(model.dim);
  const double L = model.lyapunov_L;
  const double gamma = model.weight.gamma();

  HypothesisReport report;
  report.h1_max_residual = -std::numeric_limits<double>::infinity();
  report.h2_max_residual = -std::numeric_limits<double>::infinity();
  report.h3_min_eigenvalue = std::numeric_limits<double>::infinity();
  double worst_violation = -std::numeric_limits<double>::infinity();

  for (const Vec& x : sample) {
    const double r2 = 1.0 + x.squaredNorm();
    const double h1 = h1_lhs(model, x) - L * std::pow(r2, gamma);
    const double h2 = h2_lhs(model.drift_jacobian(x), model.diffusion_jacobians(x), dirs) - weight_f(model.weight, r2);
    const Mat sigma = model.diffusion(x);
    const Mat a = sigma * sigma.transpose();
    const double h3 = Eigen::SelfAdjointEigenSolver<Mat>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() - model.nu;

    report.h1_max_residual = std::max(report.h1_max_residual, h1);
    report.h2_max_residual = std::max(report.h2_max_residual, h2);
    report.h3_min_eigenvalue = std::min(report.h3_min_eigenvalue, h3);
    const double violation = std::max({h1, h2, -h3});
    if (violation > worst_violation) {
      worst_violation = violation;
      report.worst_point = x;
    }
    ++report.n_points;
  }
  return report;
}

}  // namespace belgrad
