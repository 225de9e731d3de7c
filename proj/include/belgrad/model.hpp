#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "belgrad/types.hpp"
#include "belgrad/weight.hpp"

namespace belgrad {

/// dX = b(X) dt + sigma(X) dW in R^d, with the constants of the growth
/// hypotheses attached. sigma is square; its columns are sigma_i.
struct SdeModel {
  std::string name;
  int dim = 1;
  double nu = 1.0;  // lower bound for the eigenvalues of a = sigma sigma^T
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> drift_jacobian;
  std::function<Mat(const Vec&)> diffusion;
  std::function<DiffusionJacobians(const Vec&)> diffusion_jacobians;
  WeightSpec weight{1.0, 1.0, 1.0};
  double lyapunov_L = 1.0;
  // sigma does not depend on x; lets the path kernel factor it once.
  bool constant_diffusion = false;
};

/// Throws std::invalid_argument if dim is outside [1, kMaxDim], nu or L is
/// not positive, or a coefficient callable is missing.
void validate(const SdeModel& model);

/// Replaces drift_jacobian and diffusion_jacobians with central differences
/// of step 1e-5 * (1 + |x|).
SdeModel with_finite_difference_jacobians(SdeModel model);

/// A killing rate V together with its gradient.
struct Potential {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

Potential weight_potential(const WeightSpec& spec);
Potential constant_potential(int dim, double v);

/// 2d + 16 unit vectors: the signed axes, sign-pattern diagonals, then
/// normalized Gaussian directions from a fixed seed. Deterministic.
std::vector<Vec> direction_set(int dim);

/// max over h in dirs of 2|Db h| + sum_i |D sigma_i h|^2.
double h2_lhs(const Mat& db, const DiffusionJacobians& dsigma, const std::vector<Vec>& dirs);

/// 2<b,x> + Tr a + 8 c0 <a x, x> / (1+|x|^2)^gamma, i.e. the growth side of
/// H1 before subtracting L (1+|x|^2)^gamma.
double h1_lhs(const SdeModel& model, const Vec& x);

/// Radial points on every direction of direction_set at radii spaced evenly
/// in [0, radius], plus n_random points uniform in the ball. Deterministic.
std::vector<Vec> audit_grid(int dim, double radius, int n_radial, int n_random, std::uint64_t seed = 17);

struct HypothesisReport {
  double h1_max_residual = 0.0;
  double h2_max_residual = 0.0;
  double h3_min_eigenvalue = 0.0;  // min over the sample of lambda_min(a) - nu
  int n_points = 0;
  Vec worst_point;  // where the largest of the three violations occurred

  bool passes(double tol = 1e-9) const {
    return h1_max_residual <= tol && h2_max_residual <= tol && h3_min_eigenvalue >= -tol;
  }
};

/// Evaluates the H1, H2 and H3 residuals at every sample point.
HypothesisReport check_hypotheses(const SdeModel& model, const std::vector<Vec>& sample);

}  // namespace belgrad
