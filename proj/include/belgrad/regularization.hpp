#pragma once

#include <vector>

#include "belgrad/model.hpp"

namespace belgrad {

/// Quintic smootherstep s(u) = 6u^5 - 15u^4 + 10u^3 on [0, 1], and the
/// radial profile q(r) = 1 for r <= 1, 1 - s(r - 1) on (1, 2), 0 for r >= 2.
double smootherstep(double u);
double smootherstep_prime(double u);
double smootherstep_second(double u);
double cutoff_profile(double r);
double cutoff_profile_prime(double r);

/// eta(z) = q(|z|): equal to 1 on the unit ball, 0 outside radius 2, C^2.
double cutoff_eta(const Vec& z);
Vec cutoff_eta_gradient(const Vec& z);

/// Phi_n(y) = y / sqrt(1 + (1 - eta(y/n)) |y|^2 / n^2). Identity for |y| <= n.
Vec phi_n(int n, const Vec& y);

/// Jacobian of Phi_n at y. Equals the Jacobian of Phi_1 at y/n.
Mat dphi_n_matrix(int n, const Vec& y);

/// Directional derivative DPhi_n(y)[h].
Vec dphi_n(int n, const Vec& y, const Vec& h);

/// A model with coefficients b o Phi_n, sigma o Phi_n and the potential
/// V_n = c1 V(Phi_n). n == 0 stands for the unmodified model (Phi = id, c1 = 1).
struct RegularizedModel {
  SdeModel base;
  int n = 0;
  double c1 = 1.0;
  double h1_inflation = 1.0;  // C with (H1) holding for the coefficients with L replaced by C L
  SdeModel coefficients;      // b_n, sigma_n and their Jacobians; lyapunov_L = C L
  Potential potential;        // V_n and its gradient

  RegularizedModel with_potential(Potential p) const {
    RegularizedModel out = *this;
    out.potential = std::move(p);
    return out;
  }
};

struct RegularizationOptions {
  std::vector<int> calibration_levels{1, 2, 4, 8, 16};
  int n_radial = 96;  // radii per direction on |x| <= 4n
  int n_random = 256;
};

struct RegularizationConstants {
  double c1 = 1.0;
  double h1_inflation = 1.0;
};

/// Calibrates c1 and the H1 inflation C on audit grids of radius 4m for every
/// level m in options.calibration_levels and also m = n; both are maxima over
/// all those levels, so one value serves every tested n.
RegularizationConstants calibrate_constants(const SdeModel& model, int n, const RegularizationOptions& options = {});

/// Operator norm bound sup_y |DPhi_n(y)|. It does not depend on n.
double dphi_norm_bound();

RegularizedModel regularize(const SdeModel& model, int n, const RegularizationOptions& options = {});

/// Regularize with constants already known (skips calibration).
RegularizedModel regularize_with(const SdeModel& model, int n, RegularizationConstants constants);

/// The model itself, killed at rate V.
RegularizedModel unregularized(const SdeModel& model);

}  // namespace belgrad
