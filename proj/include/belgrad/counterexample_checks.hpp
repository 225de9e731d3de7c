#pragma once

#include <string>
#include <vector>

#include "belgrad/counterexample.hpp"

namespace belgrad {

struct BlockRow {
  int n = 0;
  double ab_quadrature = 0.0;  // bump piece by Gauss-Kronrod plus the flat gap
  double ab_identity = 0.0;    // R_n / 2
  double cd_quadrature = 0.0;  // triangle piece by Gauss-Kronrod plus the flat gap
  double cd_identity = 0.0;    // (-1)^{n+1} a_n^2 + R_{n+1}/2 + (a_n - delta_{n+1}) R_{n+1}
  double excursion = 0.0;      // Gamma_n
};

struct GrowthRow {
  int n = 0;
  double c = 0.0;
  double u_prime = 0.0;  // u'(c_n)
  double lower = 0.0;    // n^gamma / 2
  bool holds() const { return std::abs(u_prime) >= lower; }
};

/// Limit of a block series estimated from its first N terms plus an
/// accelerated tail, for several N; spread is max - min over the N.
struct SeriesLimit {
  std::string name;
  std::vector<int> cutoffs;
  std::vector<double> limits;
  double spread = 0.0;
};

struct LemmaReport {
  int n0 = 0;
  int n_max = 0;
  bool ordering_holds = true;       // c-d < c+d < x-a < x+a < next c-d on [n0, n_max]
  bool tail_brackets_hold = true;   // a_n/2 <= |R_n| <= a_{n-1}/2 with sign (-1)^{n+1}
  std::vector<BlockRow> blocks;
  double max_ab_error = 0.0;
  double max_cd_error = 0.0;
  bool excursions_decrease = true;  // Gamma_{n+1} < Gamma_n throughout
  SeriesLimit ab_series, cd_series, block_series;
  std::vector<std::pair<double, double>> sup_u;  // (x_max, sup |u| on [0, x_max]), x_max doubling
  double sup_u_change = 0.0;                     // |difference| of the last two entries
  std::vector<GrowthRow> growth;
  bool growth_holds = true;
  int onset_n1 = 0;  // from here on a_n - delta_{n+1} decreases (scanned from n = 3)
  double balance = 0.0;       // int_R e^B f
  double u_jump = 0.0;        // |u(0+) - u(0-)|
  double du_jump = 0.0;       // one-sided second-order differences of the two branches
  double du_jump_exact = 0.0; // |u'(0+) - u'(0-)| from the closed forms

  bool passes(double identity_tol = 1e-10, double sup_tol = 1e-4, double cauchy_tol = 1e-8,
              double continuity_tol = 1e-8) const;
};

/// n_max >= n0 + 10; x_max is the largest domain for the boundedness table,
/// which is halved five times.
LemmaReport verify_lemma(const Counterexample& cx, int n_max, double x_max);

struct OdeReport {
  double max_residual = 0.0;          // |u'' + b u' - f|
  double max_derivative_mismatch = 0.0;  // |u' - central difference of u| / (1 + |u'|)
  double worst_x = 0.0;
  std::size_t n_points = 0;
};

OdeReport verify_ode(const Counterexample& cx, const std::vector<double>& sample);

}  // namespace belgrad
