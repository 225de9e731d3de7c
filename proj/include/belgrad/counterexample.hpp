#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "belgrad/model.hpp"

namespace belgrad {

class ConvergenceBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sum_{j >= 0} (-1)^j term(j) for a totally monotone term sequence, by the
/// Cohen-Rodriguez Villegas-Zagier acceleration with n_terms terms. The
/// relative error is about 2 * 5.828^-n_terms.
double accelerated_alternating_sum(const std::function<double(std::int64_t)>& term, int n_terms);

struct PairedSum {
  double value = 0.0;
  double error_bound = 0.0;  // the first omitted term
  std::int64_t terms = 0;
};

/// sum_{j >= 0} (-1)^j term(j) by summing (term(2i) - term(2i+1)) pairs until
/// the first omitted term is below tol * |partial sum|. Throws
/// ConvergenceBudgetError rather than truncate when that needs more than
/// max_terms terms.
PairedSum paired_alternating_sum(const std::function<double(std::int64_t)>& term, double tol, std::int64_t max_terms);

/// Bump profile 1 - s(|u|) on [-1, 1] with s the quintic smootherstep: C^2,
/// equal to 1 at 0, with integral exactly 1.
double bump(double u);
double bump_prime(double u);
double bump_second(double u);
/// int_{-1}^{v} bump, clamped to [0, 1].
double bump_antiderivative(double v);

/// Smallest odd n >= 3 with n^{-3 gamma} + n^{-gamma} < 1/2.
int admissible_start_index(double gamma);

struct TailSeries {
  int n = 0;
  double value = 0.0;  // sum_{k >= n} (-1)^{k+1} k^{-gamma}
  double error_bound = 0.0;
};

enum class TailMethod { kAccelerated, kPairing };

/// A drift b with |b| <= k0 (1 + |x|^theta), a bounded forcing f, and the
/// bounded solution u of u'' + b u' = f whose derivative is unbounded.
///
/// On [0, inf) the drift is b = -l'/l. The weight l equals 1 away from
/// narrow bumps of height n^{2 gamma} at every integer n >= n0, except on the
/// entry ramp [0, 1], where l = exp(1/2 - int_0^x (1 - s)) takes the drift
/// from b(0) = 1, b'(0) = 0 (matching b = 1 on x < 0) down to 0. f is a
/// train of alternating triangles of half-width n^{-gamma} centred at n + 1/2.
class Counterexample {
 public:
  struct Options {
    // u and the cumulative block sums are tabulated on [0, x_cache].
    double x_cache = 140000.0;
    TailMethod method = TailMethod::kAccelerated;
    int accelerated_terms = 24;
    std::int64_t pairing_budget = 100'000'000;
    double tail_tolerance = 1e-12;  // relative, for the pairing method
  };

  explicit Counterexample(double theta = 0.9);
  Counterexample(double theta, Options options);

  double theta() const { return theta_; }
  double gamma() const { return gamma_; }
  int n0() const { return n0_; }
  /// J = int_0^inf f e^B, the improper integral the left branch must cancel.
  double matching_integral() const { return J_; }
  /// k in f(x) = k x e^x for x < 0; equals 4 J.
  double k() const { return 4.0 * J_; }

  static double c(int n) { return n; }
  double delta(int n) const;
  double bump_height(int n) const;  // n^{2 gamma} - 1
  double a(int n) const;            // n^{-gamma}
  static double x_center(int n) { return n + 0.5; }
  /// Start of block n: c_n - delta_n.
  double block_start(int n) const { return c(n) - delta(n); }

  double ell(double x) const;
  double ell_prime(double x) const;
  double ell_second(double x) const;
  double drift_b(double x) const;
  double drift_b_prime(double x) const;
  double forcing_f(double x) const;

  /// R_n computed afresh with the configured method. Throws std::logic_error
  /// if a_n/2 <= |R_n| <= a_{n-1}/2 or the sign (-1)^{n+1} fails.
  TailSeries tail_R(int n) const;
  /// Cached R_n for n0 <= n within the tabulated range.
  double R(int n) const;

  /// int_t^inf f(s) ds for t >= 0.
  double tail_integral_f(double t) const;

  double solution_u(double x) const;
  double u_prime(double x) const;
  double u_second(double x) const;
  double ode_residual(double x) const { return u_second(x) + drift_b(x) * u_prime(x) - forcing_f(x); }

  /// Closed forms of the four pieces of block n (bump, gap, triangle, gap).
  struct Block {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double sum() const { return a + b + c + d; }
  };
  Block block(int n) const;
  /// sup over block n of |int_{c_n - delta_n}^x l(t) T(t) dt|.
  double block_excursion(int n) const;
  /// sup |u| over [0, x_max], exact (u is monotone between tabulated extremes).
  double sup_abs_u(double x_max) const;

  /// Largest n whose block lies inside the tabulated range.
  int last_tabulated_index() const { return n_last_; }

 private:
  int locate_bump(double x) const;      // n if x lies in the n-th bump, else 0
  int locate_triangle(double x) const;  // n if x lies in the n-th triangle, else 0
  int block_of(double x) const;         // n with block_start(n) <= x < block_start(n+1)
  double ramp_integral(double x) const; // int_0^min(x,1) l
  double local_integral(int n, double x) const;  // int_{block_start(n)}^x l T
  double triangle_T_integral(int n, double q) const;  // int over first q of triangle n of T

  double theta_;
  double gamma_;
  int n0_;
  Options options_;
  double ramp_total_ = 0.0;
  int n_last_ = 0;
  std::vector<double> a_tab_, delta_tab_, height_tab_;  // indexed by n
  std::vector<double> r_cache_;      // R(n0 + i)
  std::vector<double> g_at_block_;   // int_0^{block_start(n0 + i)} l T
  double J_ = 0.0;
};

/// The counterexample drift as a 1-d SDE with sigma = sqrt 2, nu = 2, and
/// the weight gamma = 1, c0 = 1, M0 = k0, so V(x) = k0 (1 + x^2).
struct ExportedConstants {
  double k0 = 0.0;
  double lyapunov_L = 0.0;
};

/// k0 and L certified on bump-resolving grids with a 1% margin.
ExportedConstants calibrate_export_constants(const Counterexample& cx);

SdeModel export_as_sde_model(const Counterexample& cx);
SdeModel export_as_sde_model(const Counterexample& cx, const ExportedConstants& constants);

/// Points resolving the ramp, the first bumps and triangles, and the flat
/// pieces, for hypothesis audits and residual checks. Deterministic.
std::vector<double> counterexample_sample_points(const Counterexample& cx, int n_bumps, int per_piece);

}  // namespace belgrad
