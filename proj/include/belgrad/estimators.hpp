#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "belgrad/simulation.hpp"
#include "belgrad/stats.hpp"

namespace belgrad {

/// A test function phi with its declared sup norm. Evaluations exceeding
/// the declared bound are reported as errors.
struct TestFunction {
  std::string name;
  std::function<double(const Vec&)> eval;
  double sup_norm = std::numeric_limits<double>::infinity();

  bool bounded() const { return std::isfinite(sup_norm); }
  double operator()(const Vec& y) const;
};

TestFunction constant_function(double c);
TestFunction cos_first(double lambda);     // cos(lambda y_1)
TestFunction sin_first(double lambda);     // sin(lambda y_1)
TestFunction tanh_first(double scale);     // tanh(y_1 / scale)
TestFunction squared_norm();               // |y|^2, unbounded; oracle checks only
/// Looks up "cos", "sin", "tanh", "sinpi", "const" (lambda = 1 unless stated).
TestFunction test_function_by_name(const std::string& name);

/// E phi(X(t, x)).
Estimate estimate_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, SimConfig cfg);

/// E phi(X(t, x)) exp(-int_0^t V_n(X(s)) ds).
Estimate estimate_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, SimConfig cfg);

struct BelEstimate {
  Estimate i1;     // (1/t) E[phi(X) e^-beta int <sigma^-1 eta, dW>]
  Estimate i2;     // -E[phi(X) e^-beta int (1 - s/t) <grad V_n, eta> ds]
  Estimate total;  // per-path sum, so the stderr accounts for the correlation
};

/// Directional derivative D_h S_t phi(x) by the Bismut-Elworthy-Li identity.
BelEstimate bel_gradient_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x,
                           const Vec& h, SimConfig cfg);

struct DuhamelConfig {
  int s_grid_size = 8;
  std::size_t n_inner = 512;
  // Cap on outer paths x nodes x inner paths.
  double path_budget = 4e9;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// D_h P_t phi(x) = D_h S_t phi(x) + int_0^t D_h S_r(V_n P_{t-r} phi)(x) dr.
/// The r-integral uses r = t u^2 with midpoint nodes in u, so the 1/sqrt(r)
/// singularity of the BEL weight is absorbed into dr = 2 t u du. P_{t-r} phi
/// is an inner Monte Carlo average started at X(r) on every outer path;
/// cfg.n_paths is the outer path count.
Estimate duhamel_gradient_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x,
                            const Vec& h, SimConfig cfg, const DuhamelConfig& duhamel = {});

/// 1e-3 (1 + |x|).
double default_fd_step(const Vec& x);

/// Central difference of P_t phi with common random numbers; stderr from the
/// paired per-path differences.
Estimate fd_gradient_P(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, const Vec& h,
                       double eps, SimConfig cfg);
Estimate fd_gradient_S(const RegularizedModel& model, const TestFunction& phi, double t, const Vec& x, const Vec& h,
                       double eps, SimConfig cfg);

struct MomentCheck {
  std::string name;
  Estimate lhs;
  double bound = 0.0;
  bool holds() const { return lhs.value <= bound + 3.0 * lhs.stderr(); }
};

struct MomentReport {
  MomentCheck weight;              // E f(1+|X|^2) <= e^{c0 L t} f(1+|x|^2)
  MomentCheck fourth_power;        // E V^4(X) <= e^{4 c0 L t} V^4(x)
  MomentCheck regularized_fourth;  // E V_n^4(X_n) <= c1^4 e^{4 c0 C L t} V^4(x)
  bool holds() const { return weight.holds() && fourth_power.holds() && regularized_fourth.holds(); }
};

/// t == 0 is answered exactly without simulation.
MomentReport moment_audit(const RegularizedModel& model, const Vec& x, double t, SimConfig cfg);

struct RatioRow {
  std::string phi;
  double t = 0.0;
  Vec x;
  int best_axis = 0;
  Estimate gradient;  // fd estimate along best_axis
  double weighted = 0.0;    // sqrt(t nu) |D P_t phi| / (V^2(x) |phi|_inf)
  double unweighted = 0.0;  // sqrt(t) |D P_t phi| / |phi|_inf
};

struct RatioTable {
  std::vector<RatioRow> rows;
  double max_weighted() const;
  /// max over t of (max over the t-slice of the weighted ratio), divided by
  /// the min over t of the same quantity.
  double stability() const;
};

/// Weighted and unweighted gradient ratios from CRN finite differences,
/// maximised over coordinate directions. eps <= 0 selects default_fd_step.
RatioTable theorem_ratio_sweep(const RegularizedModel& model, const std::vector<TestFunction>& phis,
                               const std::vector<double>& ts, const std::vector<Vec>& xs, SimConfig cfg,
                               double eps = 0.0);

}  // namespace belgrad
