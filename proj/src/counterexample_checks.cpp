#include "belgrad/counterexample_checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "belgrad/stats.hpp"

namespace belgrad {

namespace {

double gk(const std::function<double(double)>& f, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-13, &error);
  if (error > 1e-12) throw std::runtime_error("block quadrature did not reach 1e-12 on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]: " + std::to_string(error));
  return value;
}

SeriesLimit series_limit(const std::string& name, const std::function<double(int)>& term, int n0,
                         const std::vector<int>& cutoffs) {
  SeriesLimit out;
  out.name = name;
  out.cutoffs = cutoffs;
  for (int cutoff : cutoffs) {
    CompensatedSum head;
    for (int n = n0; n < cutoff; ++n) head.add(term(n));
    // term(m) = (-1)^{m+1} beta(m); the tail is (-1)^{N+1} sum_j (-1)^j beta(N + j)
    auto beta = [&](std::int64_t j) {
      const int m = cutoff + static_cast<int>(j);
      return (m % 2 == 1 ? 1.0 : -1.0) * term(m);
    };
    const double sign = cutoff % 2 == 1 ? 1.0 : -1.0;
    head.add(sign * accelerated_alternating_sum(beta, 24));
    out.limits.push_back(head.value());
  }
  const auto [lo, hi] = std::minmax_element(out.limits.begin(), out.limits.end());
  out.spread = *hi - *lo;
  return out;
}

}  // namespace

bool LemmaReport::passes(double identity_tol, double sup_tol, double cauchy_tol, double continuity_tol) const {
  const bool excursions_vanish =
      !blocks.empty() && blocks.back().excursion < blocks.front().excursion;
  return ordering_holds && tail_brackets_hold && max_ab_error <= identity_tol && max_cd_error <= identity_tol &&
         excursions_decrease && excursions_vanish && ab_series.spread <= cauchy_tol &&
         cd_series.spread <= cauchy_tol && block_series.spread <= cauchy_tol && sup_u_change <= sup_tol &&
         growth_holds && std::abs(balance) <= 1e-10 && u_jump <= continuity_tol && du_jump <= continuity_tol;
}

LemmaReport verify_lemma(const Counterexample& cx, int n_max, double x_max) {
  const int n0 = cx.n0();
  if (n_max < n0 + 10) throw std::invalid_argument("verify_lemma: n_max must be >= n0 + 10");
  if (n_max + 30 > cx.last_tabulated_index()) throw std::invalid_argument("verify_lemma: n_max beyond tabulated range");
  LemmaReport rep;
  rep.n0 = n0;
  rep.n_max = n_max;

  for (int n = n0; n <= n_max; ++n) {
    const double xc = Counterexample::x_center(n);
    const bool ordered = cx.c(n) - cx.delta(n) < cx.c(n) + cx.delta(n) && cx.c(n) + cx.delta(n) < xc - cx.a(n) &&
                         xc - cx.a(n) < xc + cx.a(n) && xc + cx.a(n) < cx.block_start(n + 1);
    rep.ordering_holds = rep.ordering_holds && ordered;
    try {
      cx.tail_R(n);
    } catch (const std::logic_error&) {
      rep.tail_brackets_hold = false;
    }
  }

  auto lT = [&](double t) { return cx.ell(t) * cx.tail_integral_f(t); };
  auto T = [&](double t) { return cx.tail_integral_f(t); };
  for (int n = n0; n <= n_max; ++n) {
    const double dn = cx.delta(n);
    const double an = cx.a(n);
    const double xc = Counterexample::x_center(n);
    const double rn = cx.R(n);
    const double rn1 = cx.R(n + 1);
    BlockRow row;
    row.n = n;
    const double bump_piece = gk(lT, n - dn, n) + gk(lT, n, n + dn);
    row.ab_quadrature = bump_piece + rn * (xc - an - n - dn);
    row.ab_identity = 0.5 * rn;
    const double triangle_piece = gk(T, xc - an, xc) + gk(T, xc, xc + an);
    row.cd_quadrature = triangle_piece + rn1 * (cx.block_start(n + 1) - xc - an);
    const double sign = n % 2 == 1 ? 1.0 : -1.0;
    row.cd_identity = sign * an * an + 0.5 * rn1 + (an - cx.delta(n + 1)) * rn1;
    row.excursion = cx.block_excursion(n);
    rep.max_ab_error = std::max(rep.max_ab_error, std::abs(row.ab_quadrature - row.ab_identity));
    rep.max_cd_error = std::max(rep.max_cd_error, std::abs(row.cd_quadrature - row.cd_identity));
    if (!rep.blocks.empty() && !(row.excursion < rep.blocks.back().excursion)) rep.excursions_decrease = false;
    rep.blocks.push_back(row);
  }

  std::vector<int> cutoffs;
  for (int i = 1; i <= 4; ++i) cutoffs.push_back(n0 + (n_max - n0) * i / 4);
  rep.ab_series = series_limit("A+B", [&](int n) { const auto b = cx.block(n); return b.a + b.b; }, n0, cutoffs);
  rep.cd_series = series_limit("C+D", [&](int n) { const auto b = cx.block(n); return b.c + b.d; }, n0, cutoffs);
  rep.block_series = series_limit("A+B+C+D", [&](int n) { return cx.block(n).sum(); }, n0, cutoffs);

  for (int j = 5; j >= 0; --j) {
    const double xm = x_max / std::pow(2.0, j);
    rep.sup_u.emplace_back(xm, cx.sup_abs_u(xm));
  }
  rep.sup_u_change = std::abs(rep.sup_u.back().second - rep.sup_u[rep.sup_u.size() - 2].second);

  for (int n = n0; n <= n_max; ++n) {
    GrowthRow g;
    g.n = n;
    g.c = n;
    g.u_prime = cx.u_prime(n);
    g.lower = 0.5 * std::pow(static_cast<double>(n), cx.gamma());
    rep.growth_holds = rep.growth_holds && g.holds();
    rep.growth.push_back(g);
  }
  rep.growth_holds = rep.growth_holds && std::abs(rep.growth.back().u_prime) > std::abs(rep.growth.front().u_prime);

  auto gap = [&](int n) { return std::pow(n, -cx.gamma()) - std::pow(n + 1.0, -3.0 * cx.gamma()); };
  rep.onset_n1 = 3;
  for (int n = 3; n < n_max; ++n)
    if (!(gap(n + 1) < gap(n))) rep.onset_n1 = n + 1;

  boost::math::quadrature::exp_sinh<double> half_line;
  const double k = cx.k();
  const double left = half_line.integrate([k](double s) { return -k * s * std::exp(-2.0 * s); });
  rep.balance = left + cx.matching_integral();

  const double h = 1e-5;
  const double u0 = cx.solution_u(0.0);
  const double left_u0 = 0.25 * k * (0.0 - 3.0 + 3.0);
  rep.u_jump = std::abs(u0 - left_u0);
  const double right_du = (-3.0 * u0 + 4.0 * cx.solution_u(h) - cx.solution_u(2.0 * h)) / (2.0 * h);
  const double left_du = (3.0 * left_u0 - 4.0 * cx.solution_u(-h) + cx.solution_u(-2.0 * h)) / (2.0 * h);
  rep.du_jump = std::abs(right_du - left_du);
  rep.du_jump_exact = std::abs(cx.u_prime(0.0) - 0.25 * k * (0.0 - 1.0));
  return rep;
}

OdeReport verify_ode(const Counterexample& cx, const std::vector<double>& sample) {
  if (sample.empty()) throw std::invalid_argument("verify_ode: empty sample");
  OdeReport rep;
  for (double x : sample) {
    const double r = std::abs(cx.ode_residual(x));
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst_x = x;
    }
    const double h = 1e-6 * (1.0 + std::abs(x));
    const double fd = (cx.solution_u(x + h) - cx.solution_u(x - h)) / (2.0 * h);
    const double du = cx.u_prime(x);
    rep.max_derivative_mismatch = std::max(rep.max_derivative_mismatch, std::abs(du - fd) / (1.0 + std::abs(du)));
    ++rep.n_points;
  }
  return rep;
}

}  // namespace belgrad
