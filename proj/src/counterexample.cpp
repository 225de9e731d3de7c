#include "belgrad/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "belgrad/regularization.hpp"
#include "belgrad/stats.hpp"

namespace belgrad {

double accelerated_alternating_sum(const std::function<double(std::int64_t)>& term, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("accelerated_alternating_sum: need at least one term");
  // Algorithm 1 of Cohen, Rodriguez Villegas and Zagier (2000).
  const double n = n_terms;
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  CompensatedSum s;
  for (int k = 0; k < n_terms; ++k) {
    c = b - c;
    s.add(c * term(k));
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s.value() / d;
}

PairedSum paired_alternating_sum(const std::function<double(std::int64_t)>& term, double tol, std::int64_t max_terms) {
  CompensatedSum s;
  PairedSum out;
  for (std::int64_t m = 0;; m += 2) {
    if (m + 2 > max_terms)
      throw ConvergenceBudgetError("paired_alternating_sum: tolerance not reached within " +
                                   std::to_string(max_terms) + " terms");
    s.add(term(m) - term(m + 1));
    const double next = term(m + 2);
    if (next <= tol * std::abs(s.value())) {
      out.value = s.value();
      out.error_bound = next;
      out.terms = m + 2;
      return out;
    }
  }
}

double bump(double u) {
  const double r = std::abs(u);
  return r >= 1.0 ? 0.0 : 1.0 - smootherstep(r);
}

double bump_prime(double u) {
  const double r = std::abs(u);
  if (r >= 1.0) return 0.0;
  return u >= 0.0 ? -smootherstep_prime(r) : smootherstep_prime(r);
}

double bump_second(double u) {
  const double r = std::abs(u);
  return r >= 1.0 ? 0.0 : -smootherstep_second(r);
}

namespace {

// int_0^w s(u) du for the smootherstep s, w in [0, 1].
double smootherstep_integral(double w) { return w * w * w * w * (w * (w - 3.0) + 2.5); }

}  // namespace

double bump_antiderivative(double v) {
  if (v <= -1.0) return 0.0;
  if (v >= 1.0) return 1.0;
  if (v <= 0.0) {
    const double w = -v;
    // int_w^1 (1 - s) by symmetry
    return (1.0 - w) - (smootherstep_integral(1.0) - smootherstep_integral(w));
  }
  return 0.5 + v - smootherstep_integral(v);
}

int admissible_start_index(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("admissible_start_index: gamma must be positive");
  for (long n = 3; n < 10'000'000; n += 2) {
    const double x = static_cast<double>(n);
    if (std::pow(x, -3.0 * gamma) + std::pow(x, -gamma) < 0.5) return static_cast<int>(n);
  }
  throw std::invalid_argument("admissible_start_index: gamma too small, start index beyond 1e7");
}

Counterexample::Counterexample(double theta) : Counterexample(theta, Options{}) {}

Counterexample::Counterexample(double theta, Options options)
    : theta_(theta), gamma_(theta / 5.0), n0_(0), options_(options) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("Counterexample: theta must lie in (0, 1)");
  n0_ = admissible_start_index(gamma_);
  if (!(options_.x_cache > n0_ + 4.0)) throw std::invalid_argument("Counterexample: x_cache must exceed n0 + 4");

  n_last_ = static_cast<int>(std::floor(options_.x_cache)) - 1;
  // the sequences are needed on every drift evaluation; pow dominates otherwise
  const std::size_t n_tab = static_cast<std::size_t>(n_last_) + 4;
  a_tab_.resize(n_tab);
  delta_tab_.resize(n_tab);
  height_tab_.resize(n_tab);
  for (std::size_t n = 1; n < n_tab; ++n) {
    const double dn = static_cast<double>(n);
    a_tab_[n] = std::pow(dn, -gamma_);
    delta_tab_[n] = std::pow(dn, -3.0 * gamma_);
    height_tab_[n] = std::pow(dn, 2.0 * gamma_) - 1.0;
  }

  ramp_total_ = ramp_integral(1.0);

  r_cache_.resize(static_cast<std::size_t>(n_last_ - n0_ + 3));
  for (std::size_t i = 0; i < r_cache_.size(); ++i) r_cache_[i] = tail_R(n0_ + static_cast<int>(i)).value;

  g_at_block_.resize(static_cast<std::size_t>(n_last_ - n0_ + 2));
  CompensatedSum g;
  g.add(R(n0_) * (ramp_total_ + block_start(n0_) - 1.0));
  g_at_block_[0] = g.value();
  for (std::size_t i = 1; i < g_at_block_.size(); ++i) {
    const Block blk = block(n0_ + static_cast<int>(i) - 1);
    g.add(blk.a);
    g.add(blk.b);
    g.add(blk.c);
    g.add(blk.d);
    g_at_block_[i] = g.value();
  }
  J_ = std::exp(0.5) * R(n0_);
}

double Counterexample::delta(int n) const {
  if (n > 0 && static_cast<std::size_t>(n) < delta_tab_.size()) return delta_tab_[n];
  return std::pow(static_cast<double>(n), -3.0 * gamma_);
}

double Counterexample::bump_height(int n) const {
  if (n > 0 && static_cast<std::size_t>(n) < height_tab_.size()) return height_tab_[n];
  return std::pow(static_cast<double>(n), 2.0 * gamma_) - 1.0;
}

double Counterexample::a(int n) const {
  if (n > 0 && static_cast<std::size_t>(n) < a_tab_.size()) return a_tab_[n];
  return std::pow(static_cast<double>(n), -gamma_);
}

int Counterexample::locate_bump(double x) const {
  if (x < n0_ - 0.5) return 0;
  const auto n = static_cast<int>(std::lround(x));
  return (n >= n0_ && std::abs(x - n) < delta(n)) ? n : 0;
}

int Counterexample::locate_triangle(double x) const {
  if (x < n0_) return 0;
  const auto m = static_cast<int>(std::floor(x));
  return (m >= n0_ && std::abs(x - x_center(m)) <= a(m)) ? m : 0;
}

int Counterexample::block_of(double x) const {
  auto n = static_cast<int>(std::floor(x));
  if (x >= block_start(n + 1)) ++n;
  return n;
}

namespace {

// Entry ramp: on [0, 1] the drift is 1 - s(x), so l = exp(1/2 - x + S(x)).
double ramp_ell(double x) { return std::exp(0.5 - x + smootherstep_integral(x)); }

}  // namespace

double Counterexample::ramp_integral(double x) const {
  const double upper = std::clamp(x, 0.0, 1.0);
  if (upper == 0.0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(ramp_ell, 0.0, upper, 8, 1e-13, &error);
  if (error > 1e-12) throw std::runtime_error("ramp quadrature did not converge");
  return value;
}

double Counterexample::ell(double x) const {
  if (x < 0.0) return std::exp(0.5 - x);
  if (x <= 1.0) return ramp_ell(x);
  if (const int n = locate_bump(x)) return 1.0 + bump_height(n) * bump((x - n) / delta(n));
  return 1.0;
}

double Counterexample::ell_prime(double x) const {
  if (x < 0.0) return -std::exp(0.5 - x);
  if (x <= 1.0) return -(1.0 - smootherstep(x)) * ramp_ell(x);
  if (const int n = locate_bump(x)) return bump_height(n) * bump_prime((x - n) / delta(n)) / delta(n);
  return 0.0;
}

double Counterexample::ell_second(double x) const {
  if (x < 0.0) return std::exp(0.5 - x);
  if (x <= 1.0) {
    const double b = 1.0 - smootherstep(x);
    return (b * b + smootherstep_prime(x)) * ramp_ell(x);
  }
  if (const int n = locate_bump(x)) {
    const double dn = delta(n);
    return bump_height(n) * bump_second((x - n) / dn) / (dn * dn);
  }
  return 0.0;
}

double Counterexample::drift_b(double x) const {
  if (x < 0.0) return 1.0;
  if (x <= 1.0) return 1.0 - smootherstep(x);
  if (locate_bump(x)) return -ell_prime(x) / ell(x);
  return 0.0;
}

double Counterexample::drift_b_prime(double x) const {
  if (x < 0.0) return 0.0;
  if (x <= 1.0) return -smootherstep_prime(x);
  if (locate_bump(x)) {
    const double l = ell(x);
    const double q = ell_prime(x) / l;
    return -(ell_second(x) / l - q * q);
  }
  return 0.0;
}

double Counterexample::forcing_f(double x) const {
  if (x < 0.0) return k() * x * std::exp(x);
  if (const int m = locate_triangle(x)) {
    const double sign = (m % 2 == 1) ? 1.0 : -1.0;
    return sign * (1.0 - std::abs(x - x_center(m)) / a(m));
  }
  return 0.0;
}

TailSeries Counterexample::tail_R(int n) const {
  if (n < n0_) throw std::invalid_argument("tail_R: n must be >= n0");
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  const double g = gamma_;
  auto term = [n, g](std::int64_t j) { return std::pow(static_cast<double>(n + j), -g); };

  TailSeries out;
  out.n = n;
  if (options_.method == TailMethod::kAccelerated) {
    const int terms = options_.accelerated_terms;
    out.value = sign * accelerated_alternating_sum(term, terms);
    const double d = std::cosh(terms * std::log(3.0 + std::sqrt(8.0)));
    out.error_bound = 2.0 * a(n) / d + 8.0 * terms * std::numeric_limits<double>::epsilon() * a(n);
  } else {
    const PairedSum p = paired_alternating_sum(term, options_.tail_tolerance, options_.pairing_budget);
    out.value = sign * p.value;
    out.error_bound = p.error_bound;
  }
  const double mag = std::abs(out.value);
  if (out.value * sign <= 0.0 || mag < 0.5 * a(n) || (n > 3 && mag > 0.5 * a(n - 1)))
    throw std::logic_error("tail_R: half-term bracket violated at n = " + std::to_string(n));
  return out;
}

double Counterexample::R(int n) const {
  const auto i = static_cast<std::size_t>(n - n0_);
  if (n >= n0_ && i < r_cache_.size()) return r_cache_[i];
  return tail_R(n).value;
}

double Counterexample::tail_integral_f(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("tail_integral_f: t must be >= 0");
  const auto m = static_cast<int>(std::floor(t));
  if (m < n0_) return R(n0_);
  const double lo = x_center(m) - a(m);
  if (t < lo) return R(m);
  if (t > x_center(m) + a(m)) return R(m + 1);
  const double am = a(m);
  const double q = t - lo;
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  const double partial = q <= am ? am - q * q / (2.0 * am) : (2.0 * am - q) * (2.0 * am - q) / (2.0 * am);
  return sign * partial + R(m + 1);
}

double Counterexample::triangle_T_integral(int n, double q) const {
  const double an = a(n);
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  double partial;
  if (q <= an) {
    partial = an * q - q * q * q / (6.0 * an);
  } else {
    const double w = 2.0 * an - q;
    partial = 5.0 * an * an / 6.0 + (an * an * an - w * w * w) / (6.0 * an);
  }
  return sign * partial + R(n + 1) * q;
}

Counterexample::Block Counterexample::block(int n) const {
  const double dn = delta(n);
  const double rn = R(n);
  const double rn1 = R(n + 1);
  Block blk;
  blk.a = rn * (2.0 * dn + bump_height(n) * dn * bump_antiderivative(1.0));
  blk.b = rn * (x_center(n) - a(n) - c(n) - dn);
  blk.c = triangle_T_integral(n, 2.0 * a(n));
  blk.d = rn1 * (block_start(n + 1) - x_center(n) - a(n));
  return blk;
}

double Counterexample::local_integral(int n, double x) const {
  const double dn = delta(n);
  const double rn = R(n);
  if (x <= c(n) + dn) return rn * ((x - block_start(n)) + bump_height(n) * dn * bump_antiderivative((x - c(n)) / dn));
  const Block blk = block(n);
  if (x <= x_center(n) - a(n)) return blk.a + rn * (x - c(n) - dn);
  if (x <= x_center(n) + a(n)) return blk.a + blk.b + triangle_T_integral(n, x - (x_center(n) - a(n)));
  return blk.a + blk.b + blk.c + R(n + 1) * (x - x_center(n) - a(n));
}

double Counterexample::block_excursion(int n) const {
  const Block blk = block(n);
  const double an = a(n);
  const double q_star = 2.0 * an - std::sqrt(2.0 * an * std::abs(R(n + 1)));
  const double at_zero = blk.a + blk.b + triangle_T_integral(n, q_star);
  return std::max(std::abs(at_zero), std::abs(blk.sum()));
}

double Counterexample::solution_u(double x) const {
  if (x < 0.0) {
    const double e = std::exp(x);
    return 0.25 * k() * (2.0 * x * e - 3.0 * e + 3.0);
  }
  const double z0 = block_start(n0_);
  if (x <= z0) return -R(n0_) * (ramp_integral(x) + std::max(0.0, x - 1.0));
  const int n = block_of(x);
  if (n > n_last_) throw std::out_of_range("solution_u: x beyond the tabulated range (raise Options::x_cache)");
  return -(g_at_block_[static_cast<std::size_t>(n - n0_)] + local_integral(n, x));
}

double Counterexample::u_prime(double x) const {
  if (x < 0.0) return 0.25 * k() * std::exp(x) * (2.0 * x - 1.0);
  return -ell(x) * tail_integral_f(x);
}

double Counterexample::u_second(double x) const {
  if (x < 0.0) return 0.25 * k() * std::exp(x) * (2.0 * x + 1.0);
  // d/dx of -l T with T' = -f
  return -ell_prime(x) * tail_integral_f(x) + ell(x) * forcing_f(x);
}

double Counterexample::sup_abs_u(double x_max) const {
  if (!(x_max >= 0.0)) throw std::invalid_argument("sup_abs_u: x_max must be >= 0");
  const double z0 = block_start(n0_);
  // u is monotone on [0, z0] since l T > 0 there.
  if (x_max <= z0) return std::abs(solution_u(x_max));
  double sup = std::abs(g_at_block_[0]);
  const int last = block_of(x_max);
  if (last > n_last_) throw std::out_of_range("sup_abs_u: x_max beyond the tabulated range");
  for (int n = n0_; n <= last; ++n) {
    const double base = g_at_block_[static_cast<std::size_t>(n - n0_)];
    const double an = a(n);
    const double q_star = 2.0 * an - std::sqrt(2.0 * an * std::abs(R(n + 1)));
    const double t_star = x_center(n) - an + q_star;
    if (n < last) {
      const Block blk = block(n);
      sup = std::max({sup, std::abs(base + blk.a + blk.b + triangle_T_integral(n, q_star)), std::abs(base + blk.sum())});
    } else {
      if (t_star <= x_max) sup = std::max(sup, std::abs(base + local_integral(n, t_star)));
      sup = std::max(sup, std::abs(base + local_integral(n, x_max)));
    }
  }
  return sup;
}

ExportedConstants calibrate_export_constants(const Counterexample& cx) {
  const double theta = cx.theta();
  double k_growth = 0.0;
  double l_ratio = 0.0;
  auto visit = [&](double x) {
    const double b = cx.drift_b(x);
    const double db = cx.drift_b_prime(x);
    const double ax = std::abs(x);
    const double x2 = x * x;
    k_growth = std::max({k_growth, std::abs(b) / (1.0 + std::pow(ax, theta)),
                         std::abs(db) / (1.0 + std::pow(ax, 2.0 * theta)), 2.0 * std::abs(db) / (1.0 + x2)});
    // (H1) with a = 2, c0 = 1, gamma = 1
    l_ratio = std::max(l_ratio, (2.0 * b * x + 2.0 + 16.0 * x2 / (1.0 + x2)) / (1.0 + x2));
  };
  for (int i = 0; i <= 6000; ++i) visit(-60.0 + 0.01 * i);
  for (int i = 0; i <= 2000; ++i) visit(i / 2000.0);
  std::vector<int> bumps;
  for (int n = cx.n0(); n <= cx.n0() + 200; ++n) bumps.push_back(n);
  for (int n = 2 * cx.n0(); n <= cx.last_tabulated_index() && n <= 64 * cx.n0(); n *= 2) bumps.push_back(n);
  for (int n : bumps) {
    const double dn = cx.delta(n);
    for (int i = 0; i <= 2000; ++i) visit(n + dn * (-1.0 + i / 1000.0));
    visit(Counterexample::x_center(n));
  }
  return ExportedConstants{1.01 * k_growth, 1.01 * l_ratio};
}

SdeModel export_as_sde_model(const Counterexample& cx) { return export_as_sde_model(cx, calibrate_export_constants(cx)); }

SdeModel export_as_sde_model(const Counterexample& cx, const ExportedConstants& constants) {
  auto shared = std::make_shared<const Counterexample>(cx);
  SdeModel m;
  m.name = "counterexample(theta=" + std::to_string(cx.theta()) + ")";
  m.dim = 1;
  m.nu = 2.0;
  m.drift = [shared](const Vec& x) {
    Vec out(1);
    out(0) = shared->drift_b(x(0));
    return out;
  };
  m.drift_jacobian = [shared](const Vec& x) {
    Mat out(1, 1);
    out(0, 0) = shared->drift_b_prime(x(0));
    return out;
  };
  m.diffusion = [](const Vec&) {
    Mat out(1, 1);
    out(0, 0) = std::sqrt(2.0);
    return out;
  };
  m.diffusion_jacobians = [](const Vec&) { return DiffusionJacobians(1); };
  m.weight = WeightSpec(1.0, constants.k0, 1.0);
  m.lyapunov_L = constants.lyapunov_L;
  m.constant_diffusion = true;
  return m;
}

std::vector<double> counterexample_sample_points(const Counterexample& cx, int n_bumps, int per_piece) {
  std::vector<double> xs;
  auto fill = [&](double lo, double hi) {
    for (int i = 0; i < per_piece; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / per_piece);
  };
  fill(-10.0, 0.0);
  fill(0.0, 1.0);
  fill(1.0, cx.block_start(cx.n0()));
  for (int n = cx.n0(); n < cx.n0() + n_bumps; ++n) {
    const double dn = cx.delta(n);
    const double an = cx.a(n);
    const double xc = Counterexample::x_center(n);
    fill(n - dn, n);
    fill(n, n + dn);
    fill(n + dn, xc - an);
    fill(xc - an, xc);
    fill(xc, xc + an);
    fill(xc + an, cx.block_start(n + 1));
  }
  return xs;
}

}  // namespace belgrad
