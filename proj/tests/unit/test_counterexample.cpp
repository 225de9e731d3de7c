#include <gtest/gtest.h>

#include <cmath>

#include "belgrad/counterexample.hpp"
#include "belgrad/counterexample_checks.hpp"

using namespace belgrad;

namespace {

const Counterexample& cx() {
  static const Counterexample instance(0.9);
  return instance;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(AlternatingSums, AcceleratedKnownLimits) {
  EXPECT_NEAR(accelerated_alternating_sum([](std::int64_t j) { return 1.0 / (j + 1.0); }, 24), std::log(2.0), 1e-15);
  EXPECT_NEAR(accelerated_alternating_sum([](std::int64_t j) { return 1.0 / (2.0 * j + 1.0); }, 24), M_PI / 4, 1e-15);
}

TEST(AlternatingSums, PairingReportsBudgetInsteadOfTruncating) {
  const PairedSum s = paired_alternating_sum([](std::int64_t j) { return 1.0 / (j + 1.0); }, 1e-6, 10'000'000);
  EXPECT_NEAR(s.value, std::log(2.0), s.error_bound);
  EXPECT_LE(s.error_bound, 1e-6 * std::abs(s.value));
  EXPECT_THROW(paired_alternating_sum([](std::int64_t j) { return std::pow(j + 1.0, -0.18); }, 1e-12, 1'000'000),
               ConvergenceBudgetError);
}

TEST(Bump, ShapeAndIntegral) {
  EXPECT_EQ(bump(0.0), 1.0);
  EXPECT_EQ(bump(1.0), 0.0);
  EXPECT_EQ(bump(-1.0), 0.0);
  EXPECT_EQ(bump(1.5), 0.0);
  EXPECT_EQ(bump_prime(0.0), 0.0);
  EXPECT_NEAR(bump_antiderivative(1.0), 1.0, 1e-15);
  EXPECT_NEAR(bump_antiderivative(0.0), 0.5, 1e-15);
  EXPECT_NEAR(simpson(bump, -1.0, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(bump_prime(0.3), (bump(0.3 + 1e-6) - bump(0.3 - 1e-6)) / 2e-6, 1e-8);
  EXPECT_NEAR(bump_second(-0.4), (bump_prime(-0.4 + 1e-6) - bump_prime(-0.4 - 1e-6)) / 2e-6, 1e-7);
}

TEST(Params, StartIndexMatchesDirectScan) {
  const double g = 0.18;
  int scan = 3;
  while (!(std::pow(scan, -3 * g) + std::pow(scan, -g) < 0.5)) scan += 2;
  EXPECT_EQ(scan, 119);
  EXPECT_EQ(admissible_start_index(g), 119);
  EXPECT_EQ(cx().n0(), 119);
  EXPECT_DOUBLE_EQ(cx().gamma(), 0.18);
  EXPECT_THROW(Counterexample(1.0), std::invalid_argument);
}

TEST(Ell, ValuesAtBumpCentreAndEdges) {
  for (int n : {119, 120, 200, 1000}) {
    EXPECT_NEAR(cx().ell(n), std::pow(n, 0.36), 1e-12 * std::pow(n, 0.36));
    EXPECT_NEAR(cx().ell(n - cx().delta(n)), 1.0, 1e-13);
    EXPECT_NEAR(cx().ell(n + cx().delta(n)), 1.0, 1e-13);
    EXPECT_EQ(cx().drift_b(n), 0.0);
    EXPECT_EQ(cx().drift_b(n + 0.3), 0.0);
    const double d = cx().delta(n);
    EXPECT_NEAR(simpson([](double x) { return cx().ell(x); }, n - d, n + d), 2 * d + d * cx().bump_height(n), 1e-12);
  }
  EXPECT_EQ(cx().drift_b(-3.0), 1.0);
  EXPECT_NEAR(cx().drift_b(0.0), 1.0, 1e-15);
}

TEST(Forcing, TrianglesAlternate) {
  for (int n : {119, 120, 121, 400}) {
    const double sign = n % 2 == 1 ? 1.0 : -1.0;
    const double xc = Counterexample::x_center(n), a = cx().a(n);
    EXPECT_EQ(cx().forcing_f(xc), sign);
    EXPECT_NEAR(simpson([](double x) { return cx().forcing_f(x); }, xc - a, xc + a), sign * a, 1e-12);
    EXPECT_EQ(cx().forcing_f(n), 0.0);
    EXPECT_EQ(cx().ell(xc), 1.0);
  }
  EXPECT_NEAR(cx().forcing_f(-2.0), cx().k() * -2.0 * std::exp(-2.0), 1e-15);
  EXPECT_EQ(cx().forcing_f(10.0), 0.0);
}

// sum_{k>=n} (-1)^{k+1} k^{-0.18}, frozen from an independent high-precision evaluation.
TEST(Tail, FrozenValues) {
  EXPECT_NEAR(cx().R(119), 0.211689774449073273, 1e-15);
  EXPECT_NEAR(cx().R(120), -0.211369818255631902, 1e-15);
  EXPECT_NEAR(cx().R(319), 0.177178161981894077, 1e-15);
  EXPECT_NEAR(cx().tail_R(119).value, cx().R(119), 1e-15);
}

TEST(Tail, BracketSignAndRecursion) {
  for (int n = 119; n < 400; ++n) {
    const double r = cx().R(n);
    EXPECT_LE(cx().a(n) / 2, std::abs(r));
    EXPECT_LE(std::abs(r), cx().a(n - 1) / 2);
    EXPECT_EQ(r > 0, n % 2 == 1);
    const double sign = n % 2 == 1 ? 1.0 : -1.0;
    EXPECT_NEAR(r, sign * cx().a(n) + cx().R(n + 1), 1e-12);
  }
}

TEST(Tail, IntegralOfForcing) {
  for (int n : {119, 150, 151}) {
    EXPECT_NEAR(cx().tail_integral_f(cx().block_start(n)), cx().R(n), 1e-13);
    EXPECT_NEAR(cx().tail_integral_f(n), cx().R(n), 1e-13);
    EXPECT_NEAR(cx().tail_integral_f(Counterexample::x_center(n) - cx().a(n)), cx().R(n), 1e-13);
    EXPECT_NEAR(cx().tail_integral_f(Counterexample::x_center(n) + cx().a(n)), cx().R(n + 1), 1e-13);
  }
  EXPECT_NEAR(cx().tail_integral_f(0.0), cx().R(119), 1e-13);
}

TEST(Solution, BoundedWithGrowingDerivative) {
  EXPECT_EQ(cx().solution_u(0.0), 0.0);
  const double sup = cx().sup_abs_u(1e5);
  EXPECT_TRUE(std::isfinite(sup));
  EXPECT_NEAR(cx().sup_abs_u(5e4), sup, 1e-4);
  for (int n : {119, 200, 500, 2000}) EXPECT_GE(std::abs(cx().u_prime(n)), 0.5 * std::pow(n, 0.18)) << n;
  EXPECT_GT(std::abs(cx().u_prime(2000)), std::abs(cx().u_prime(119)));
}

TEST(Solution, SolvesTheEquation) {
  for (int n : {119, 120, 333}) {
    const double d = cx().delta(n), xc = Counterexample::x_center(n), a = cx().a(n);
    for (double s : {-0.7, -0.1, 0.2, 0.9}) {
      EXPECT_LT(std::abs(cx().ode_residual(n + s * d)), 1e-8) << "bump " << n;
      EXPECT_LT(std::abs(cx().ode_residual(xc + s * a)), 1e-8) << "triangle " << n;
    }
  }
  for (double x : {-5.0, -0.5, 0.25, 0.75, 50.0}) EXPECT_LT(std::abs(cx().ode_residual(x)), 1e-8) << x;
}

TEST(Solution, MatchingConstant) {
  EXPECT_NEAR(cx().matching_integral(), 0.34901743392389978, 1e-12);
  EXPECT_DOUBLE_EQ(cx().k(), 4.0 * cx().matching_integral());
}

TEST(Lemma, AllStepsVerify) {
  const LemmaReport rep = verify_lemma(cx(), 119 + 60, 2e4);
  EXPECT_TRUE(rep.passes()) << "ab " << rep.max_ab_error << " cd " << rep.max_cd_error;
  EXPECT_EQ(rep.blocks.size(), 61u);
  EXPECT_EQ(rep.onset_n1, 16);
  EXPECT_THROW(verify_lemma(cx(), 125, 1e4), std::invalid_argument);
}

TEST(Lemma, OdeOnSamplePoints) {
  const OdeReport rep = verify_ode(cx(), counterexample_sample_points(cx(), 10, 4));
  EXPECT_LT(rep.max_residual, 1e-8);
  EXPECT_LT(rep.max_derivative_mismatch, 1e-4);
  EXPECT_GT(rep.n_points, 100u);
}

TEST(Export, GrowthConstantAndModel) {
  const ExportedConstants k = calibrate_export_constants(cx());
  EXPECT_GT(k.k0, 0.0);
  for (double x = 0.0; x < 600.0; x += 0.0137)
    EXPECT_LE(std::abs(cx().drift_b(x)), k.k0 * (1.0 + std::pow(x, 0.9))) << x;
  const SdeModel m = export_as_sde_model(cx(), k);
  EXPECT_EQ(m.dim, 1);
  EXPECT_EQ(m.nu, 2.0);
  EXPECT_EQ(m.drift(make_vec({-1.0}))[0], 1.0);
}
