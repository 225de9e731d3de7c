#include <gtest/gtest.h>

#include <cmath>

#include "belgrad/fixtures.hpp"
#include "belgrad/model.hpp"
#include "helpers.hpp"

using namespace belgrad;
using belgrad::testing::line_grid;
using belgrad::testing::scalar_model;

TEST(Model, ValidateRejectsMalformedModels) {
  SdeModel m = ou_fixture().model;
  EXPECT_NO_THROW(validate(m));
  SdeModel bad = m;
  bad.nu = 0.0;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.dim = kMaxDim + 1;
  EXPECT_THROW(validate(bad), std::invalid_argument);
  bad = m;
  bad.drift = nullptr;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}

TEST(Model, DirectionSetIsUnitAndDeterministic) {
  for (int d = 1; d <= kMaxDim; ++d) {
    const auto dirs = direction_set(d);
    ASSERT_EQ(dirs.size(), static_cast<std::size_t>(2 * d + 16));
    for (const Vec& h : dirs) EXPECT_NEAR(h.norm(), 1.0, 1e-15);
    EXPECT_EQ(dirs, direction_set(d));
  }
}

TEST(Model, SinsqFixturePasses) {
  const Fixture fx = sinsq_fixture();
  const auto rep = check_hypotheses(fx.model, audit_grid(1, 50.0, 2000, 500));
  EXPECT_TRUE(rep.passes()) << rep.h1_max_residual << " " << rep.h2_max_residual << " " << rep.h3_min_eigenvalue;
}

// 2|b'(x)| peaks near 2 + 4x^2 while f = 2t gives V = 2 + 2x^2; at x^2 = pi, 4 pi > 2 + 2 pi.
TEST(Model, SinsqWithWeightTwoTFailsH2) {
  SdeModel m = sinsq_fixture().model;
  m.weight = WeightSpec(1.0, 2.0, 1.0);
  const auto rep = check_hypotheses(m, line_grid(0.0, 3.0, 3000));
  EXPECT_GT(rep.h2_max_residual, 0.1);
}

TEST(Model, BrownianNeedsLAboveEightyOneOverThirtyTwo) {
  // sup over u = x^2 of (1 + 9u) / (1 + u)^2 is 81/32, attained at u = 7/9.
  const auto grid = line_grid(-20.0, 20.0, 40000);
  auto model_with_L = [](double L) {
    return scalar_model([](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, WeightSpec(1.0, 1.0, 1.0), L);
  };
  EXPECT_FALSE(check_hypotheses(model_with_L(1.0), grid).passes());
  EXPECT_FALSE(check_hypotheses(model_with_L(2.5), grid).passes());
  EXPECT_TRUE(check_hypotheses(model_with_L(81.0 / 32.0), grid).passes());
  EXPECT_NEAR(h1_lhs(model_with_L(1.0), make_vec({std::sqrt(7.0 / 9.0)})) / (1.0 + 7.0 / 9.0), 81.0 / 32.0, 1e-12);
}

TEST(Model, CubicDriftFailsH1) {
  const SdeModel m = scalar_model([](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }, 1.0,
                                  WeightSpec(1.0, 1.0, 1.0), 100.0);
  const auto rep = check_hypotheses(m, line_grid(-50.0, 50.0, 1000));
  EXPECT_GT(rep.h1_max_residual, 1.0);
  EXPECT_GT(std::abs(rep.worst_point[0]), 5.0);
}

TEST(Model, FiniteDifferenceJacobiansMatchAnalytic) {
  const SdeModel exact = sinsq_fixture().model;
  const SdeModel fd = with_finite_difference_jacobians(exact);
  for (double x : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    const Vec p = make_vec({x});
    EXPECT_NEAR(fd.drift_jacobian(p)(0, 0), exact.drift_jacobian(p)(0, 0), 1e-7 * (1.0 + x * x * x * x));
  }
  const SdeModel bm = with_finite_difference_jacobians(brownian_fixture().model);
  const auto dsig = bm.diffusion_jacobians(make_vec({0.3, -1.0}));
  for (int i = 0; i < 2; ++i) EXPECT_LT(dsig[i].norm(), 1e-12);
}

TEST(Model, AllFixturesPassTheirAudits) {
  for (const std::string& name : fixture_names()) {
    const Fixture fx = fixture_by_name(name);
    std::vector<Vec> grid = audit_grid(fx.model.dim, fx.audit_radius, 200, 500);
    grid.insert(grid.end(), fx.extra_audit_points.begin(), fx.extra_audit_points.end());
    const auto rep = check_hypotheses(fx.model, grid);
    EXPECT_TRUE(rep.passes()) << name;
    EXPECT_EQ(rep.n_points, static_cast<int>(grid.size()));
  }
  EXPECT_THROW(fixture_by_name("nope"), std::invalid_argument);
}

TEST(Model, OuClosedFormDerivative) {
  for (double x : {-1.0, 0.0, 0.5, 2.0}) {
    const double h = 1e-6;
    const double fd = (ou_cos_mean(1.3, 0.5, x + h) - ou_cos_mean(1.3, 0.5, x - h)) / (2.0 * h);
    EXPECT_NEAR(ou_cos_gradient(1.3, 0.5, x), fd, 1e-8);
  }
}
