#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "belgrad/weight.hpp"

using namespace belgrad;

TEST(Weight, RejectsParametersOutsideTheirRanges) {
  EXPECT_THROW(WeightSpec(0.4, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(WeightSpec(1.1, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(WeightSpec(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(WeightSpec(1.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(weight_f(WeightSpec(1.0, 1.0, 1.0), 0.5), std::domain_error);
}

TEST(Weight, EqualsM0AtOne) {
  for (double g : {0.5, 0.7, 1.0}) EXPECT_DOUBLE_EQ(weight_f(WeightSpec(g, 2.0, 3.0), 1.0), 2.0);
}

TEST(Weight, PowerLawWhenGammaIsOne) {
  const WeightSpec w(1.0, 1.5, 2.5);
  for (double t : {1.0, 2.0, 7.5, 1e4}) EXPECT_NEAR(weight_f(w, t), 1.5 * std::pow(t, 2.5), 1e-13 * 1.5 * std::pow(t, 2.5));
}

TEST(Weight, ExponentialOfRootWhenGammaIsHalf) {
  const WeightSpec w(0.5, 3.0, 1.5);
  for (double t : {1.0, 4.0, 100.0}) {
    const double expected = 3.0 * std::exp(2.0 * 1.5 * (std::sqrt(t) - 1.0));
    EXPECT_NEAR(weight_f(w, t), expected, 1e-12 * expected);
  }
}

TEST(Weight, PotentialExamples) {
  const WeightSpec unit(1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(lyapunov_V(unit, make_vec({0.0, 0.0})), 1.0);
  EXPECT_NEAR(lyapunov_V(WeightSpec(1.0, 1.0, 2.0), make_vec({1.0, 1.0, 1.0})), 16.0, 1e-12);
  EXPECT_EQ(grad_V(unit, make_vec({0.0, 0.0})), make_vec({0.0, 0.0}));
  EXPECT_NEAR(grad_V(unit, make_vec({1.0}))[0], 2.0, 1e-14);
}

TEST(Weight, DerivativeMatchesCentralDifference) {
  for (double g : {0.5, 0.75, 1.0}) {
    const WeightSpec w(g, 1.3, 1.7);
    for (double t = 1.5; t < 200.0; t *= 1.37) {
      const double h = 1e-6 * t;
      const double fd = (weight_f(w, t + h) - weight_f(w, t - h)) / (2.0 * h);
      EXPECT_NEAR(weight_f_prime(w, t), fd, 1e-8 * std::abs(fd)) << "gamma " << g << " t " << t;
    }
  }
}

TEST(Weight, NondecreasingAndBoundedBelow) {
  const WeightSpec w(0.6, 0.8, 1.2);
  double prev = 0.0;
  for (double t = 1.0; t < 1e3; t *= 1.01) {
    const double f = weight_f(w, t);
    EXPECT_GE(f, prev);
    EXPECT_GE(f, 0.8);
    prev = f;
  }
}

TEST(Weight, GradientBoundedByTwiceC0TimesPotential) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n01;
  for (double g : {0.5, 0.8, 1.0}) {
    const WeightSpec w(g, 2.0, 1.5);
    for (int i = 0; i < 2000; ++i) {
      const Vec x = std::exp(3.0 * n01(gen)) * make_vec({n01(gen), n01(gen), n01(gen)});
      EXPECT_LE(grad_V(w, x).stableNorm(), 2.0 * w.c0() * lyapunov_V(w, x));
    }
  }
}

TEST(Weight, FourthPowerIsTheWeightWithScaledConstants) {
  for (double g : {0.5, 0.9, 1.0}) {
    const WeightSpec w(g, 1.4, 1.1);
    const WeightSpec w4(g, std::pow(1.4, 4), 4.0 * 1.1);
    for (double t : {1.0, 2.0, 10.0, 50.0}) {
      const double f4 = std::pow(weight_f(w, t), 4);
      EXPECT_NEAR(weight_f(w4, t), f4, 1e-10 * f4);
    }
  }
}
