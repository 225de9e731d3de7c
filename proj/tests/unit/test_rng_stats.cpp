#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "belgrad/parallel.hpp"
#include "belgrad/rng.hpp"
#include "belgrad/stats.hpp"

using namespace belgrad;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, KeysDifferByTag) {
  EXPECT_NE(derive_key(1, StreamTag::kPaths), derive_key(1, StreamTag::kInnerPaths));
  EXPECT_NE(derive_key(1, StreamTag::kPaths), derive_key(2, StreamTag::kPaths));
  EXPECT_EQ(derive_key(7, StreamTag::kDirections), derive_key(7, StreamTag::kDirections));
}

TEST(NormalStream, ReproducibleAndStreamSeparated) {
  const auto key = derive_key(99, StreamTag::kPaths);
  NormalStream a(key, 5), b(key, 5), c(key, 6);
  for (int i = 0; i < 100; ++i) {
    const double va = a.next();
    EXPECT_EQ(va, b.next());
    EXPECT_NE(va, c.next());
  }
}

TEST(NormalStream, FirstMoments) {
  NormalStream s(derive_key(1, StreamTag::kPaths), 0);
  const int n = 400000;
  std::vector<double> x(n);
  for (double& v : x) v = s.next();
  const Estimate mean = estimate_from_samples(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    m2 += v * v;
    m4 += v * v * v * v;
  }
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(mean.value, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(NormalStream, UniformInOpenInterval) {
  NormalStream s(derive_key(4, StreamTag::kAuditPoints), 1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / 100000));
}

TEST(CompensatedSum, RecoversCancelledLowBits) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Estimate, MatchesTwoPassOracle) {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0};
  const Estimate e = estimate_from_samples(x);
  // mean 6.2, sample variance 37.2
  EXPECT_NEAR(e.value, 6.2, 1e-15);
  EXPECT_NEAR(e.stderr(), std::sqrt(37.2 / 5.0), 1e-14);
  EXPECT_EQ(e.n_paths, 5u);
}

TEST(Estimate, ConstantSamplesHaveZeroStderr) {
  const std::vector<double> x(1000, 0.1);
  const Estimate e = estimate_from_samples(x);
  EXPECT_NEAR(e.value, 0.1, 1e-16);
  EXPECT_EQ(e.stderr(), 0.0);
}

TEST(Estimate, AgreementUsesCombinedStderr) {
  const Estimate a{1.0, 0.3, 10}, b{2.0, 0.4, 10};
  EXPECT_DOUBLE_EQ(combined_stderr(a, b), 0.5);
  EXPECT_TRUE(agree_within(a, b, 2.0));
  EXPECT_FALSE(agree_within(a, b, 1.9));
}

TEST(ForEachIndex, ReportsSmallestFailingIndex) {
  for (bool parallel : {false, true}) {
    try {
      for_each_index(100, 3, parallel, [](std::size_t k) {
        if (k % 7 == 3) throw std::runtime_error(std::to_string(k));
      });
      FAIL() << "no exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "3");
    }
  }
}
