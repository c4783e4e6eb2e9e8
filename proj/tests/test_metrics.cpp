#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "airtime/metrics.hpp"

using namespace airtime::metrics;

namespace {
double
jain(std::vector<double> v)
{
  return jain_index(v);
}
} // namespace

TEST(Jain, PerfectFairness) { EXPECT_DOUBLE_EQ(jain({1, 1, 1}), 1.0); }
TEST(Jain, OneTakesAll) { EXPECT_DOUBLE_EQ(jain({1, 0, 0}), 1.0 / 3); }
// Frozen: 1 / (3 * 0.6462).
TEST(Jain, FifoShares) { EXPECT_NEAR(jain({0.10, 0.11, 0.79}), 0.515836, 1e-6); }
TEST(Jain, ScaleInvariant) { EXPECT_DOUBLE_EQ(jain({2, 4, 6}), jain({1, 2, 3})); }

TEST(Jain, RejectsDegenerate)
{
  EXPECT_THROW(jain({}), std::domain_error);
  EXPECT_THROW(jain({0, 0}), std::domain_error);
  EXPECT_THROW(jain({1, -1}), std::domain_error);
}

TEST(Percentile, Interpolates)
{
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({5, 1, 3}, 50), 3);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0), 1);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 100), 4);
  EXPECT_TRUE(std::isnan(percentile({}, 50)));
  EXPECT_DOUBLE_EQ(median({7}), 7);
}
