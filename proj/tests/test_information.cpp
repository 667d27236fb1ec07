#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spherecover/information.hpp"

using namespace spherecover;

TEST(Units, BitsAndNatsDifferByLog2) {
  EXPECT_DOUBLE_EQ(from_nats(std::numbers::ln2, Units::bits), 1.0);
  EXPECT_DOUBLE_EQ(to_nats(1.0, Units::bits), std::numbers::ln2);
  EXPECT_EQ(parse_units("bits"), Units::bits);
  EXPECT_ANY_THROW(parse_units("hartleys"));
}

TEST(Entropy, KnownValues) {
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  EXPECT_NEAR(entropy(u), std::log(4.0), 1e-15);
  EXPECT_NEAR(binary_entropy(0.5), std::numbers::ln2, 1e-15);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
}

TEST(RelativeEntropy, ZeroOnlyAtEquality) {
  const Distribution p({0.6, 0.4}), q({0.5, 0.5});
  EXPECT_EQ(relative_entropy(p, p).nats(), 0.0);
  EXPECT_NEAR(relative_entropy(p, q).nats(), 0.6 * std::log(1.2) + 0.4 * std::log(0.8), 1e-15);
}

TEST(RelativeEntropy, InfiniteWithoutAbsoluteContinuity) {
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_TRUE(relative_entropy(p, q).is_infinite());
  EXPECT_FALSE(relative_entropy(q, p).is_infinite());
  EXPECT_TRUE((InfoValue(1.0) + InfoValue::infinite()).is_infinite());
}

TEST(MutualInformation, IdentityAndConstantChannels) {
  const std::vector<double> p{0.3, 0.7};
  EXPECT_NEAR(mutual_information(p, Channel(2, 2, {1, 0, 0, 1})).nats(), entropy(p), 1e-15);
  EXPECT_NEAR(mutual_information(p, Channel::constant(2, 2, 1)).nats(), 0.0, 1e-15);
}

TEST(Objective, AddsExpectedLogMass) {
  const std::vector<double> p{0.3, 0.7}, mass{0.5, 2.0};
  const Channel w = Channel::constant(2, 2, 1);
  EXPECT_NEAR(objective(p, w, mass), std::log(2.0), 1e-15);
}
