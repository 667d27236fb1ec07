#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spherecover/errors.hpp"
#include "spherecover/information.hpp"
#include "spherecover/rate.hpp"

using namespace spherecover;

namespace {

// Reference values from tests/oracles/derive.py (generic conic solver).
constexpr double kFig1Rate = -0.6393229086253424;
constexpr double kTernaryRate = 0.011338769101666257;
constexpr double kRectRate005 = 0.1464298987963637;
constexpr double kRectRate02 = -0.22745279614076305;
constexpr double kFaceSourceRate = 0.5139044043822415;

Model ternary() {
  const auto ab = Alphabet::numbered(3);
  return validate_model(ab, ab, {0.5, 0.3, 0.2}, {1.0, 2.0, 0.5}, DistortionMatrix({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
}

Model rectangular() {
  return validate_model(Alphabet({"a", "b", "c"}), Alphabet({"a", "b"}), {0.3, 0.3, 0.4}, {1.0, 0.5},
                        DistortionMatrix({{0, 1}, {1, 0}, {0, 0.5}}));
}

Model random_model(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(k), m(k);
  for (auto& v : p) v = u(rng);
  for (auto& v : m) v = u(rng) * 2.0;
  double s = 0;
  for (double v : p) s += v;
  for (auto& v : p) v /= s;
  std::vector<std::vector<double>> rho(k, std::vector<double>(k));
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y) rho[x][y] = x == y ? 0.0 : u(rng);
  const auto ab = Alphabet::numbered(k);
  return validate_model(ab, ab, p, m, DistortionMatrix(rho));
}

}  // namespace

TEST(Rate, BinaryExampleMatchesConicSolver) {
  const auto pt = rate(binary_hamming_model(0.4, {0.6, 0.4}), 0.3);
  EXPECT_NEAR(pt.rate_nats, kFig1Rate, 1e-9);
  EXPECT_LE(pt.achieved_distortion, 0.3 + 1e-9);
  EXPECT_GT(pt.lambda, 0.0);
}

TEST(Rate, TernaryAndRectangularMatchConicSolver) {
  EXPECT_NEAR(rate(ternary(), 0.4).rate_nats, kTernaryRate, 1e-7);
  EXPECT_NEAR(rate(rectangular(), 0.05).rate_nats, kRectRate005, 1e-7);
  EXPECT_NEAR(rate(rectangular(), 0.2).rate_nats, kRectRate02, 1e-7);
}

TEST(Rate, ShannonClosedFormWithCountingMass) {
  const auto m = binary_hamming_model(0.6, {1.0, 1.0});
  for (double D : {0.05, 0.1, 0.2, 0.35})
    EXPECT_NEAR(rate(m, D).rate_nats, binary_entropy(0.4) - binary_entropy(D), 1e-9) << "D=" << D;
  // At and beyond min(p, 1-p) the rate is zero.
  EXPECT_NEAR(rate(m, 0.4).rate_nats, 0.0, 1e-12);
  EXPECT_NEAR(rate(m, 0.45).rate_nats, 0.0, 1e-12);
}

TEST(Rate, ZeroDistortionGivesMinusRelativeEntropy) {
  const Distribution p0({0.2, 0.3, 0.5}), p1({0.5, 0.3, 0.2});
  const auto ab = Alphabet::numbered(3);
  const auto m = validate_model(ab, ab, {0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}, DistortionMatrix::hamming(3));
  EXPECT_NEAR(rate_at_zero(m).rate_nats, -relative_entropy(p1, p0).nats(), 1e-12);
  EXPECT_NEAR(rate(m, 0.0).rate_nats, -relative_entropy(p1, p0).nats(), 1e-12);
}

TEST(Rate, SaturatesAtMinimumLogMass) {
  const auto m = ternary();
  const double d0 = saturation_distortion(m, m.P().values());
  EXPECT_NEAR(rate(m, d0).rate_nats, std::log(0.5), 1e-12);
  EXPECT_NEAR(rate(m, m.d_max()).rate_nats, std::log(0.5), 1e-12);
  EXPECT_GT(rate(m, 0.9 * d0).rate_nats, std::log(0.5));
}

TEST(Rate, CurveIsNonincreasingAndConvex) {
  const auto m = ternary();
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.05 * i);
  const auto curve = rate_curve(m, grid);
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    EXPECT_LE(curve.points[i].rate_nats, curve.points[i - 1].rate_nats + 1e-12);
  for (std::size_t i = 1; i + 1 < curve.points.size(); ++i)
    EXPECT_LE(curve.points[i].rate_nats,
              0.5 * (curve.points[i - 1].rate_nats + curve.points[i + 1].rate_nats) + 1e-9);
}

TEST(Rate, PotentialReproducesRate) {
  // sum_x P(x) phi(x) - lambda D equals the rate at an interior point.
  const auto m = ternary();
  const auto pt = rate(m, 0.4);
  double s = -pt.lambda * 0.4;
  for (std::size_t x = 0; x < 3; ++x) s += m.P()[x] * pt.source_potential[x];
  EXPECT_NEAR(s, pt.rate_nats, 1e-9);
}

TEST(Rate, SourceWithZerosIsAllowed) {
  const auto m = ternary();
  const std::vector<double> q{0.0, 0.4, 0.6};
  const auto pt = rate_for_source(m, q, 0.2);
  EXPECT_TRUE(std::isfinite(pt.rate_nats));
  EXPECT_NEAR(pt.rate_nats, rate_oracle_for_source(m, q, 0.2, 60), 1e-3);
}

// The optimal output law sits at a vertex with a second letter marginally optimal, where the
// improvement per step is below the resolution of the dual objective.
TEST(Rate, FaceSourceWithVertexOutputConverges) {
  const auto ab = Alphabet::numbered(3);
  const auto m = validate_model(ab, ab, {0.8425794868648967, 0.072424614463488926, 0.084995898671614431},
                                {1.2236372009673586, 0.570943259468641, 1.9967469288812856}, DistortionMatrix::hamming(3));
  const std::vector<double> q{0.3140219827033352, 0.0, 0.68597801729666485};
  EXPECT_NEAR(rate_for_source(m, q, 0.3).rate_nats, kFaceSourceRate, 1e-9);
}

TEST(Rate, AgreesWithMeshOracleOnRandomModels) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const auto m = random_model(rng, trial < 4 ? 2 : 3);
    for (double D : {0.1, 0.3}) {
      const double solved = rate(m, D).rate_nats;
      const double oracle = rate_oracle(m, D, m.source_size() == 2 ? 200 : 60);
      EXPECT_LE(solved, oracle + 1e-9);  // the oracle is an upper bound
      EXPECT_NEAR(solved, oracle, 1e-3) << "trial " << trial << " D " << D;
    }
  }
}

TEST(Rate, RejectsNegativeDistortion) {
  EXPECT_THROW(rate(ternary(), -0.1), Error);
}

TEST(RateOracle, CapsInstanceSize) {
  const auto ab = Alphabet::numbered(4);
  const auto m = validate_model(ab, ab, {0.25, 0.25, 0.25, 0.25}, {1, 1, 1, 1}, DistortionMatrix::hamming(4));
  try {
    rate_oracle(m, 0.1, 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cap_exceeded);
  }
}
