#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spherecover/errors.hpp"
#include "spherecover/exponent.hpp"

using namespace spherecover;

namespace {

// Reference values from tests/oracles/derive.py.
constexpr double kFig1At062 = 0.00809675658517018;
constexpr double kFig1At0625 = 0.003673740183542114;
constexpr double kHoeffding005Bits = 0.07637368243645398;
constexpr double kMarton052Bits = 0.0030305664619056094;

const Model& fig1() {
  static const Model m = binary_hamming_model(0.4, {0.6, 0.4});
  return m;
}

}  // namespace

TEST(Exponent, BinaryExampleBoundaries) {
  const auto b = regime_boundaries(fig1(), 0.3);
  EXPECT_NEAR(b.r_infinite(), 0.6109, 5e-4);
  EXPECT_NEAR(b.r_zero(), 0.6393, 5e-4);
  EXPECT_LE(b.r_infinite(), b.r_zero());
}

TEST(Exponent, BinaryExampleRegimes) {
  const ExponentSolver s(fig1(), 0.3);
  EXPECT_EQ(s.solve(-0.5).regime, Regime::infinite);
  EXPECT_TRUE(s.solve(-0.5).value().is_infinite());
  EXPECT_FALSE(s.solve(-0.5).minimizer.has_value());
  const auto zero = s.solve(-0.65);
  EXPECT_EQ(zero.regime, Regime::zero);
  EXPECT_EQ(zero.value_nats, 0.0);
  EXPECT_DOUBLE_EQ((*zero.minimizer)[1], 0.4);
}

TEST(Exponent, BinaryExampleFiniteValuesMatchReference) {
  const ExponentSolver s(fig1(), 0.3);
  const auto a = s.solve(-0.62), b = s.solve(-0.625);
  EXPECT_EQ(a.regime, Regime::finite);
  EXPECT_NEAR(a.value_nats, kFig1At062, 1e-6);
  EXPECT_NEAR(b.value_nats, kFig1At0625, 1e-6);
  EXPECT_GE(b.constraint_value, -0.625 - 1e-9);
}

TEST(Exponent, AgreesWithSimplexOracle) {
  const ExponentOracle oracle(fig1(), 0.3, 2000);
  const ExponentSolver s(fig1(), 0.3);
  for (double r : {0.615, 0.62, 0.625, 0.63, 0.635})
    EXPECT_NEAR(s.solve(-r).value_nats, oracle.query(-r), 2e-3) << "r=" << r;
}

TEST(Exponent, TernaryAgreesWithSimplexOracle) {
  const auto ab = Alphabet::numbered(3);
  const auto m = validate_model(ab, ab, {0.5, 0.3, 0.2}, {1.0, 2.0, 0.5}, DistortionMatrix({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
  const double D = 0.4;
  const ExponentSolver s(m, D);
  const ExponentOracle oracle(m, D, 300);
  const auto& b = s.boundaries();
  for (double t : {0.2, 0.5, 0.8}) {
    const double R = b.rate_at_source + t * (b.sup_rate - b.rate_at_source);
    EXPECT_NEAR(s.solve(R).value_nats, oracle.query(R), 1e-3) << "R=" << R;
  }
}

// Larger D lowers R(D;Q,M) for every Q and so shrinks the feasible set: the exponent grows with D.
TEST(Exponent, NonincreasingInRNondecreasingInD) {
  const ExponentSolver s(fig1(), 0.3);
  double previous = std::numeric_limits<double>::infinity();
  for (double r = 0.60; r <= 0.645; r += 0.0025) {
    const double v = s.solve(-r).value_nats;  // R = -r decreasing
    EXPECT_LE(v, previous + 1e-9);
    previous = v;
  }
  previous = 0.0;
  for (double D : {0.25, 0.28, 0.3, 0.32, 0.35}) {
    const double v = exponent(fig1(), -0.63, D).value_nats;
    EXPECT_GE(v, previous - 1e-9) << "D=" << D;
    previous = v;
  }
}

// The maximizing source law lies on a face of the simplex; the supremum must not stop short of it.
TEST(Exponent, SupremumOnSimplexFace) {
  const auto ab = Alphabet::numbered(3);
  const auto m = validate_model(
      ab, ab, {0.21508690173959438, 0.50882804092546186, 0.27608505733494376},
      {0.25807195551846518, 1.5389164823439256, 1.0419413670551581},
      DistortionMatrix({{0, 0.35743163608968831, 0.56868474764381638},
                        {0.92984013675696786, 0, 0.4172372882302377},
                        {0.78429350501511064, 0.73619657718356701, 0}}));
  const ExponentSolver solver(m, 0.3);
  const ExponentOracle grid(m, 0.3, 100);
  EXPECT_GE(solver.boundaries().sup_rate, grid.max_rate() - 1e-9);
  EXPECT_NEAR(solver.boundaries().argmax[0], 0.0, 1e-9);
  EXPECT_TRUE(solver.solve(solver.boundaries().sup_rate + 1e-6).value().is_infinite());
}

TEST(Exponent, OracleInfiniteAboveMaxRate) {
  EXPECT_TRUE(std::isinf(exponent_oracle(fig1(), fig1().r_max() + 0.1, 0.3, 200)));
  EXPECT_EQ(exponent_oracle(fig1(), -0.7, 0.3, 200), 0.0);
}

TEST(Exponent, DOutOfRange) {
  EXPECT_THROW(exponent(fig1(), -0.6, 1.0), Error);
  EXPECT_THROW(exponent(fig1(), -0.6, -0.1), Error);
}

TEST(Exponent, BoundariesAtLargeDistortion) {
  const auto b = regime_boundaries(fig1(), 1.0);
  EXPECT_NEAR(b.r_zero(), -std::log(0.4), 1e-12);
  EXPECT_NEAR(b.r_infinite(), -std::log(0.4), 1e-12);
}

TEST(Hoeffding, MatchesScalarGrid) {
  const auto res = hoeffding_exponent(Distribution({0.5, 0.5}), Distribution({0.2, 0.8}), 0.05 * std::numbers::ln2);
  EXPECT_EQ(res.regime, Regime::finite);
  EXPECT_NEAR(res.value_nats, kHoeffding005Bits, 1e-4);
}

TEST(Hoeffding, PermutationInvariant) {
  const auto a = hoeffding_exponent(Distribution({0.2, 0.3, 0.5}), Distribution({0.5, 0.3, 0.2}), 0.1);
  const auto b = hoeffding_exponent(Distribution({0.5, 0.2, 0.3}), Distribution({0.2, 0.5, 0.3}), 0.1);
  EXPECT_NEAR(a.value_nats, b.value_nats, 1e-6);
}

TEST(Hoeffding, LimitsOfTheRange) {
  const Distribution p0({0.5, 0.5}), p1({0.2, 0.8});
  const double limit = relative_entropy(p1, p0).nats();
  EXPECT_LT(hoeffding_exponent(p0, p1, limit * 0.999).value_nats, 1e-4);
  EXPECT_NEAR(hoeffding_exponent(p0, p1, 1e-6).value_nats, relative_entropy(p0, p1).nats(), 5e-3);
  EXPECT_THROW(hoeffding_exponent(p0, p1, limit), Error);
  EXPECT_THROW(hoeffding_exponent(p0, p1, 0.0), Error);
}

TEST(Marton, ScalarOracleAndRegimes) {
  const Distribution p({0.4, 0.6});
  const auto ham = DistortionMatrix::hamming(2);
  const auto fin = marton_exponent(p, ham, 0.52 * std::numbers::ln2, 0.1);
  EXPECT_EQ(fin.regime, Regime::finite);
  EXPECT_NEAR(fin.value_nats, kMarton052Bits, 1e-4);
  // 0.6 bits exceeds 1 - h(0.1) ~ 0.531 bits: no source law reaches it.
  EXPECT_EQ(marton_exponent(p, ham, 0.6 * std::numbers::ln2, 0.1).regime, Regime::infinite);
  EXPECT_EQ(marton_exponent(p, ham, std::numbers::ln2, 0.1).regime, Regime::infinite);
  EXPECT_EQ(marton_exponent(p, ham, 0.1, 0.1).regime, Regime::zero);
  EXPECT_THROW(marton_exponent(p, ham, -0.1, 0.1), Error);
}

TEST(Concentration, BinaryExampleRegimes) {
  const Distribution p({0.6, 0.4});
  const auto ham = DistortionMatrix::hamming(2);
  EXPECT_EQ(concentration_exponent(p, ham, 0.5, 0.3).regime, Regime::infinite);
  EXPECT_EQ(concentration_exponent(p, ham, 0.7, 0.3).regime, Regime::zero);
  const auto mid = concentration_exponent(p, ham, 0.62, 0.3);
  EXPECT_EQ(mid.regime, Regime::finite);
  EXPECT_NEAR(mid.value_nats, kFig1At062, 1e-6);
}

TEST(Concentration, DominatesClassicalBound) {
  const Distribution p({0.6, 0.4});
  const auto ham = DistortionMatrix::hamming(2);
  for (double D : {0.2, 0.3})
    for (double r : {0.005, 0.01, 0.02}) {
      const double classical = talagrand_bound(r, D);
      if (classical <= 0.0) continue;
      const auto res = concentration_exponent(p, ham, r, D);
      if (res.regime == Regime::infinite) continue;
      EXPECT_GE(res.value_nats, classical);
    }
}

TEST(Talagrand, Values) {
  EXPECT_NEAR(talagrand_bound(0.0, 0.3), 0.045, 1e-15);
  EXPECT_NEAR(talagrand_bound(0.045, 0.3), 0.0, 1e-15);
  EXPECT_NEAR(talagrand_bound(0.1, 0.0), -0.1, 1e-15);
}

TEST(ExponentCurve, BoundaryFlagNearRegimeChange) {
  const ExponentSolver s(fig1(), 0.3);
  const double r0 = s.boundaries().r_zero();
  EXPECT_TRUE(s.solve(-(r0 + 1e-8)).boundary);
  EXPECT_FALSE(s.solve(-0.625).boundary);
  const std::vector<double> grid{0.5, 0.625, 0.7};
  const auto curve = exponent_curve(fig1(), 0.3, grid, true);
  ASSERT_EQ(curve.samples.size(), 3u);
  EXPECT_EQ(curve.samples[0].result.regime, Regime::infinite);
  EXPECT_EQ(curve.samples[2].result.regime, Regime::zero);
}
