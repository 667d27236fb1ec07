#include <gtest/gtest.h>

#include <cmath>

#include "spherecover/covering.hpp"
#include "spherecover/errors.hpp"
#include "spherecover/rate.hpp"

using namespace spherecover;

namespace {

// Reference values from tests/oracles/derive.py (brute-force enumeration).
constexpr double kBlowupN4 = 0.34559999999999996;
constexpr double kExhaustiveN3 = 0.3520000000000001;

Model counting_binary() { return binary_hamming_model(0.6, {1.0, 1.0}); }  // P = (0.4, 0.6)
const Model& fig1() {
  static const Model m = binary_hamming_model(0.4, {0.6, 0.4});
  return m;
}

Codebook all_strings(const Model& m, std::size_t n) {
  Codebook book(m, n);
  for (std::uint64_t i = 0; i < (1u << n); ++i) {
    Word w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = static_cast<Symbol>((i >> k) & 1u);
    book.add(w);
  }
  return book;
}

}  // namespace

TEST(Codebook, MassTrackedAndDistinct) {
  const auto m = fig1();
  Codebook book(m, 3);
  EXPECT_TRUE(std::isinf(book.mass_log()));
  EXPECT_TRUE(book.add({0, 0, 1}));
  EXPECT_FALSE(book.add({0, 0, 1}));
  EXPECT_TRUE(book.add({1, 1, 1}));
  const double expected = std::log(0.6 * 0.6 * 0.4 + 0.4 * 0.4 * 0.4) / 3.0;
  EXPECT_NEAR(book.mass_log(), expected, 1e-12);
  EXPECT_NEAR(book.recompute_mass_log(), book.mass_log(), 1e-12);
  EXPECT_THROW(book.add({0, 1}), Error);
  EXPECT_EQ(book.hash().size(), 16u);
}

TEST(Blowup, FullCodebookCoversEverything) {
  const auto m = fig1();
  EXPECT_EQ(blowup_error(m, all_strings(m, 6), 0.0).error_prob, 0.0);
  EXPECT_TRUE(std::isinf(blowup_error(m, all_strings(m, 6), 0.0).empirical_exponent));
}

TEST(Blowup, SinglePointBall) {
  const auto m = fig1();
  Codebook book(m, 5);
  book.add({0, 1, 0, 0, 1});
  const double atom = std::pow(0.6, 3) * std::pow(0.4, 2);
  EXPECT_NEAR(blowup_error(m, book, 0.0).error_prob, 1.0 - atom, 1e-15);
}

TEST(Blowup, TwoCodewordsMatchesEnumeration) {
  const auto m = counting_binary();
  Codebook book(m, 4);
  book.add({0, 0, 0, 0});
  book.add({1, 1, 1, 1});
  EXPECT_NEAR(blowup_error(m, book, 0.25).error_prob, kBlowupN4, 1e-15);
}

TEST(Blowup, MonotoneInDistortionAndCodebook) {
  const auto m = fig1();
  Codebook book(m, 8);
  book.add({0, 0, 0, 0, 0, 0, 0, 0});
  double previous = 2.0;
  for (double D : {0.0, 0.125, 0.25, 0.375, 0.5}) {
    const double e = blowup_error(m, book, D).error_prob;
    EXPECT_LE(e, previous);
    previous = e;
  }
  const double before = blowup_error(m, book, 0.25).error_prob;
  const double mass_before = book.mass_log();
  book.add({1, 1, 1, 1, 0, 0, 0, 0});
  EXPECT_LE(blowup_error(m, book, 0.25).error_prob, before);
  EXPECT_GE(book.mass_log(), mass_before);
  EXPECT_EQ(blowup_error(m, book, m.d_max()).error_prob, 0.0);
}

TEST(Blowup, SerialAndParallelAgree) {
  const auto m = fig1();
  const auto book = type_covering_codebook(m, 12, -0.62, 0.3, 5);
  CoverOptions serial;
  serial.parallel = false;
  EXPECT_NEAR(blowup_error(m, book, 0.3).error_prob, blowup_error(m, book, 0.3, serial).error_prob, 1e-15);
}

TEST(Blowup, EnumerationCap) {
  const auto m = fig1();
  Codebook book(m, 22);
  book.add(Word(22, 0));
  try {
    blowup_error(m, book, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cap_exceeded);
  }
}

TEST(Exhaustive, CapFourStringsAtZeroDistortion) {
  const auto res = exhaustive_optimum(counting_binary(), 3, std::log(4.0) / 3.0, 0.0);
  EXPECT_NEAR(res.report.error_prob, kExhaustiveN3, 1e-12);
  EXPECT_EQ(res.codebook.size(), 4u);
}

TEST(Exhaustive, ExtremeBudgets) {
  const auto m = counting_binary();
  EXPECT_EQ(exhaustive_optimum(m, 3, std::log(2.0), 0.0).report.error_prob, 0.0);
  const auto empty = exhaustive_optimum(m, 3, -1.0, 0.0);
  EXPECT_EQ(empty.report.error_prob, 1.0);
  EXPECT_TRUE(empty.codebook.empty());
  EXPECT_THROW(exhaustive_optimum(m, 5, 0.1, 0.0), Error);
}

TEST(Exhaustive, NeverWorseThanHeuristics) {
  const auto& m = fig1();
  const double R = -0.55, D = 0.25;
  const double best = exhaustive_optimum(m, 4, R, D).report.error_prob;
  EXPECT_LE(best, blowup_error(m, greedy_codebook(m, 4, R, D), D).error_prob + 1e-15);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto book = type_covering_codebook(m, 4, R, D, seed);
    EXPECT_LE(best, blowup_error(m, book, D).error_prob + 1e-15);
  }
}

TEST(TypeCovering, DeterministicAndWithinBudget) {
  const auto& m = fig1();
  const auto a = type_covering_codebook(m, 12, -0.625, 0.3, 7);
  const auto b = type_covering_codebook(m, 12, -0.625, 0.3, 7);
  EXPECT_EQ(a.strings(), b.strings());
  EXPECT_GE(a.size(), 1u);
  EXPECT_LE(a.mass_log(), -0.625 + 1e-12);
  const auto c = type_covering_codebook(m, 12, -0.625, 0.3, 8);
  EXPECT_NE(a.hash(), c.hash());
  const double e = blowup_error(m, a, 0.3).error_prob;
  EXPECT_GT(e, 0.0);
  EXPECT_LT(e, 1.0);
}

TEST(TypeCovering, CodewordsAreTypical) {
  const auto& m = fig1();
  const auto target = rate(m, 0.3).output_law;
  const std::size_t n = 14;
  const auto book = type_covering_codebook(m, n, -0.6, 0.3, 3);
  for (const auto& w : book.strings()) {
    double ones = 0;
    for (Symbol s : w) ones += s;
    EXPECT_LE(std::abs(ones / n - target[1]), 1.0 / std::sqrt(static_cast<double>(n)) + 1e-12);
  }
}

TEST(TypeCovering, StarvationIsReported) {
  TypeCoveringOptions tight;
  tight.typicality_constant = 1e-9;
  try {
    type_covering_codebook(fig1(), 7, -0.6, 0.3, 1, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergence);
    EXPECT_NE(std::string(e.what()).find("starved"), std::string::npos);
  }
}

TEST(Sweep, ReproducibleAndFitted) {
  const std::vector<std::size_t> ns{6, 8, 10};
  const auto a = empirical_exponent_sweep(fig1(), ns, -0.6, 0.3, 1, 42);
  const auto b = empirical_exponent_sweep(fig1(), ns, -0.6, 0.3, 1, 42);
  ASSERT_EQ(a.reports.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.reports[i].error_prob, b.reports[i].error_prob);
    EXPECT_EQ(a.reports[i].seed, b.reports[i].seed);
  }
  EXPECT_EQ(a.slope, b.slope);
  const auto best = empirical_exponent_sweep(fig1(), ns, -0.6, 0.3, 5, 42);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(best.reports[i].error_prob, a.reports[i].error_prob);
}

TEST(Universality, SameCodebookUnderEachSource) {
  const auto& m = fig1();
  const auto book = type_covering_codebook(m, 10, -0.62, 0.3, 9);
  const std::vector<Distribution> one{m.P()};
  const auto single = universality_check(m, book, 0.3, one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].error_prob, blowup_error(m, book, 0.3).error_prob);
  const std::vector<Distribution> two{m.P(), Distribution::uniform(2)};
  const auto both = universality_check(m, book, 0.3, two);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].error_prob, single[0].error_prob);
  EXPECT_NE(both[1].error_prob, both[0].error_prob);
}

TEST(Greedy, RespectsBudget) {
  const auto& m = fig1();
  const auto book = greedy_codebook(m, 10, -0.62, 0.3);
  EXPECT_LE(book.mass_log(), -0.62 + 1e-12);
  EXPECT_GE(book.size(), 1u);
}
