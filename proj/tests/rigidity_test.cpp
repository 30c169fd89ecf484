#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "equator/exact.hpp"
#include "equator/rigidity.hpp"

namespace {

using namespace equator;
using namespace equator::rigidity;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

constexpr double kPiRef = std::numbers::pi;

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Exact oracle: multiply the factors (2k)^2/((2k-1)(2k+1)) as rationals.
cpp_rational wallis_by_factors(unsigned m) {
  cpp_rational acc = 1;
  for (unsigned k = 1; k <= m; ++k) {
    acc *= cpp_rational(cpp_int(4) * k * k, cpp_int(2 * k - 1) * (2 * k + 1));
  }
  return acc;
}

cpp_int brute_double_factorial(unsigned n) {
  cpp_int acc = 1;
  for (unsigned k = n; k > 1; k -= 2) acc *= k;
  return acc;
}

TEST(WallisPartial, Examples) {
  const auto w0 = wallis_partial(0);
  EXPECT_EQ(w0.numerator, 1);
  EXPECT_EQ(w0.denominator, 1);
  EXPECT_TRUE(w0.factors.empty());

  const auto w1 = wallis_partial(1);
  EXPECT_EQ(w1.numerator, 4);
  EXPECT_EQ(w1.denominator, 3);

  // (4/3)(16/15)(36/35) = 2304/1575 = 256/175.
  const auto w3 = wallis_partial(3);
  EXPECT_EQ(w3.numerator, 256);
  EXPECT_EQ(w3.denominator, 175);
  ASSERT_EQ(w3.factors.size(), 3u);
  EXPECT_EQ(w3.factors[2].numerator, 36u);
  EXPECT_EQ(w3.factors[2].denominator, 35u);
}

TEST(WallisPartial, MatchesFactorProductAndDoubleFactorials) {
  for (unsigned m = 0; m <= 60; ++m) {
    const auto w = wallis_partial(m);
    const cpp_rational oracle = wallis_by_factors(m);
    EXPECT_EQ(w.numerator, numerator(oracle)) << m;
    EXPECT_EQ(w.denominator, denominator(oracle)) << m;
    EXPECT_EQ(gcd(w.numerator, w.denominator), 1) << m;
    // ((2m)!!)^2 / ((2m-1)!! (2m+1)!!), cross-multiplied.
    const cpp_int even = brute_double_factorial(2 * m);
    const cpp_int odd_lo = m == 0 ? cpp_int(1) : brute_double_factorial(2 * m - 1);
    const cpp_int odd_hi = brute_double_factorial(2 * m + 1);
    EXPECT_EQ(w.numerator * odd_lo * odd_hi, w.denominator * even * even) << m;
  }
}

TEST(WallisPartial, LowestTermsAtLargerM) {
  for (unsigned m : {127u, 500u, 1024u}) {
    const auto w = wallis_partial(m);
    EXPECT_EQ(gcd(w.numerator, w.denominator), 1);
    const cpp_rational oracle = wallis_by_factors(m);
    EXPECT_EQ(w.numerator, numerator(oracle));
    EXPECT_EQ(w.denominator, denominator(oracle));
  }
}

TEST(WallisPartial, FactorsExceedOneAndStayBelowHalfPi) {
  WallisSequence seq;
  for (unsigned m = 1; m <= 2000; ++m) {
    EXPECT_TRUE(wallis_factor(m).exceeds_one());
    seq.advance();
    EXPECT_TRUE(seq.twice_below_pi()) << m;
  }
}

TEST(WallisPartial, CapRaisesResourceError) {
  EXPECT_THROW(wallis_partial(11, 10), ResourceError);
  EXPECT_NO_THROW(wallis_partial(10, 10));
}

TEST(ToDoubleNearest, MatchesHardwareDivisionForSmallOperands) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20000; ++i) {
    // Both operands exactly representable, so IEEE division is the oracle.
    const std::uint64_t a = (rng() >> 12) | 1;
    const std::uint64_t b = (rng() >> 12) | 1;
    EXPECT_EQ(exact::to_double_nearest(a, b),
              static_cast<double>(a) / static_cast<double>(b));
  }
}

TEST(ToDoubleNearest, TiesRoundToEven) {
  const cpp_int two53 = cpp_int(1) << 53;
  // 2^53 + 1 is halfway between 2^53 and 2^53 + 2: rounds down to even.
  EXPECT_EQ(exact::to_double_nearest(two53 + 1, 1), 9007199254740992.0);
  // 2^53 + 3 is halfway between 2^53 + 2 and 2^53 + 4: rounds up to even.
  EXPECT_EQ(exact::to_double_nearest(two53 + 3, 1), 9007199254740996.0);
  // Just above the tie rounds up.
  EXPECT_EQ(exact::to_double_nearest((two53 + 1) * 4 + 1, 4), 9007199254740994.0);
  EXPECT_EQ(exact::to_double_nearest(1, 3), 1.0 / 3.0);
  EXPECT_EQ(exact::to_double_nearest(0, 3), 0.0);
  EXPECT_THROW(exact::to_double_nearest(1, 0), DomainError);
}

TEST(RigidityProduct, Examples) {
  EXPECT_NEAR(rigidity_product(0), 0.6366197724, 1e-10);
  EXPECT_NEAR(rigidity_product(1), 8.0 / (3.0 * kPiRef), 1e-15);
  EXPECT_NEAR(rigidity_quadrature(1), rigidity_product(1), 1e-12);
  const double r10 = rigidity_product(10);
  EXPECT_GT(r10, 0.97);
  EXPECT_LT(r10, 0.98);
  EXPECT_NEAR(r10, 0.9765625, 2e-4);
  // Pinned from a 50-digit Gamma evaluation.
  EXPECT_NEAR(r10, 0.97648044953827354, 1e-15);
}

TEST(RigidityGamma, Examples) {
  EXPECT_NEAR(rigidity_gamma(0), 2.0 / kPiRef, 1e-16);
  // 1 / ((sqrt(pi)/2)(3 sqrt(pi)/4)) = 8 / (3 pi).
  EXPECT_NEAR(rigidity_gamma(1), 8.0 / (3.0 * kPiRef), 1e-15);
  EXPECT_LE(rel_diff(rigidity_gamma(500), rigidity_product(500)), 1e-12);
  EXPECT_TRUE(std::isfinite(rigidity_gamma(1'000'000)));
}

TEST(RigidityGamma, MatchesProductUpToOneThousand) {
  for (unsigned m = 0; m <= 1000; m += (m < 60 ? 1 : 37)) {
    EXPECT_LE(rel_diff(rigidity_gamma(m), rigidity_product(m)), 1e-12) << m;
  }
}

TEST(RigidityQuadrature, Examples) {
  EXPECT_NEAR(rigidity_quadrature(0, 1e-12), 2.0 / kPiRef, 1e-10);
  EXPECT_NEAR(rigidity_quadrature(2, 1e-12), 128.0 / (45.0 * kPiRef), 1e-12);
  EXPECT_NEAR(rigidity_quadrature(200, 1e-12), rigidity_gamma(200), 1e-9);
}

TEST(RigidityRoutes, SpreadAtMostOneEMinusTen) {
  std::vector<unsigned> ms;
  for (unsigned m = 0; m <= 50; ++m) ms.push_back(m);
  ms.insert(ms.end(), {100u, 200u, 500u});
  for (unsigned m : ms) {
    const auto row = rigidity_report(m);
    ASSERT_FALSE(row.error) << *row.error;
    EXPECT_LE(row.cross_route_spread, 1e-10) << m;
    EXPECT_GT(row.via_gamma, 0.0);
    EXPECT_LE(row.via_gamma, 1.0);
  }
}

TEST(RigidityRoutes, RatioRecurrence) {
  for (unsigned m = 1; m <= 300; ++m) {
    const auto f = wallis_factor(m);
    const double factor = static_cast<double>(f.numerator) / static_cast<double>(f.denominator);
    EXPECT_LE(rel_diff(rigidity_gamma(m) / rigidity_gamma(m - 1), factor), 1e-13) << m;
    EXPECT_LE(rel_diff(rigidity_product(m) / rigidity_product(m - 1), factor), 1e-13) << m;
    // Exact form: W_m / W_{m-1} equals the factor.
    const auto w = wallis_partial(m);
    const auto prev = wallis_partial(m - 1);
    EXPECT_EQ(w.numerator * prev.denominator * f.denominator,
              w.denominator * prev.numerator * f.numerator);
  }
}

TEST(RigidityRoutes, MonotoneBelowOneDefectDecreasing) {
  double previous_r = 0.0;
  double previous_d = 1.0;
  for (unsigned m = 0; m <= 5000; ++m) {
    const double r = rigidity_gamma(m);
    const double d = defect(m);
    EXPECT_GT(r, previous_r);
    EXPECT_LT(r, 1.0);
    EXPECT_LT(d, previous_d);
    previous_r = r;
    previous_d = d;
  }
}

TEST(RigidityAsymptotic, Examples) {
  EXPECT_EQ(rigidity_asymptotic(1), 0.90625);
  EXPECT_NEAR(rigidity_asymptotic(10), 0.9765625, 1e-16);
  EXPECT_NEAR(rigidity_asymptotic(1000), rigidity_gamma(1000), 5e-8);
  EXPECT_THROW(rigidity_asymptotic(0), DomainError);
}

TEST(RigidityAsymptotic, CubicRemainderBounded) {
  // |R_m - asymptotic| m^3 -> 11/128 ~ 0.0859 (50-digit reference evaluation).
  for (unsigned m : {50u, 100u, 200u, 400u, 800u}) {
    const double md = m;
    const double scaled = std::abs(rigidity_gamma(m) - rigidity_asymptotic(m)) * md * md * md;
    EXPECT_NEAR(scaled, 0.0859, 0.002) << m;
  }
}

TEST(Defect, Examples) {
  EXPECT_NEAR(defect(0), 0.3633802276, 1e-10);
  EXPECT_NEAR(defect(1), 0.1511736368, 1e-10);
  const double scaled = 400.0 * defect(100);
  EXPECT_NEAR(scaled, 1.0, 7e-3);
  EXPECT_NEAR(1.0 - scaled, 5.0 / 800.0, 3e-4);
}

TEST(Defect, ScaledDefectIncreasesTowardOne) {
  double previous = 0.0;
  for (unsigned m : {10u, 100u, 1000u, 10000u}) {
    const double scaled = 4.0 * m * defect(m);
    EXPECT_GT(scaled, previous);
    EXPECT_LT(scaled, 1.0);
    EXPECT_LE(std::abs(scaled - 1.0), 1.0 / m);
    previous = scaled;
  }
  for (unsigned m = 1; m <= 200; ++m) {
    const double scaled = 4.0 * m * defect(m);
    EXPECT_GT(scaled, 0.0);
    EXPECT_LT(scaled, 1.0);
  }
}

TEST(ConvergenceTable, SingleZeroRow) {
  const auto rows = convergence_table({QuantumIndex(0)});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].via_product, 2.0 / kPiRef, 1e-15);
  EXPECT_NEAR(rows[0].via_gamma, 2.0 / kPiRef, 1e-15);
  EXPECT_NEAR(*rows[0].via_quadrature, 2.0 / kPiRef, 1e-10);
  EXPECT_FALSE(rows[0].asymptotic.has_value());
}

TEST(ConvergenceTable, DefectColumn) {
  const auto rows = convergence_table({1, 10, 100});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].defect, 0.1511736368, 1e-10);
  EXPECT_NEAR(rows[1].defect, 0.0235195505, 1e-10);
  EXPECT_NEAR(rows[2].defect, 0.0024844605, 1e-10);
  EXPECT_EQ(rows[2].m.value(), 100u);
  EXPECT_NEAR(rows[0].defect, 1.0 - rows[0].via_gamma, 1e-15);
}

TEST(ConvergenceTable, EmptyInputRejected) {
  EXPECT_THROW(convergence_table({}), DomainError);
}

TEST(ConvergenceTable, QuadratureCutoffAndRowErrors) {
  ConvergenceOptions opts;
  opts.quadrature_cutoff = 50;
  opts.exact_cap = 1000;
  const auto rows = convergence_table({10, 60, 2000}, opts);
  EXPECT_TRUE(rows[0].via_quadrature.has_value());
  EXPECT_FALSE(rows[1].via_quadrature.has_value());
  EXPECT_FALSE(rows[1].error.has_value());
  // Above the exact cap: the row carries an error, the others are intact.
  ASSERT_TRUE(rows[2].error.has_value());
  EXPECT_FALSE(rows[2].via_product.has_value());
  EXPECT_GT(rows[2].via_gamma, 0.999);
}

TEST(ConvergenceTable, OrderIndependentOfThreads) {
  std::vector<QuantumIndex> ms;
  for (int m = 40; m >= 0; --m) ms.emplace_back(m);
  ConvergenceOptions serial;
  serial.threads = 1;
  ConvergenceOptions parallel;
  parallel.threads = 8;
  const auto a = convergence_table(ms, serial);
  const auto b = convergence_table(ms, parallel);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    EXPECT_EQ(a[i].m, ms[i]);
    EXPECT_EQ(a[i].via_gamma, b[i].via_gamma);
    EXPECT_EQ(*a[i].via_quadrature, *b[i].via_quadrature);
  }
}

TEST(PiEstimate, Examples) {
  EXPECT_EQ(pi_estimate(0), 2.0);
  EXPECT_NEAR(pi_estimate(1), 8.0 / 3.0, 1e-15);
  const double err = kPiRef - pi_estimate(10000);
  EXPECT_LT(err, 1e-4);
  EXPECT_GT(err, 0.0);
  EXPECT_NEAR(err * 10000 / (kPiRef / 4), 1.0, 0.05);
}

TEST(PiConstant, MatchesStandardLibrary) {
  EXPECT_EQ(kPi, std::numbers::pi);
  // The decimal truncation sits just below pi.
  const cpp_rational lower(pi_lower_numerator(), pi_lower_denominator());
  EXPECT_LT(lower, cpp_rational(314159265358979324, 100000000000000000));
  EXPECT_GT(lower, cpp_rational(314159265358979323, 100000000000000000));
}

}  // namespace
