#include "batchswap/rational.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using batchswap::DomainError;
using batchswap::Rational;

TEST(Rational, ParsesIntegersFractionsAndDecimals) {
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("-3/6"), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("12.375"), Rational(99, 8));
  EXPECT_EQ(Rational::parse("-0.5"), Rational(-1, 2));
  EXPECT_THROW(Rational::parse("1/0"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
  EXPECT_THROW(Rational::parse(""), std::invalid_argument);
}

TEST(Rational, CanonicalRendering) {
  EXPECT_EQ(Rational(10, 4).str(), "5/2");
  EXPECT_EQ(Rational(-6, 3).str(), "-2");
  EXPECT_EQ(Rational(1, 3).decimal(4), "0.3333");
  EXPECT_EQ(Rational(-7, 2).decimal(2), "-3.50");
}

TEST(Rational, DivisionByZeroThrows) {
  EXPECT_THROW(Rational(1) / Rational(0), DomainError);
  EXPECT_THROW(Rational(0).reciprocal(), DomainError);
}

TEST(Rational, RoundTripsExactly) {
  batchswap::fuzz::Fuzzer f(11);
  for (int i = 0; i < 2000; ++i) {
    const Rational a = f.rational(-1000, 1000, 997);
    const Rational b = f.rational(-1000, 1000, 991);
    EXPECT_EQ((a + b) - b, a);
    if (!b.is_zero()) EXPECT_EQ((a * b) / b, a);
  }
}

TEST(Sqrt, PerfectSquaresAreExact) {
  const Rational eps = batchswap::default_sqrt_eps();
  EXPECT_EQ(batchswap::sqrt_lower(Rational(4), eps), Rational(2));
  EXPECT_EQ(batchswap::sqrt_lower(Rational(10000, 4), eps), Rational(50));
  EXPECT_EQ(batchswap::sqrt_upper(Rational(10000, 4), eps), Rational(50));
  EXPECT_EQ(batchswap::sqrt_lower(Rational(9, 49), Rational(1, 2)), Rational(3, 7));
  EXPECT_EQ(batchswap::sqrt_lower(Rational(0), eps), Rational(0));
}

TEST(Sqrt, TwoWithinTolerance) {
  const Rational eps = Rational::parse("0.000000000001");
  const Rational s = batchswap::sqrt_lower(Rational(2), eps);
  EXPECT_LE(s * s, Rational(2));
  EXPECT_GT((s + eps) * (s + eps), Rational(2));
}

TEST(Sqrt, NegativeInputRejected) {
  EXPECT_THROW(batchswap::sqrt_lower(Rational(-1), Rational(1, 8)), DomainError);
  EXPECT_THROW(batchswap::sqrt_upper(Rational(-1), Rational(1, 8)), DomainError);
  EXPECT_THROW(batchswap::sqrt_lower(Rational(2), Rational(0)), DomainError);
}

TEST(Sqrt, BracketsTheRootOnRandomInputs) {
  batchswap::fuzz::Fuzzer f(5);
  for (int i = 0; i < 3000; ++i) {
    const Rational q = f.rational(0, 100000, 1000);
    const Rational eps = Rational::pow2(-f.integer(1, 80));
    const Rational lo = batchswap::sqrt_lower(q, eps);
    const Rational hi = batchswap::sqrt_upper(q, eps);
    ASSERT_LE(lo * lo, q);
    ASSERT_GT((lo + eps) * (lo + eps), q);
    ASSERT_GE(hi * hi, q);
    ASSERT_LE(hi - lo, eps);
  }
}
