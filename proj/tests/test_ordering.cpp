#include "batchswap/ordering.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace batchswap;

namespace {

const UserType kSeven{Side::BuyX, Rational(7), Rational(20), Rational(3)};

Outcome o(long dx, long dy) { return {Rational(dx), Rational(dy)}; }

}  // namespace

TEST(BaseDominates, SevenUnitExample) {
  EXPECT_TRUE(base_dominates(kSeven, o(6, -66), o(5, -50)));
  EXPECT_TRUE(base_dominates(kSeven, o(7, -70), o(8, -96)));
  EXPECT_FALSE(base_dominates(kSeven, o(8, -88), o(7, -70)));
  EXPECT_FALSE(base_dominates(kSeven, o(7, -70), o(8, -88)));
}

TEST(Compare, SevenUnitExample) {
  EXPECT_EQ(compare(kSeven, o(6, -66), o(5, -50)), Comparison::Better);
  EXPECT_EQ(compare(kSeven, o(5, -50), o(6, -66)), Comparison::Worse);
  EXPECT_EQ(compare(kSeven, o(7, -70), o(8, -96)), Comparison::Better);
  EXPECT_EQ(compare(kSeven, o(8, -88), o(7, -70)), Comparison::Incomparable);
  EXPECT_EQ(compare(kSeven, o(3, -1), o(3, -1)), Comparison::Equal);
}

TEST(Compare, IndifferenceAtLimitUtility) {
  // Both inside the demand with equal 20*dx + dy.
  EXPECT_EQ(compare(kSeven, o(5, -50), o(6, -70)), Comparison::Equal);
}

TEST(Compare, YSideTypeSwapsAxes) {
  // Wants 10 Y at no worse than 2 Y per X, i.e. pays at most 1/2 X per Y.
  const UserType t{Side::BuyY, Rational(10), Rational(2), Rational(0)};
  EXPECT_EQ(compare(t, Outcome{Rational(-4), Rational(10)}, Outcome{Rational(-5), Rational(10)}), Comparison::Better);
  EXPECT_EQ(compare(t, Outcome{Rational(-3), Rational(8)}, Outcome{Rational(0), Rational(0)}), Comparison::Better);
}

TEST(Refutation, Rules) {
  EXPECT_TRUE(refutes_dominance(kSeven, o(4, -40), o(2, -30)));
  EXPECT_TRUE(refutes_dominance(kSeven, o(5, -50), o(6, -80)));
  EXPECT_FALSE(refutes_dominance(kSeven, o(5, -50), o(6, -66)));
  // Opposite sides: crossing from 6 to 8 at 25 per unit.
  EXPECT_TRUE(refutes_dominance(kSeven, o(6, -60), o(8, -110)));
}

TEST(TotalValue, Examples) {
  EXPECT_EQ(total_value(Rational(20), o(8, -88)), Rational(72));
  EXPECT_EQ(total_value(Rational(20), o(7, -70)), Rational(70));
  EXPECT_EQ(total_value(Rational(3, 7), o(0, 0)), Rational(0));
}

namespace {

std::vector<Outcome> outcome_grid() {
  std::vector<Outcome> g;
  for (long dx = -2; dx <= 10; ++dx) {
    for (long dy = -130; dy <= 20; dy += 5) g.push_back(o(dx, dy));
  }
  return g;
}

std::vector<UserType> type_grid() {
  std::vector<UserType> t;
  for (auto side : {Side::BuyX, Side::SellX, Side::BuyY, Side::SellY}) {
    for (long v : {0L, 3L, 7L}) {
      for (const Rational& r : {Rational(1, 2), Rational(1), Rational(20)}) t.push_back(UserType{side, Rational(v), r, Rational(0)});
    }
  }
  return t;
}

}  // namespace

TEST(OrderingProperties, ReflexiveAndAntisymmetric) {
  const auto grid = outcome_grid();
  for (const auto& t : type_grid()) {
    for (std::size_t i = 0; i < grid.size(); i += 3) {
      ASSERT_EQ(compare(t, grid[i], grid[i]), Comparison::Equal);
      for (std::size_t j = 0; j < grid.size(); j += 7) {
        const Comparison a = compare(t, grid[i], grid[j]);
        const Comparison b = compare(t, grid[j], grid[i]);
        ASSERT_EQ(a == Comparison::Better, b == Comparison::Worse);
        ASSERT_EQ(a == Comparison::Equal, b == Comparison::Equal);
      }
    }
  }
}

TEST(OrderingProperties, RuleOneMonotone) {
  const auto grid = outcome_grid();
  for (const auto& t : type_grid()) {
    for (std::size_t i = 0; i < grid.size(); i += 5) {
      for (std::size_t j = 0; j < grid.size(); j += 3) {
        if (grid[i].dx >= grid[j].dx && grid[i].dy >= grid[j].dy) ASSERT_TRUE(base_dominates(t, grid[i], grid[j]));
      }
    }
  }
}

TEST(OrderingProperties, RefutationIsSound) {
  const auto grid = outcome_grid();
  std::size_t refuted = 0;
  for (const auto& t : type_grid()) {
    for (std::size_t i = 0; i < grid.size(); i += 2) {
      for (std::size_t j = 0; j < grid.size(); j += 3) {
        if (refutes_dominance(t, grid[i], grid[j])) {
          ++refuted;
          ASSERT_FALSE(base_dominates(t, grid[j], grid[i]))
              << to_string(t.side) << " v=" << t.demand << " r=" << t.rate << " honest (" << grid[i].dx << "," << grid[i].dy << ") strategic (" << grid[j].dx << "," << grid[j].dy << ")";
        }
      }
    }
  }
  EXPECT_GT(refuted, 0U);
}

TEST(OrderingProperties, TotalOrderRefinesPartialOrder) {
  const auto grid = outcome_grid();
  for (const auto& t : type_grid()) {
    const Rational belief = t.rate;
    for (std::size_t i = 0; i < grid.size(); i += 3) {
      for (std::size_t j = 0; j < grid.size(); j += 4) {
        if (base_dominates(t, grid[i], grid[j])) {
          ASSERT_GE(total_value(belief, grid[i]), total_value(belief, grid[j]))
              << to_string(t.side) << " v=" << t.demand << " r=" << t.rate << " (" << grid[i].dx << "," << grid[i].dy
              << ") vs (" << grid[j].dx << "," << grid[j].dy << ")";
        }
      }
    }
  }
}
