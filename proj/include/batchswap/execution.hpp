#pragma once

#include "batchswap/amm.hpp"
#include "batchswap/types.hpp"

#include <optional>

namespace batchswap {

/// Effect of executing (part of) one order. pool_dx leaves the pool, pool_dy enters it.
struct Execution {
  Rational pool_dx;
  Rational pool_dy;
  Rational fulfilled;  ///< in the order's own units

  Outcome user_gain() const { return {pool_dx, -pool_dy}; }
};

/// Balances available to the trader. Unset means unconstrained.
struct Budget {
  std::optional<Rational> x;
  std::optional<Rational> y;
};

/// Fills as much of an order as its limit rate, its amount and the budget allow
/// against the live curve. Rounds toward executing less.
Execution execute_limit_order(const Curve& curve, const PoolState& pool, Side side, const Rational& amount,
                              const Rational& limit_rate, const Budget& budget = {});

/// Fills an order at the fixed rate r0 without touching the pool, capped by the budget.
Execution execute_at_fixed_rate(Side side, const Rational& amount, const Rational& r0, const Budget& budget = {});

}  // namespace batchswap
