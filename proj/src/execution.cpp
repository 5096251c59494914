#include "batchswap/execution.hpp"

namespace batchswap {

Execution execute_limit_order(const Curve& curve, const PoolState& pool, Side side, const Rational& amount,
                              const Rational& limit_rate, const Budget& budget) {
  Execution e;
  if (amount.sign() <= 0) return e;

  switch (side) {
    case Side::BuyX: {
      Rational dx = min(amount, curve.max_buy_for_rate_cap(pool, limit_rate));
      if (budget.y) dx = min(dx, curve.max_buy_for_budget(pool, *budget.y));
      if (dx.sign() <= 0) return e;
      e.pool_dx = dx;
      e.pool_dy = curve.trade_cost(pool, dx);
      e.fulfilled = dx;
      break;
    }
    case Side::SellY: {
      const Rational spend = budget.y ? min(amount, *budget.y) : amount;
      const Rational dx = min(curve.max_buy_for_budget(pool, spend), curve.max_buy_for_rate_cap(pool, limit_rate));
      if (dx.sign() <= 0) return e;
      e.pool_dx = dx;
      e.pool_dy = curve.trade_cost(pool, dx);
      e.fulfilled = e.pool_dy;
      break;
    }
    case Side::SellX: {
      Rational sold = min(amount, curve.max_sell_for_rate_floor(pool, limit_rate));
      if (budget.x) sold = min(sold, *budget.x);
      if (sold.sign() <= 0) return e;
      e.pool_dx = -sold;
      e.pool_dy = curve.trade_cost(pool, -sold);
      e.fulfilled = sold;
      break;
    }
    case Side::BuyY: {
      Rational sold = curve.max_sell_for_rate_floor(pool, limit_rate);
      if (amount < pool.y) sold = min(sold, curve.sell_for_proceeds(pool, amount));
      if (budget.x) sold = min(sold, *budget.x);
      if (sold.sign() <= 0) return e;
      e.pool_dx = -sold;
      e.pool_dy = curve.trade_cost(pool, -sold);
      e.fulfilled = -e.pool_dy;
      break;
    }
  }
  return e;
}

Execution execute_at_fixed_rate(Side side, const Rational& amount, const Rational& r0, const Budget& budget) {
  Execution e;
  Rational v = amount;
  switch (side) {
    case Side::BuyX:
      if (budget.y) v = min(v, *budget.y / r0);
      e.pool_dx = v;
      e.pool_dy = v * r0;
      break;
    case Side::SellX:
      if (budget.x) v = min(v, *budget.x);
      e.pool_dx = -v;
      e.pool_dy = -(v * r0);
      break;
    case Side::BuyY:
      if (budget.x) v = min(v, *budget.x * r0);
      e.pool_dx = -(v / r0);
      e.pool_dy = -v;
      break;
    case Side::SellY:
      if (budget.y) v = min(v, *budget.y);
      e.pool_dx = v / r0;
      e.pool_dy = v;
      break;
  }
  e.fulfilled = v;
  return e;
}

}  // namespace batchswap
