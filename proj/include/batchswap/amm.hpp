#pragma once

#include "batchswap/rational.hpp"

#include <memory>
#include <stdexcept>
#include <string_view>

namespace batchswap {

/// Raised when an internal conservation guard trips. Always a bug, never bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Reserves held by the pool. Both strictly positive.
struct PoolState {
  Rational x;
  Rational y;

  PoolState() : x(1), y(1) {}
  PoolState(Rational x_, Rational y_);

  friend bool operator==(const PoolState&, const PoolState&) = default;
};

/// An increasing, concave, differentiable potential Phi(x, y). Every level set
/// {Phi = C} is a decreasing convex curve y = h(x); implementations must solve
/// the curve exactly in both directions and bracket the point where the marginal
/// rate crosses a given value with directed rounding.
class PotentialFunction {
 public:
  virtual ~PotentialFunction() = default;

  virtual std::string_view name() const = 0;
  virtual Rational value(const Rational& x, const Rational& y) const = 0;
  /// (dPhi/dx) / (dPhi/dy): units of Y per unit of X at the margin.
  virtual Rational rate(const Rational& x, const Rational& y) const = 0;
  virtual Rational y_on_level(const Rational& x, const Rational& level) const = 0;
  virtual Rational x_on_level(const Rational& y, const Rational& level) const = 0;
  /// Some x' >= the exact x where the rate on `level` equals `rate`, within eps.
  /// Rates on a level set fall as x grows, so rate(x') <= `rate`.
  virtual Rational x_at_rate_upper(const Rational& level, const Rational& rate, const Rational& eps) const = 0;
  /// Some x' <= the exact crossing point, within eps; rate(x') >= `rate`.
  virtual Rational x_at_rate_lower(const Rational& level, const Rational& rate, const Rational& eps) const = 0;
};

/// Phi(x, y) = x * y.
class ConstantProduct final : public PotentialFunction {
 public:
  std::string_view name() const override { return "constant_product"; }
  Rational value(const Rational& x, const Rational& y) const override { return x * y; }
  Rational rate(const Rational& x, const Rational& y) const override { return y / x; }
  Rational y_on_level(const Rational& x, const Rational& level) const override { return level / x; }
  Rational x_on_level(const Rational& y, const Rational& level) const override { return level / y; }
  Rational x_at_rate_upper(const Rational& level, const Rational& rate, const Rational& eps) const override;
  Rational x_at_rate_lower(const Rational& level, const Rational& rate, const Rational& eps) const override;
};

std::shared_ptr<const PotentialFunction> constant_product();

/// Looks a potential up by its scenario-file name. Throws std::invalid_argument if unknown.
std::shared_ptr<const PotentialFunction> potential_by_name(std::string_view name);

/// Trade math against one potential. All amounts use a single signed X axis:
/// dx > 0 means the pool hands dx units of X to a trader (a buy), dx < 0 means
/// the trader hands -dx units of X to the pool (a sell). The matching dy is what
/// the trader pays in Y (negative when the trader receives Y).
class Curve {
 public:
  explicit Curve(std::shared_ptr<const PotentialFunction> potential = constant_product(),
                 Rational eps = default_sqrt_eps());

  const PotentialFunction& potential() const { return *potential_; }
  const Rational& eps() const { return eps_; }

  Rational phi(const PoolState& pool) const { return potential_->value(pool.x, pool.y); }
  Rational rate(const PoolState& pool) const { return potential_->rate(pool.x, pool.y); }

  /// Y the trader pays for taking dx out of the pool; keeps Phi exactly.
  Rational trade_cost(const PoolState& pool, const Rational& dx) const;

  /// Largest buy (rounded toward less) leaving the marginal rate <= cap. 0 if cap <= rate.
  Rational max_buy_for_rate_cap(const PoolState& pool, const Rational& cap) const;
  /// Largest sell of X (rounded toward less) leaving the marginal rate >= floor. 0 if floor >= rate.
  Rational max_sell_for_rate_floor(const PoolState& pool, const Rational& floor) const;

  /// Largest buy whose cost is at most `budget` units of Y. Exact.
  Rational max_buy_for_budget(const PoolState& pool, const Rational& budget) const;
  /// Sell of X that yields exactly `proceeds` units of Y; proceeds must be < pool.y.
  Rational sell_for_proceeds(const PoolState& pool, const Rational& proceeds) const;

  /// Pool(x - dx, y + dy). Throws InvariantViolation if Phi changes.
  PoolState apply_trade(const PoolState& pool, const Rational& dx, const Rational& dy) const;

 private:
  std::shared_ptr<const PotentialFunction> potential_;
  Rational eps_;
};

}  // namespace batchswap
