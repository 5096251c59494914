#include "batchswap/amm.hpp"

#include <string>

namespace batchswap {

PoolState::PoolState(Rational x_, Rational y_) : x(std::move(x_)), y(std::move(y_)) {
  if (x.sign() <= 0 || y.sign() <= 0) {
    throw DomainError("pool reserves must be strictly positive, got (" + x.str() + ", " + y.str() + ")");
  }
}

Rational ConstantProduct::x_at_rate_upper(const Rational& level, const Rational& rate, const Rational& eps) const {
  // rate(x) = level / x^2 on the level set.
  return sqrt_upper(level / rate, eps);
}

Rational ConstantProduct::x_at_rate_lower(const Rational& level, const Rational& rate, const Rational& eps) const {
  return sqrt_lower(level / rate, eps);
}

std::shared_ptr<const PotentialFunction> constant_product() {
  static const auto instance = std::make_shared<const ConstantProduct>();
  return instance;
}

std::shared_ptr<const PotentialFunction> potential_by_name(std::string_view name) {
  if (name == "constant_product") return constant_product();
  throw std::invalid_argument("unknown potential \"" + std::string(name) + "\"");
}

Curve::Curve(std::shared_ptr<const PotentialFunction> potential, Rational eps)
    : potential_(std::move(potential)), eps_(std::move(eps)) {
  if (!potential_) throw std::invalid_argument("curve needs a potential function");
  if (eps_.sign() <= 0) throw DomainError("eps must be positive, got " + eps_.str());
}

Rational Curve::trade_cost(const PoolState& pool, const Rational& dx) const {
  if (dx >= pool.x) throw DomainError("trade of " + dx.str() + " would drain X reserve " + pool.x.str());
  if (dx.is_zero()) return Rational(0);
  const Rational y_after = potential_->y_on_level(pool.x - dx, phi(pool));
  if (y_after.sign() <= 0) throw DomainError("trade leaves non-positive Y reserve");
  return y_after - pool.y;
}

Rational Curve::max_buy_for_rate_cap(const PoolState& pool, const Rational& cap) const {
  if (cap <= rate(pool)) return Rational(0);
  const Rational x_after = potential_->x_at_rate_upper(phi(pool), cap, eps_);
  return x_after < pool.x ? pool.x - x_after : Rational(0);
}

Rational Curve::max_sell_for_rate_floor(const PoolState& pool, const Rational& floor) const {
  if (floor.sign() <= 0 || floor >= rate(pool)) return Rational(0);
  const Rational x_after = potential_->x_at_rate_lower(phi(pool), floor, eps_);
  return x_after > pool.x ? x_after - pool.x : Rational(0);
}

Rational Curve::max_buy_for_budget(const PoolState& pool, const Rational& budget) const {
  if (budget.sign() <= 0) return Rational(0);
  return pool.x - potential_->x_on_level(pool.y + budget, phi(pool));
}

Rational Curve::sell_for_proceeds(const PoolState& pool, const Rational& proceeds) const {
  if (proceeds.sign() <= 0) return Rational(0);
  if (proceeds >= pool.y) throw DomainError("proceeds " + proceeds.str() + " exceed Y reserve " + pool.y.str());
  return potential_->x_on_level(pool.y - proceeds, phi(pool)) - pool.x;
}

PoolState Curve::apply_trade(const PoolState& pool, const Rational& dx, const Rational& dy) const {
  PoolState after(pool.x - dx, pool.y + dy);
  if (phi(after) != phi(pool)) {
    throw InvariantViolation("trade (" + dx.str() + ", " + dy.str() + ") moves the potential off " + phi(pool).str());
  }
  return after;
}

}  // namespace batchswap
