#pragma once

#include "batchswap/amm.hpp"
#include "batchswap/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace batchswap {

enum class Side { BuyX, SellX, BuyY, SellY };

/// BuyX and SellY orders take X out of the pool; SellX and BuyY put X in.
constexpr bool takes_x(Side s) { return s == Side::BuyX || s == Side::SellY; }
/// BuyY and SellY amounts are denominated in Y.
constexpr bool y_denominated(Side s) { return s == Side::BuyY || s == Side::SellY; }

std::string_view to_string(Side s);
/// Throws std::invalid_argument for anything but BuyX/SellX/BuyY/SellY.
Side side_from_string(std::string_view text);

using OrderId = std::uint64_t;

/// One limit order. `limit_rate` is always Y per X regardless of side; `amount`
/// is in X for BuyX/SellX and in Y for BuyY/SellY.
struct Order {
  OrderId id = 0;
  std::string user;
  Side side = Side::BuyX;
  Rational amount;
  Rational limit_rate{1};
  Rational arrival;
  std::uint64_t submit_index = 0;

  /// Throws std::invalid_argument on negative amount or non-positive rate.
  void validate() const;
  friend bool operator==(const Order&, const Order&) = default;
};

/// Net gain of one party: negative components are losses.
struct Outcome {
  Rational dx;
  Rational dy;

  Outcome& operator+=(const Outcome& o) {
    dx += o.dx;
    dy += o.dy;
    return *this;
  }
  friend Outcome operator+(Outcome a, const Outcome& b) { return a += b; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

enum class Phase { One, Two, Skipped };
std::string_view to_string(Phase p);

/// Result for one submitted order. Split halves are aggregated under the parent id.
struct OrderFill {
  OrderId order_id = 0;
  std::string user;
  Side side = Side::BuyX;
  Rational fulfilled;  ///< in the order's own units
  Rational avg_rate;   ///< Y per X
  Phase phase = Phase::Skipped;
  Rational dx;  ///< user's gain in X
  Rational dy;  ///< user's gain in Y

  Outcome outcome() const { return {dx, dy}; }
};

/// Per-user balances for the no-short-selling engine.
struct Position {
  Rational x;
  Rational y;
  friend bool operator==(const Position&, const Position&) = default;
};
using Ledger = std::map<std::string, Position>;

/// One executed (sub)order.
struct TraceStep {
  OrderId order_id = 0;
  std::string user;
  Side side = Side::BuyX;
  int part = -1;  ///< -1 when unsplit, 0 or 1 for split halves
  Phase phase = Phase::Two;
  PoolState before;
  PoolState after;
  Rational dx;  ///< user's gain in X
  Rational dy;  ///< user's gain in Y
  Rational fulfilled;
  std::optional<Position> position_after;  ///< set by the no-short engine
};

enum class Dominance { BuyXDominant, BuyYDominant };
std::string_view to_string(Dominance d);

struct Split {
  OrderId order_id = 0;
  Rational first;   ///< executed in Phase 1
  Rational second;  ///< carried into Phase 2
  friend bool operator==(const Split&, const Split&) = default;
};

struct BatchOutcome {
  std::vector<OrderFill> fills;  ///< one per submitted order, input order
  std::map<std::string, Outcome> per_user;
  PoolState start_pool;
  PoolState end_pool;
  std::vector<TraceStep> trace;
  Dominance dominance = Dominance::BuyXDominant;
  std::optional<Split> split;

  const OrderFill* fill_for(OrderId id) const;
  Outcome user_outcome(const std::string& user) const;
};

struct TieBreak {
  enum class Mode { Random, ArrivalStable };
  Mode mode = Mode::ArrivalStable;
  std::uint64_t seed = 0;

  static TieBreak random(std::uint64_t seed) { return {Mode::Random, seed}; }
  static TieBreak arrival_stable() { return {Mode::ArrivalStable, 0}; }
  friend bool operator==(const TieBreak&, const TieBreak&) = default;
};

/// A user's intrinsic demand: side, amount, limit rate and true arrival time.
struct UserType {
  Side side = Side::BuyX;
  Rational demand;
  Rational rate{1};
  Rational arrival;
};

}  // namespace batchswap
