#pragma once

#include "batchswap/amm.hpp"
#include "batchswap/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace batchswap {

struct Eligibility {
  std::vector<Order> kept;
  std::vector<Order> skipped;
};

/// Drops BuyX/SellY orders whose limit is below r0 and SellX/BuyY orders whose
/// limit is above it. A limit exactly at r0 is kept.
Eligibility filter_eligible(std::span<const Order> orders, const Rational& r0);

/// Signed net X demand of an order valued at r0: +v BuyX, -v SellX, -v/r0 BuyY, +v/r0 SellY.
Rational beta(const Order& order, const Rational& r0);

/// sigma = sum of beta; sigma >= 0 is the BuyX/SellY-dominant case.
Dominance classify_dominance(std::span<const Order> orders, const Rational& r0);

/// An order as it enters execution; split halves keep the parent's id and fields.
struct SubOrder {
  Order order;
  int part = -1;  ///< -1 unsplit, 0 first half, 1 second half
};

struct SortedBatch {
  std::vector<SubOrder> orders;
  std::size_t phase1_count = 0;  ///< j: orders[0, j) run at the fixed rate
  std::optional<Split> split;
};

/// Puts the minority side-group first, orders each group by the tie-break,
/// then splits the boundary order so the first j orders have beta summing to 0.
SortedBatch sort_and_split(std::span<const Order> eligible, Dominance dominance, const TieBreak& tiebreak,
                           const Rational& r0);

struct PhaseResult {
  std::vector<TraceStep> steps;
  PoolState end_pool;
};

/// Fills every prefix order in full at r0. Throws InvariantViolation unless the prefix nets to zero.
PhaseResult execute_phase1(const PoolState& pool, std::span<const SubOrder> prefix, const Rational& r0);

/// Executes the majority-side remainder one order at a time against the curve.
PhaseResult execute_phase2(const Curve& curve, const PoolState& pool, std::span<const SubOrder> suffix);

/// Whole pipeline: filter, classify, sort and split, Phase 1, Phase 2.
/// Throws std::invalid_argument on malformed orders or duplicate ids.
BatchOutcome run_batch(const PoolState& pool, std::span<const Order> orders, const TieBreak& tiebreak,
                       const Curve& curve = Curve{}, bool record_trace = true);

/// Truthful single order for a user type.
Order honest_strategy(const UserType& type, std::string user = {}, OrderId id = 0, std::uint64_t submit_index = 0);

namespace detail {

/// Orders one side-group: ascending (arrival, submit_index) or a seeded uniform shuffle.
void order_group(std::vector<Order>& group, const TieBreak& tiebreak, std::uint64_t group_tag);

/// Eligible orders arranged minority-group first for the given dominance, each group tie-broken.
std::vector<Order> group_sort(std::span<const Order> eligible, Dominance dominance, const TieBreak& tiebreak);

/// Validates every order and rejects duplicate ids.
void validate_orders(std::span<const Order> orders);

/// Collapses trace steps into one fill per submitted order, in input order.
std::vector<OrderFill> aggregate_fills(std::span<const Order> orders, std::span<const TraceStep> steps,
                                       const Rational& r0);

std::map<std::string, Outcome> per_user_totals(std::span<const OrderFill> fills);

}  // namespace detail

}  // namespace batchswap
