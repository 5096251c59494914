#pragma once

#include "batchswap/amm.hpp"
#include "batchswap/mechanism.hpp"
#include "batchswap/types.hpp"

#include <span>

namespace batchswap {

/// Phase 1 safe execution at r0: fills the most the user's balances allow and
/// updates the ledger. Unknown users get a Skipped zero fill.
OrderFill safe_execute_phase1(const Order& order, const Rational& r0, Ledger& ledger);

struct SafeExecution {
  OrderFill fill;
  PoolState pool;
};

/// Phase 2 safe execution: min of the rate-cap amount, the budget-cap amount
/// and the order amount, rounded toward less. Updates the ledger.
SafeExecution safe_execute_phase2(const Order& order, const PoolState& pool, Ledger& ledger,
                                  const Curve& curve = Curve{});

struct NoShortOutcome {
  BatchOutcome batch;
  Ledger ledger;  ///< positions after the batch
};

/// The batch mechanism with every execution capped by the submitting user's
/// balances. Dominance and the Phase 1 split come from trial safe executions at
/// r0 against a scratch ledger; the live run re-derives caps from live state.
NoShortOutcome run_batch_noshort(const PoolState& pool, const Ledger& ledger, std::span<const Order> orders,
                                 const TieBreak& tiebreak, const Curve& curve = Curve{}, bool record_trace = true);

/// Sell everything on the side the belief favours: SellY of the whole Y balance
/// when belief > r0, SellX of the whole X balance when belief < r0, and a
/// zero-amount SellX at belief == r0.
Order honest_strategy_noshort(const Rational& belief_rate, const Position& position, const Rational& r0,
                              const Rational& arrival, std::string user = {}, OrderId id = 0,
                              std::uint64_t submit_index = 0);

}  // namespace batchswap
