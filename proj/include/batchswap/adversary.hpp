#pragma once

#include "batchswap/amm.hpp"
#include "batchswap/ordering.hpp"
#include "batchswap/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace batchswap {

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

enum class EngineKind { Batch, BatchNoShort, LegacySequential };
std::string_view to_string(EngineKind k);
EngineKind engine_from_string(std::string_view text);

/// Something that turns (pool, orders, tie-break) into a BatchOutcome.
struct Engine {
  EngineKind kind = EngineKind::Batch;
  Curve curve = Curve();
  Ledger ledger;  ///< used by BatchNoShort only

  /// True for the two-phase batch mechanisms (the ones that must resist attack).
  bool is_batch_mechanism() const { return kind != EngineKind::LegacySequential; }
};

BatchOutcome run_engine(const Engine& engine, const PoolState& pool, std::span<const Order> orders,
                        const TieBreak& tiebreak, bool record_trace = false);

/// First-come-first-served AMM: each order, in the given sequence, fills as much
/// as its limit rate and amount allow against the live pool.
BatchOutcome legacy_sequential_run(const PoolState& pool, std::span<const Order> ordered_orders,
                                   const Curve& curve = Curve{});

// ---------------------------------------------------------------------------
// Sandwich baseline
// ---------------------------------------------------------------------------

struct SandwichPoint {
  Rational front_amount;
  Rational profit;  ///< attacker's net Y; its net X is exactly zero
};

struct SandwichResult {
  Rational best_front_amount;  ///< 0 when no amount is profitable
  Rational best_profit;
  std::vector<SandwichPoint> points;  ///< every grid amount that was tried
  BatchOutcome best_run;              ///< legacy run at the argmax (victim alone when profit is 0)
  std::vector<Order> best_orders;     ///< the sequence behind best_run
};

/// Tries [BuyX a, victim, SellX a] on the legacy engine for every a in the grid.
/// The victim must be a BuyX order. Amounts >= pool.x are skipped.
SandwichResult sandwich_attack(const PoolState& pool, const Order& victim, std::span<const Rational> front_amounts,
                               const Curve& curve = Curve{});

// ---------------------------------------------------------------------------
// Strategy spaces and witnesses
// ---------------------------------------------------------------------------

enum class Model { Plain, WeakFairSequencing };
std::string_view to_string(Model m);
Model model_from_string(std::string_view text);

struct Scenario {
  PoolState pool;
  std::vector<Order> honest_orders;
  std::optional<UserType> adversary_type;
  std::string adversary_user = "adversary";
  Model model = Model::WeakFairSequencing;
  TieBreak tiebreak;
  /// Explicit strategic order vectors evaluated alongside the grid.
  std::vector<std::vector<Order>> extra_deviations;
};

/// Finite discretisation of the adversary's order space.
struct StrategyGrid {
  std::vector<Rational> amounts;
  std::vector<Rational> rates;
  std::vector<Side> sides{Side::BuyX, Side::SellX, Side::BuyY, Side::SellY};
  std::size_t max_orders = 3;
  std::vector<Rational> arrival_offsets{Rational(0)};
  /// Plain model: censorship enumerates all honest subsets when |honest| <= this.
  std::size_t censor_limit = 6;

  /// amounts {1..5}, rates {1/2, 1, 2, 4}, all sides, up to 3 orders, offset {0}.
  static StrategyGrid standard();
  std::size_t single_order_count() const;
  /// Number of order multisets of size 0..max_orders.
  std::size_t strategy_count() const;
};

/// Exhaustive multiset enumeration over a fixed option list, stored flat.
class MultisetTable {
 public:
  MultisetTable(std::size_t options, std::size_t max_size);
  std::size_t size() const { return sizes_.size(); }
  std::span<const std::uint32_t> at(std::size_t i) const {
    return {indices_.data() + i * width_, sizes_[i]};
  }

 private:
  std::size_t width_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint32_t> sizes_;
};

struct ArbWitness {
  std::string user;
  std::vector<Order> batch_orders;       ///< everything submitted in the run
  std::vector<Order> strategic_orders;   ///< the adversary's orders in that run
  std::vector<OrderId> subset;           ///< orders whose fills form the gain
  std::vector<OrderId> censored;         ///< honest orders dropped by the adversary
  Outcome gain;                          ///< dx >= 0, dy >= 0, one strictly
};

/// Hard cap on the number of fills the subset check will enumerate.
inline constexpr std::size_t kMaxSubsetFills = 16;

/// Checks every non-empty subset of `user`'s fills for a riskless gain. Returns
/// the first in mask order. Throws std::length_error above kMaxSubsetFills fills.
std::optional<ArbWitness> find_arbitrage(const BatchOutcome& outcome, const std::string& user);

/// Runs every adversary strategy in the grid against the scenario and collects
/// arbitrage witnesses. Plain: any arrival from (earliest honest - 1) + offsets
/// and any censorship subset. Weak fair sequencing: arrivals alpha* + offsets, no
/// censorship. Results are ordered by (censorship subset, strategy index).
std::vector<ArbWitness> search_arbitrage(const Scenario& scenario, const StrategyGrid& grid,
                                         const Engine& engine = {});

struct IcCounterexample {
  std::vector<Order> deviation;
  Outcome honest;
  Outcome deviant;
  Comparison comparison = Comparison::Better;
  Rational honest_value;   ///< total-order searches only
  Rational deviant_value;  ///< total-order searches only
  bool ties_honest_arrival = false;  ///< some deviation order shares an arrival with another user's order
};

struct IcReport {
  std::vector<IcCounterexample> counterexamples;
  std::size_t deviations_checked = 0;
  std::size_t refuted = 0;  ///< deviations certified worse by R1-R3
  Outcome honest;
};

/// Compares the honest single order against every strategic vector in the grid
/// (plus scenario.extra_deviations) under the partial ordering for `type`; a
/// deviation is a counterexample iff it compares Better.
IcReport search_ic_deviations(const Scenario& scenario, const UserType& type, const StrategyGrid& grid,
                              const Engine& engine = {});

/// Same harness for the no-short engine under the total ordering at
/// `belief_rate`: the honest order is honest_strategy_noshort and a deviation
/// is a counterexample iff its value strictly exceeds the honest value.
/// The adversary's position comes from engine.ledger, alpha* from scenario.adversary_type.
IcReport search_ic_total_order(const Scenario& scenario, const Rational& belief_rate, const StrategyGrid& grid,
                               const Engine& engine);

struct ConvertedScenario {
  Scenario scenario;
  UserType zero_demand_type;
};

/// Rebuilds a witness as an incentive-compatibility violation: the profitable
/// subset becomes the injected orders of a zero-demand strategic user, all other
/// orders stay honest. Throws std::invalid_argument if the witness does not fit
/// the scenario.
ConvertedScenario arbitrage_to_ic_violation(const ArbWitness& witness, const Scenario& scenario);

namespace serial {

/// Single-threaded reference for the OpenMP searches; identical results and order.
std::vector<ArbWitness> search_arbitrage(const Scenario& scenario, const StrategyGrid& grid,
                                         const Engine& engine = {});
IcReport search_ic_deviations(const Scenario& scenario, const UserType& type, const StrategyGrid& grid,
                              const Engine& engine = {});
IcReport search_ic_total_order(const Scenario& scenario, const Rational& belief_rate, const StrategyGrid& grid,
                               const Engine& engine);

}  // namespace serial

}  // namespace batchswap
