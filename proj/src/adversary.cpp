#include "batchswap/adversary.hpp"

#include "batchswap/execution.hpp"
#include "batchswap/mechanism.hpp"
#include "batchswap/noshort.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <utility>

namespace batchswap {

std::string_view to_string(EngineKind k) {
  switch (k) {
    case EngineKind::Batch: return "batch";
    case EngineKind::BatchNoShort: return "batch-noshort";
    case EngineKind::LegacySequential: return "legacy-sequential";
  }
  return "?";
}

EngineKind engine_from_string(std::string_view text) {
  if (text == "batch") return EngineKind::Batch;
  if (text == "batch-noshort" || text == "noshort") return EngineKind::BatchNoShort;
  if (text == "legacy-sequential" || text == "legacy") return EngineKind::LegacySequential;
  throw std::invalid_argument("unknown engine \"" + std::string(text) + "\"");
}

std::string_view to_string(Model m) { return m == Model::Plain ? "plain" : "weak_fair_sequencing"; }

Model model_from_string(std::string_view text) {
  if (text == "plain") return Model::Plain;
  if (text == "weak_fair_sequencing" || text == "wfs") return Model::WeakFairSequencing;
  throw std::invalid_argument("unknown model \"" + std::string(text) + "\"");
}

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

BatchOutcome legacy_sequential_run(const PoolState& pool, std::span<const Order> ordered_orders, const Curve& curve) {
  detail::validate_orders(ordered_orders);
  BatchOutcome out;
  out.start_pool = pool;
  PoolState current = pool;
  out.trace.reserve(ordered_orders.size());
  for (const auto& o : ordered_orders) {
    const Execution e = execute_limit_order(curve, current, o.side, o.amount, o.limit_rate);
    TraceStep step;
    step.order_id = o.id;
    step.user = o.user;
    step.side = o.side;
    step.phase = Phase::Two;
    step.before = current;
    if (!e.pool_dx.is_zero()) current = curve.apply_trade(current, e.pool_dx, e.pool_dy);
    step.after = current;
    const Outcome gain = e.user_gain();
    step.dx = gain.dx;
    step.dy = gain.dy;
    step.fulfilled = e.fulfilled;
    out.trace.push_back(std::move(step));
  }
  out.end_pool = current;
  out.fills = detail::aggregate_fills(ordered_orders, out.trace, curve.rate(pool));
  out.per_user = detail::per_user_totals(out.fills);
  return out;
}

BatchOutcome run_engine(const Engine& engine, const PoolState& pool, std::span<const Order> orders,
                        const TieBreak& tiebreak, bool record_trace) {
  switch (engine.kind) {
    case EngineKind::Batch:
      return run_batch(pool, orders, tiebreak, engine.curve, record_trace);
    case EngineKind::BatchNoShort:
      return run_batch_noshort(pool, engine.ledger, orders, tiebreak, engine.curve, record_trace).batch;
    case EngineKind::LegacySequential: {
      // Block order follows the arrival field; in the plain model the producer sets it.
      std::vector<Order> sequence(orders.begin(), orders.end());
      std::stable_sort(sequence.begin(), sequence.end(), [](const Order& a, const Order& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.submit_index < b.submit_index;
      });
      BatchOutcome out = legacy_sequential_run(pool, sequence, engine.curve);
      if (!record_trace) out.trace.clear();
      return out;
    }
  }
  throw std::logic_error("unhandled engine kind");
}

// ---------------------------------------------------------------------------
// Sandwich
// ---------------------------------------------------------------------------

SandwichResult sandwich_attack(const PoolState& pool, const Order& victim, std::span<const Rational> front_amounts,
                               const Curve& curve) {
  if (victim.side != Side::BuyX) throw std::invalid_argument("sandwich victim must be a BuyX order");
  SandwichResult result;
  const std::string attacker = victim.user == "attacker" ? "attacker'" : "attacker";

  Order victim_order = victim;
  victim_order.submit_index = 1;
  for (const auto& a : front_amounts) {
    if (a.sign() <= 0 || a >= pool.x) continue;
    // Limits sit exactly at the post-trade rates, so both legs fill in full.
    const PoolState after_front = curve.apply_trade(pool, a, curve.trade_cost(pool, a));
    Order front{victim.id + 1, attacker, Side::BuyX, a, curve.rate(after_front), victim.arrival - Rational(1), 0};
    const std::vector<Order> first_two{front, victim_order};
    const PoolState after_victim = legacy_sequential_run(pool, first_two, curve).end_pool;
    const PoolState after_back = curve.apply_trade(after_victim, -a, curve.trade_cost(after_victim, -a));
    Order back{victim.id + 2, attacker, Side::SellX, a, curve.rate(after_back), victim.arrival + Rational(1), 2};

    const std::vector<Order> sequence{front, victim_order, back};
    BatchOutcome run = legacy_sequential_run(pool, sequence, curve);
    const Outcome gain = run.user_outcome(attacker);
    if (!gain.dx.is_zero()) throw InvariantViolation("sandwich legs did not cancel in X");
    result.points.push_back({a, gain.dy});
    if (gain.dy > result.best_profit) {
      result.best_profit = gain.dy;
      result.best_front_amount = a;
      result.best_run = std::move(run);
      result.best_orders = sequence;
    }
  }
  if (result.best_profit.sign() == 0) {
    result.best_orders = {victim_order};
    result.best_run = legacy_sequential_run(pool, result.best_orders, curve);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

StrategyGrid StrategyGrid::standard() {
  StrategyGrid g;
  for (int a = 1; a <= 5; ++a) g.amounts.emplace_back(a);
  g.rates = {Rational(1, 2), Rational(1), Rational(2), Rational(4)};
  return g;
}

std::size_t StrategyGrid::single_order_count() const {
  return amounts.size() * rates.size() * sides.size() * arrival_offsets.size();
}

std::size_t StrategyGrid::strategy_count() const {
  const std::size_t n = single_order_count();
  std::size_t total = 0;
  for (std::size_t k = 0; k <= max_orders; ++k) total += k == 0 ? 1 : binomial(n + k - 1, k);
  return total;
}

MultisetTable::MultisetTable(std::size_t options, std::size_t max_size) : width_(std::max<std::size_t>(1, max_size)) {
  sizes_.push_back(0);
  indices_.resize(width_, 0);
  if (options == 0) return;
  std::vector<std::uint32_t> current;
  for (std::size_t k = 1; k <= max_size; ++k) {
    current.assign(k, 0);
    while (true) {
      sizes_.push_back(static_cast<std::uint32_t>(k));
      const std::size_t base = indices_.size();
      indices_.resize(base + width_, 0);
      std::copy(current.begin(), current.end(), indices_.begin() + static_cast<std::ptrdiff_t>(base));
      // Next non-decreasing tuple.
      std::size_t pos = k;
      while (pos > 0 && current[pos - 1] + 1 == options) --pos;
      if (pos == 0) break;
      const std::uint32_t next = current[pos - 1] + 1;
      for (std::size_t p = pos - 1; p < k; ++p) current[p] = next;
    }
  }
}

// ---------------------------------------------------------------------------
// Arbitrage
// ---------------------------------------------------------------------------

std::optional<ArbWitness> find_arbitrage(const BatchOutcome& outcome, const std::string& user) {
  std::vector<const OrderFill*> fills;
  for (const auto& f : outcome.fills) {
    if (f.user == user && (!f.dx.is_zero() || !f.dy.is_zero())) fills.push_back(&f);
  }
  if (fills.size() > kMaxSubsetFills) {
    throw std::length_error("refusing to enumerate subsets of " + std::to_string(fills.size()) +
                            " fills (limit " + std::to_string(kMaxSubsetFills) + ")");
  }
  const std::uint32_t limit = 1U << fills.size();
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    Outcome sum;
    for (std::size_t i = 0; i < fills.size(); ++i) {
      if ((mask >> i) & 1U) sum += fills[i]->outcome();
    }
    if (sum.dx.sign() >= 0 && sum.dy.sign() >= 0 && (sum.dx.sign() > 0 || sum.dy.sign() > 0)) {
      ArbWitness w;
      w.user = user;
      w.gain = sum;
      for (std::size_t i = 0; i < fills.size(); ++i) {
        if ((mask >> i) & 1U) w.subset.push_back(fills[i]->order_id);
      }
      return w;
    }
  }
  return std::nullopt;
}

namespace {

struct OrderTemplate {
  Side side;
  Rational amount;
  Rational rate;
  Rational arrival;
};

std::vector<OrderTemplate> expand_grid(const StrategyGrid& grid, const Rational& arrival_base) {
  std::vector<OrderTemplate> out;
  out.reserve(grid.single_order_count());
  for (const auto side : grid.sides) {
    for (const auto& amount : grid.amounts) {
      for (const auto& rate : grid.rates) {
        for (const auto& offset : grid.arrival_offsets) {
          out.push_back({side, amount, rate, arrival_base + offset});
        }
      }
    }
  }
  return out;
}

struct Numbering {
  OrderId next_id = 0;
  std::uint64_t next_submit = 0;
};

Numbering numbering_after(std::span<const Order> orders) {
  Numbering n;
  for (const auto& o : orders) {
    n.next_id = std::max(n.next_id, o.id + 1);
    n.next_submit = std::max(n.next_submit, o.submit_index + 1);
  }
  return n;
}

void validate_grid(const StrategyGrid& grid) {
  for (const auto& o : grid.arrival_offsets) {
    if (o.sign() < 0) throw std::invalid_argument("arrival offsets must be non-negative, got " + o.str());
  }
  for (const auto& a : grid.amounts) {
    if (a.sign() < 0) throw std::invalid_argument("grid amounts must be non-negative, got " + a.str());
  }
  for (const auto& r : grid.rates) {
    if (r.sign() <= 0) throw std::invalid_argument("grid rates must be positive, got " + r.str());
  }
  if (grid.max_orders > 6) throw std::invalid_argument("max_orders above 6 is not supported");
}

Rational plain_arrival_base(const Scenario& s) {
  if (s.honest_orders.empty()) return s.adversary_type ? s.adversary_type->arrival : Rational(0);
  Rational earliest = s.honest_orders.front().arrival;
  for (const auto& o : s.honest_orders) earliest = min(earliest, o.arrival);
  return earliest - Rational(1);
}

// Evaluates item(i) for i in [0, count) and keeps the engaged results in index order.
template <class Result, class Eval>
std::vector<Result> evaluate_all(std::size_t count, const Eval& eval, bool parallel) {
  std::vector<Result> out;
  if (!parallel) {
    for (std::size_t i = 0; i < count; ++i) {
      if (auto r = eval(i)) out.push_back(std::move(*r));
    }
    return out;
  }

  std::vector<std::vector<std::pair<std::size_t, Result>>> per_thread(
      static_cast<std::size_t>(omp_get_max_threads()));
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel
  {
    auto& local = per_thread[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        if (auto r = eval(static_cast<std::size_t>(i))) local.emplace_back(static_cast<std::size_t>(i), std::move(*r));
      } catch (...) {
#pragma omp critical(batchswap_search_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::pair<std::size_t, Result>> merged;
  for (auto& local : per_thread) {
    std::move(local.begin(), local.end(), std::back_inserter(merged));
  }
  std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  out.reserve(merged.size());
  for (auto& [index, r] : merged) out.push_back(std::move(r));
  return out;
}

std::vector<ArbWitness> arbitrage_search(const Scenario& scenario, const StrategyGrid& grid, const Engine& engine,
                                         bool parallel) {
  validate_grid(grid);
  detail::validate_orders(scenario.honest_orders);
  const bool plain = scenario.model == Model::Plain;
  if (!plain && !scenario.adversary_type) {
    throw std::invalid_argument("weak fair-sequencing search needs the adversary's true arrival (adversary type)");
  }
  const Rational base = plain ? plain_arrival_base(scenario) : scenario.adversary_type->arrival;
  const std::vector<OrderTemplate> options = expand_grid(grid, base);
  const MultisetTable table(options.size(), grid.max_orders);

  const std::size_t honest_count = scenario.honest_orders.size();
  const std::size_t masks = plain && honest_count <= grid.censor_limit ? (std::size_t{1} << honest_count) : 1;
  const Numbering numbering = numbering_after(scenario.honest_orders);

  auto eval = [&](std::size_t item) -> std::optional<ArbWitness> {
    const std::size_t mask = item / table.size();
    const auto combo = table.at(item % table.size());

    std::vector<Order> orders;
    orders.reserve(honest_count + combo.size());
    std::vector<OrderId> censored;
    for (std::size_t h = 0; h < honest_count; ++h) {
      if ((mask >> h) & 1U) {
        censored.push_back(scenario.honest_orders[h].id);
      } else {
        orders.push_back(scenario.honest_orders[h]);
      }
    }
    const std::size_t first_strategic = orders.size();
    for (std::size_t k = 0; k < combo.size(); ++k) {
      const OrderTemplate& t = options[combo[k]];
      orders.push_back(Order{numbering.next_id + k, scenario.adversary_user, t.side, t.amount, t.rate, t.arrival,
                             numbering.next_submit + k});
    }
    const BatchOutcome outcome = run_engine(engine, scenario.pool, orders, scenario.tiebreak);
    std::optional<ArbWitness> w = find_arbitrage(outcome, scenario.adversary_user);
    if (w) {
      w->strategic_orders.assign(orders.begin() + static_cast<std::ptrdiff_t>(first_strategic), orders.end());
      w->batch_orders = std::move(orders);
      w->censored = std::move(censored);
    }
    return w;
  };
  return evaluate_all<ArbWitness>(masks * table.size(), eval, parallel);
}

bool shares_arrival(std::span<const Order> deviation, std::span<const Order> others) {
  for (const auto& d : deviation) {
    for (const auto& o : others) {
      if (o.arrival == d.arrival) return true;
    }
  }
  return false;
}

struct IcItem {
  std::optional<IcCounterexample> counterexample;
  bool refuted = false;
};

// Shared deviation harness. `judge` gets the deviant outcome and fills in an IcItem.
template <class Judge>
IcReport deviation_search(const Scenario& scenario, const Order& honest_order, const StrategyGrid& grid,
                          const Engine& engine, const Judge& judge, bool parallel) {
  validate_grid(grid);
  const std::string& user = scenario.adversary_user;
  for (const auto& o : scenario.honest_orders) {
    if (o.user == user) throw std::invalid_argument("honest orders must not belong to the strategic user " + user);
  }
  const Rational& alpha = honest_order.arrival;
  for (const auto& dev : scenario.extra_deviations) {
    for (const auto& o : dev) {
      if (o.user != user) throw std::invalid_argument("extra deviation order not owned by " + user);
      if (scenario.model == Model::WeakFairSequencing && o.arrival < alpha) {
        throw std::invalid_argument("extra deviation backdates arrival below alpha* in the weak fair-sequencing model");
      }
    }
  }

  const Rational base = scenario.model == Model::Plain ? plain_arrival_base(scenario) : alpha;
  const std::vector<OrderTemplate> options = expand_grid(grid, base);
  const MultisetTable table(options.size(), grid.max_orders);
  const Numbering numbering = numbering_after(scenario.honest_orders);

  std::vector<Order> honest_run = scenario.honest_orders;
  honest_run.push_back(honest_order);
  const Outcome honest = run_engine(engine, scenario.pool, honest_run, scenario.tiebreak).user_outcome(user);

  auto eval = [&](std::size_t item) -> std::optional<IcItem> {
    std::vector<Order> orders = scenario.honest_orders;
    std::vector<Order> deviation;
    if (item < table.size()) {
      const auto combo = table.at(item);
      for (std::size_t k = 0; k < combo.size(); ++k) {
        const OrderTemplate& t = options[combo[k]];
        deviation.push_back(
            Order{numbering.next_id + k, user, t.side, t.amount, t.rate, t.arrival, numbering.next_submit + k});
      }
    } else {
      deviation = scenario.extra_deviations[item - table.size()];
    }
    orders.insert(orders.end(), deviation.begin(), deviation.end());
    const Outcome deviant = run_engine(engine, scenario.pool, orders, scenario.tiebreak).user_outcome(user);
    IcItem result = judge(honest, deviant);
    if (result.counterexample) {
      result.counterexample->deviation = deviation;
      result.counterexample->honest = honest;
      result.counterexample->deviant = deviant;
      result.counterexample->ties_honest_arrival = shares_arrival(deviation, scenario.honest_orders);
    }
    if (!result.counterexample && !result.refuted) return std::nullopt;
    return result;
  };

  const std::size_t count = table.size() + scenario.extra_deviations.size();
  IcReport report;
  report.honest = honest;
  report.deviations_checked = count;
  for (auto& item : evaluate_all<IcItem>(count, eval, parallel)) {
    if (item.refuted) ++report.refuted;
    if (item.counterexample) report.counterexamples.push_back(std::move(*item.counterexample));
  }
  return report;
}

IcReport partial_order_search(const Scenario& scenario, const UserType& type, const StrategyGrid& grid,
                              const Engine& engine, bool parallel) {
  const Order honest_order = honest_strategy(type, scenario.adversary_user,
                                             numbering_after(scenario.honest_orders).next_id,
                                             numbering_after(scenario.honest_orders).next_submit);
  auto judge = [&type](const Outcome& honest, const Outcome& deviant) {
    IcItem item;
    item.refuted = refutes_dominance(type, honest, deviant);
    const Comparison c = compare(type, deviant, honest);
    if (c == Comparison::Better) {
      item.counterexample = IcCounterexample{};
      item.counterexample->comparison = c;
    }
    return item;
  };
  return deviation_search(scenario, honest_order, grid, engine, judge, parallel);
}

IcReport total_order_search(const Scenario& scenario, const Rational& belief, const StrategyGrid& grid,
                            const Engine& engine, bool parallel) {
  if (!scenario.adversary_type) throw std::invalid_argument("total-order search needs the adversary's arrival");
  const auto it = engine.ledger.find(scenario.adversary_user);
  if (it == engine.ledger.end()) throw std::invalid_argument("strategic user has no ledger position");
  const Numbering numbering = numbering_after(scenario.honest_orders);
  const Order honest_order =
      honest_strategy_noshort(belief, it->second, engine.curve.rate(scenario.pool), scenario.adversary_type->arrival,
                              scenario.adversary_user, numbering.next_id, numbering.next_submit);
  auto judge = [&belief](const Outcome& honest, const Outcome& deviant) {
    IcItem item;
    const Rational hv = total_value(belief, honest);
    const Rational dv = total_value(belief, deviant);
    if (dv > hv) {
      item.counterexample = IcCounterexample{};
      item.counterexample->comparison = Comparison::Better;
      item.counterexample->honest_value = hv;
      item.counterexample->deviant_value = dv;
    }
    return item;
  };
  return deviation_search(scenario, honest_order, grid, engine, judge, parallel);
}

}  // namespace

std::vector<ArbWitness> search_arbitrage(const Scenario& scenario, const StrategyGrid& grid, const Engine& engine) {
  return arbitrage_search(scenario, grid, engine, true);
}

IcReport search_ic_deviations(const Scenario& scenario, const UserType& type, const StrategyGrid& grid,
                              const Engine& engine) {
  return partial_order_search(scenario, type, grid, engine, true);
}

IcReport search_ic_total_order(const Scenario& scenario, const Rational& belief_rate, const StrategyGrid& grid,
                               const Engine& engine) {
  return total_order_search(scenario, belief_rate, grid, engine, true);
}

namespace serial {

std::vector<ArbWitness> search_arbitrage(const Scenario& scenario, const StrategyGrid& grid, const Engine& engine) {
  return arbitrage_search(scenario, grid, engine, false);
}

IcReport search_ic_deviations(const Scenario& scenario, const UserType& type, const StrategyGrid& grid,
                              const Engine& engine) {
  return partial_order_search(scenario, type, grid, engine, false);
}

IcReport search_ic_total_order(const Scenario& scenario, const Rational& belief_rate, const StrategyGrid& grid,
                               const Engine& engine) {
  return total_order_search(scenario, belief_rate, grid, engine, false);
}

}  // namespace serial

// ---------------------------------------------------------------------------
// IC => AR conversion
// ---------------------------------------------------------------------------

ConvertedScenario arbitrage_to_ic_violation(const ArbWitness& witness, const Scenario& scenario) {
  if (witness.subset.empty()) throw std::invalid_argument("witness has an empty profitable subset");
  if (witness.gain.dx.sign() < 0 || witness.gain.dy.sign() < 0 ||
      (witness.gain.dx.sign() == 0 && witness.gain.dy.sign() == 0)) {
    throw std::invalid_argument("witness gain is not a riskless profit");
  }
  for (const auto& o : scenario.honest_orders) {
    const bool present = std::any_of(witness.batch_orders.begin(), witness.batch_orders.end(),
                                     [&](const Order& b) { return b.id == o.id; });
    const bool censored = std::find(witness.censored.begin(), witness.censored.end(), o.id) != witness.censored.end();
    if (!present && !censored) {
      throw std::invalid_argument("scenario order " + std::to_string(o.id) + " is not accounted for by the witness");
    }
  }

  ConvertedScenario out;
  Scenario& s = out.scenario;
  s.pool = scenario.pool;
  s.tiebreak = scenario.tiebreak;
  s.model = Model::WeakFairSequencing;
  s.adversary_user = witness.user + "/injector";

  std::vector<Order> injected;
  for (const auto& o : witness.batch_orders) {
    const bool in_subset = std::find(witness.subset.begin(), witness.subset.end(), o.id) != witness.subset.end();
    if (in_subset) {
      Order copy = o;
      copy.user = s.adversary_user;
      injected.push_back(std::move(copy));
    } else {
      Order copy = o;
      // Residual strategic orders keep trading, just no longer as the injector.
      if (copy.user == witness.user) copy.user = witness.user + "/residual";
      s.honest_orders.push_back(std::move(copy));
    }
  }
  if (injected.size() != witness.subset.size()) {
    throw std::invalid_argument("witness subset names orders missing from its batch");
  }

  Rational earliest = injected.front().arrival;
  for (const auto& o : injected) earliest = min(earliest, o.arrival);
  out.zero_demand_type = UserType{Side::BuyX, Rational(0), Rational(1), earliest};
  s.adversary_type = out.zero_demand_type;
  s.extra_deviations.push_back(std::move(injected));
  return out;
}

}  // namespace batchswap
