#include "batchswap/noshort.hpp"

#include "batchswap/execution.hpp"

namespace batchswap {

namespace {

Budget budget_of(const Position& p) { return Budget{p.x, p.y}; }

void apply_gain(Position& p, const Outcome& gain) {
  p.x += gain.dx;
  p.y += gain.dy;
  if (p.x.sign() < 0 || p.y.sign() < 0) {
    throw InvariantViolation("position went negative: (" + p.x.str() + ", " + p.y.str() + ")");
  }
}

OrderFill fill_from(const Order& order, const Execution& e, Phase phase, const Rational& fallback_rate) {
  OrderFill f;
  f.order_id = order.id;
  f.user = order.user;
  f.side = order.side;
  f.fulfilled = e.fulfilled;
  f.phase = phase;
  const Outcome gain = e.user_gain();
  f.dx = gain.dx;
  f.dy = gain.dy;
  f.avg_rate = f.dx.is_zero() ? fallback_rate : (f.dy / f.dx).abs();
  return f;
}

// Net X gains of sequential trial executions at r0; the ledger is a scratch copy.
std::vector<Rational> trial_gains(std::span<const Order> orders, const Rational& r0, Ledger scratch) {
  std::vector<Rational> gains;
  gains.reserve(orders.size());
  for (const auto& o : orders) {
    auto& pos = scratch.at(o.user);
    const Execution e = execute_at_fixed_rate(o.side, o.amount, r0, budget_of(pos));
    apply_gain(pos, e.user_gain());
    gains.push_back(e.pool_dx);
  }
  return gains;
}

TraceStep step_from(const OrderFill& f, int part, const PoolState& before, const PoolState& after,
                    const Position& pos) {
  TraceStep s;
  s.order_id = f.order_id;
  s.user = f.user;
  s.side = f.side;
  s.part = part;
  s.phase = f.phase;
  s.before = before;
  s.after = after;
  s.dx = f.dx;
  s.dy = f.dy;
  s.fulfilled = f.fulfilled;
  s.position_after = pos;
  return s;
}

}  // namespace

OrderFill safe_execute_phase1(const Order& order, const Rational& r0, Ledger& ledger) {
  const auto it = ledger.find(order.user);
  if (it == ledger.end()) return fill_from(order, Execution{}, Phase::Skipped, order.limit_rate);
  const Execution e = execute_at_fixed_rate(order.side, order.amount, r0, budget_of(it->second));
  apply_gain(it->second, e.user_gain());
  return fill_from(order, e, Phase::One, r0);
}

SafeExecution safe_execute_phase2(const Order& order, const PoolState& pool, Ledger& ledger, const Curve& curve) {
  const auto it = ledger.find(order.user);
  if (it == ledger.end()) return {fill_from(order, Execution{}, Phase::Skipped, order.limit_rate), pool};
  const Execution e =
      execute_limit_order(curve, pool, order.side, order.amount, order.limit_rate, budget_of(it->second));
  SafeExecution out{fill_from(order, e, Phase::Two, order.limit_rate), pool};
  if (!e.pool_dx.is_zero()) out.pool = curve.apply_trade(pool, e.pool_dx, e.pool_dy);
  apply_gain(it->second, e.user_gain());
  return out;
}

NoShortOutcome run_batch_noshort(const PoolState& pool, const Ledger& ledger, std::span<const Order> orders,
                                 const TieBreak& tiebreak, const Curve& curve, bool record_trace) {
  detail::validate_orders(orders);
  for (const auto& [user, pos] : ledger) {
    if (pos.x.sign() < 0 || pos.y.sign() < 0) throw std::invalid_argument("negative ledger balance for " + user);
  }
  const Rational r0 = curve.rate(pool);

  // Orders from users without a ledger entry cannot trade at all.
  std::vector<Order> known;
  for (const auto& o : orders) {
    if (ledger.contains(o.user)) known.push_back(o);
  }
  const Eligibility eligible = filter_eligible(known, r0);

  NoShortOutcome out;
  out.ledger = ledger;
  BatchOutcome& batch = out.batch;
  batch.start_pool = pool;

  // Trial classification in the sell-first arrangement.
  const std::vector<Order> trial_order = detail::group_sort(eligible.kept, Dominance::BuyXDominant, tiebreak);
  Rational sigma;
  for (const auto& g : trial_gains(trial_order, r0, ledger)) sigma += g;
  batch.dominance = sigma.sign() >= 0 ? Dominance::BuyXDominant : Dominance::BuyYDominant;

  std::vector<Order> sorted = detail::group_sort(eligible.kept, batch.dominance, tiebreak);
  const std::vector<Rational> gains = trial_gains(sorted, r0, ledger);
  const Rational sign(batch.dominance == Dominance::BuyXDominant ? 1 : -1);

  std::vector<SubOrder> subs;
  subs.reserve(sorted.size() + 1);
  std::size_t j = 0;
  bool closed = false;
  Rational running;
  std::size_t i = 0;
  // Minority group first.
  for (; i < sorted.size() && takes_x(sorted[i].side) != (sign.sign() > 0); ++i) {
    running += gains[i] * sign;
    subs.push_back({sorted[i], -1});
  }
  if (running.is_zero()) {
    closed = true;
    j = subs.size();
  }
  for (; i < sorted.size(); ++i) {
    if (closed) {
      subs.push_back({sorted[i], -1});
      continue;
    }
    const Rational after = running + gains[i] * sign;
    if (after.sign() <= 0) {
      running = after;
      subs.push_back({sorted[i], -1});
      if (after.is_zero()) {
        closed = true;
        j = subs.size();
      }
      continue;
    }
    const Rational need = -running;
    Order head = sorted[i];
    Order tail = sorted[i];
    head.amount = y_denominated(head.side) ? need * r0 : need;
    tail.amount -= head.amount;
    batch.split = Split{head.id, head.amount, tail.amount};
    subs.push_back({std::move(head), 0});
    j = subs.size();
    subs.push_back({std::move(tail), 1});
    closed = true;
  }
  if (!closed) throw InvariantViolation("no-short trial gains cannot balance the minority side");

  std::vector<TraceStep> steps;
  steps.reserve(subs.size());
  Rational net_x;
  for (std::size_t k = 0; k < j; ++k) {
    const OrderFill f = safe_execute_phase1(subs[k].order, r0, out.ledger);
    net_x += f.dx;
    steps.push_back(step_from(f, subs[k].part, pool, pool, out.ledger.at(f.user)));
  }
  if (!net_x.is_zero()) throw InvariantViolation("no-short phase 1 does not net to zero: " + net_x.str());

  PoolState current = pool;
  for (std::size_t k = j; k < subs.size(); ++k) {
    SafeExecution e = safe_execute_phase2(subs[k].order, current, out.ledger, curve);
    steps.push_back(step_from(e.fill, subs[k].part, current, e.pool, out.ledger.at(e.fill.user)));
    current = std::move(e.pool);
  }

  batch.end_pool = current;
  batch.fills = detail::aggregate_fills(orders, steps, r0);
  batch.per_user = detail::per_user_totals(batch.fills);
  batch.trace = std::move(steps);
  if (curve.phi(batch.start_pool) != curve.phi(batch.end_pool)) {
    throw InvariantViolation("no-short batch moved the potential");
  }
  if (!record_trace) batch.trace.clear();
  return out;
}

Order honest_strategy_noshort(const Rational& belief_rate, const Position& position, const Rational& r0,
                              const Rational& arrival, std::string user, OrderId id, std::uint64_t submit_index) {
  Order o;
  o.id = id;
  o.user = std::move(user);
  o.limit_rate = belief_rate;
  o.arrival = arrival;
  o.submit_index = submit_index;
  if (belief_rate > r0) {
    o.side = Side::SellY;
    o.amount = position.y;
  } else if (belief_rate < r0) {
    o.side = Side::SellX;
    o.amount = position.x;
  } else {
    o.side = Side::SellX;
    o.amount = Rational(0);
  }
  return o;
}

}  // namespace batchswap
