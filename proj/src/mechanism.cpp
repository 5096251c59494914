#include "batchswap/mechanism.hpp"

#include "batchswap/execution.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace batchswap {

namespace {

constexpr std::uint64_t kSellGroupTag = 0x53454c4cULL;  // "SELL"
constexpr std::uint64_t kBuyGroupTag = 0x00425559ULL;   // "BUY"

// Unbiased draw from [0, bound) using rejection on the raw 64-bit stream.
std::uint64_t draw_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound);
  std::uint64_t v = gen();
  while (v >= limit) v = gen();
  return v % bound;
}

bool arrival_less(const Order& a, const Order& b) {
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.submit_index < b.submit_index;
}

TraceStep make_step(const SubOrder& sub, Phase phase, const PoolState& before, const PoolState& after,
                    const Execution& e) {
  TraceStep step;
  step.order_id = sub.order.id;
  step.user = sub.order.user;
  step.side = sub.order.side;
  step.part = sub.part;
  step.phase = phase;
  step.before = before;
  step.after = after;
  const Outcome gain = e.user_gain();
  step.dx = gain.dx;
  step.dy = gain.dy;
  step.fulfilled = e.fulfilled;
  return step;
}

}  // namespace

Eligibility filter_eligible(std::span<const Order> orders, const Rational& r0) {
  Eligibility out;
  for (const auto& o : orders) {
    const bool skip = takes_x(o.side) ? o.limit_rate < r0 : o.limit_rate > r0;
    (skip ? out.skipped : out.kept).push_back(o);
  }
  return out;
}

Rational beta(const Order& order, const Rational& r0) {
  switch (order.side) {
    case Side::BuyX: return order.amount;
    case Side::SellX: return -order.amount;
    case Side::BuyY: return -(order.amount / r0);
    case Side::SellY: return order.amount / r0;
  }
  return Rational(0);
}

Dominance classify_dominance(std::span<const Order> orders, const Rational& r0) {
  Rational sigma;
  for (const auto& o : orders) sigma += beta(o, r0);
  return sigma.sign() >= 0 ? Dominance::BuyXDominant : Dominance::BuyYDominant;
}

namespace detail {

void order_group(std::vector<Order>& group, const TieBreak& tiebreak, std::uint64_t group_tag) {
  if (tiebreak.mode == TieBreak::Mode::ArrivalStable) {
    std::stable_sort(group.begin(), group.end(), arrival_less);
    return;
  }
  // Canonical base order first so the permutation depends only on (seed, orders).
  std::stable_sort(group.begin(), group.end(),
                   [](const Order& a, const Order& b) { return a.submit_index < b.submit_index; });
  std::seed_seq seq{static_cast<std::uint32_t>(tiebreak.seed), static_cast<std::uint32_t>(tiebreak.seed >> 32),
                    static_cast<std::uint32_t>(group_tag)};
  std::mt19937_64 gen(seq);
  for (std::size_t i = group.size(); i > 1; --i) {
    const std::size_t k = static_cast<std::size_t>(draw_below(gen, i));
    std::swap(group[i - 1], group[k]);
  }
}

std::vector<Order> group_sort(std::span<const Order> eligible, Dominance dominance, const TieBreak& tiebreak) {
  std::vector<Order> sells;  // SellX / BuyY
  std::vector<Order> buys;   // BuyX / SellY
  for (const auto& o : eligible) (takes_x(o.side) ? buys : sells).push_back(o);
  order_group(sells, tiebreak, kSellGroupTag);
  order_group(buys, tiebreak, kBuyGroupTag);

  std::vector<Order>& first = dominance == Dominance::BuyXDominant ? sells : buys;
  std::vector<Order>& second = dominance == Dominance::BuyXDominant ? buys : sells;
  first.insert(first.end(), std::make_move_iterator(second.begin()), std::make_move_iterator(second.end()));
  return std::move(first);
}

void validate_orders(std::span<const Order> orders) {
  std::set<OrderId> ids;
  for (const auto& o : orders) {
    o.validate();
    if (!ids.insert(o.id).second) throw std::invalid_argument("duplicate order id " + std::to_string(o.id));
  }
}

std::vector<OrderFill> aggregate_fills(std::span<const Order> orders, std::span<const TraceStep> steps,
                                       const Rational& r0) {
  std::unordered_map<OrderId, std::size_t> index;
  std::vector<OrderFill> fills;
  fills.reserve(orders.size());
  for (const auto& o : orders) {
    index.emplace(o.id, fills.size());
    OrderFill f;
    f.order_id = o.id;
    f.user = o.user;
    f.side = o.side;
    f.phase = Phase::Skipped;
    fills.push_back(std::move(f));
  }
  for (const auto& s : steps) {
    OrderFill& f = fills[index.at(s.order_id)];
    f.fulfilled += s.fulfilled;
    f.dx += s.dx;
    f.dy += s.dy;
    // A split order reports Phase One: its head ran at the fixed rate.
    if (f.phase == Phase::Skipped || s.phase == Phase::One) f.phase = s.phase;
  }
  for (std::size_t i = 0; i < fills.size(); ++i) {
    OrderFill& f = fills[i];
    if (!f.dx.is_zero()) {
      f.avg_rate = (f.dy / f.dx).abs();
    } else {
      f.avg_rate = f.phase == Phase::One ? r0 : orders[i].limit_rate;
    }
  }
  return fills;
}

std::map<std::string, Outcome> per_user_totals(std::span<const OrderFill> fills) {
  std::map<std::string, Outcome> totals;
  for (const auto& f : fills) totals[f.user] += f.outcome();
  return totals;
}

}  // namespace detail

SortedBatch sort_and_split(std::span<const Order> eligible, Dominance dominance, const TieBreak& tiebreak,
                           const Rational& r0) {
  SortedBatch out;
  std::vector<Order> sorted = detail::group_sort(eligible, dominance, tiebreak);
  const Rational sign(dominance == Dominance::BuyXDominant ? 1 : -1);
  out.orders.reserve(sorted.size() + 1);

  // Minority group sits in front; its signed beta sum is <= 0.
  Rational running;
  std::size_t i = 0;
  for (; i < sorted.size() && takes_x(sorted[i].side) != (sign.sign() > 0); ++i) {
    running += beta(sorted[i], r0) * sign;
    out.orders.push_back({std::move(sorted[i]), -1});
  }

  bool closed = running.is_zero();
  if (closed) out.phase1_count = out.orders.size();
  for (; i < sorted.size(); ++i) {
    Order& o = sorted[i];
    if (closed) {
      out.orders.push_back({std::move(o), -1});
      continue;
    }
    const Rational after = running + beta(o, r0) * sign;
    if (after.sign() <= 0) {
      running = after;
      out.orders.push_back({std::move(o), -1});
      if (after.is_zero()) {
        closed = true;
        out.phase1_count = out.orders.size();
      }
      continue;
    }
    // Split so the head exactly cancels the remaining deficit.
    const Rational need = -running;
    Order head = o;
    head.amount = y_denominated(o.side) ? need * r0 : need;
    o.amount -= head.amount;
    out.split = Split{head.id, head.amount, o.amount};
    out.orders.push_back({std::move(head), 0});
    out.phase1_count = out.orders.size();
    out.orders.push_back({std::move(o), 1});
    closed = true;
  }
  if (!closed) {
    throw InvariantViolation("majority group cannot cover the minority side; dominance misclassified");
  }
  return out;
}

PhaseResult execute_phase1(const PoolState& pool, std::span<const SubOrder> prefix, const Rational& r0) {
  PhaseResult out;
  out.end_pool = pool;
  Rational net_x;
  Rational net_y;
  out.steps.reserve(prefix.size());
  for (const auto& sub : prefix) {
    const Execution e = execute_at_fixed_rate(sub.order.side, sub.order.amount, r0);
    net_x += e.pool_dx;
    net_y += e.pool_dy;
    out.steps.push_back(make_step(sub, Phase::One, pool, pool, e));
  }
  if (!net_x.is_zero() || !net_y.is_zero()) {
    throw InvariantViolation("phase 1 prefix does not net to zero: (" + net_x.str() + ", " + net_y.str() + ")");
  }
  return out;
}

PhaseResult execute_phase2(const Curve& curve, const PoolState& pool, std::span<const SubOrder> suffix) {
  PhaseResult out;
  out.end_pool = pool;
  out.steps.reserve(suffix.size());
  for (const auto& sub : suffix) {
    const Execution e =
        execute_limit_order(curve, out.end_pool, sub.order.side, sub.order.amount, sub.order.limit_rate);
    PoolState before = out.end_pool;
    if (!e.pool_dx.is_zero()) out.end_pool = curve.apply_trade(out.end_pool, e.pool_dx, e.pool_dy);
    out.steps.push_back(make_step(sub, Phase::Two, before, out.end_pool, e));
  }
  return out;
}

BatchOutcome run_batch(const PoolState& pool, std::span<const Order> orders, const TieBreak& tiebreak,
                       const Curve& curve, bool record_trace) {
  detail::validate_orders(orders);
  const Rational r0 = curve.rate(pool);

  const Eligibility eligible = filter_eligible(orders, r0);
  BatchOutcome out;
  out.start_pool = pool;
  out.dominance = classify_dominance(eligible.kept, r0);
  SortedBatch sorted = sort_and_split(eligible.kept, out.dominance, tiebreak, r0);
  out.split = sorted.split;

  const std::span<const SubOrder> all(sorted.orders);
  PhaseResult one = execute_phase1(pool, all.first(sorted.phase1_count), r0);
  PhaseResult two = execute_phase2(curve, one.end_pool, all.subspan(sorted.phase1_count));

  out.end_pool = two.end_pool;
  out.trace = std::move(one.steps);
  out.trace.insert(out.trace.end(), std::make_move_iterator(two.steps.begin()),
                   std::make_move_iterator(two.steps.end()));
  out.fills = detail::aggregate_fills(orders, out.trace, r0);
  out.per_user = detail::per_user_totals(out.fills);

  if (curve.phi(out.start_pool) != curve.phi(out.end_pool)) {
    throw InvariantViolation("batch moved the potential from " + curve.phi(out.start_pool).str() + " to " +
                             curve.phi(out.end_pool).str());
  }
  if (!record_trace) out.trace.clear();
  return out;
}

Order honest_strategy(const UserType& type, std::string user, OrderId id, std::uint64_t submit_index) {
  Order o;
  o.id = id;
  o.user = std::move(user);
  o.side = type.side;
  o.amount = type.demand;
  o.limit_rate = type.rate;
  o.arrival = type.arrival;
  o.submit_index = submit_index;
  return o;
}

}  // namespace batchswap
