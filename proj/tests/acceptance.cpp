// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the number of failures.
#include "batchswap/adversary.hpp"
#include "batchswap/execution.hpp"
#include "batchswap/mechanism.hpp"
#include "batchswap/noshort.hpp"
#include "fuzz.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using namespace batchswap;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_secs(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << "s";
  return o.str();
}

Order order(OrderId id, std::string user, Side side, long amount, Rational rate, long arrival) {
  return Order{id, std::move(user), side, Rational(amount), std::move(rate), Rational(arrival), id};
}

StrategyGrid full_grid() {
  StrategyGrid g = StrategyGrid::standard();  // amounts 1..5, rates 1/2,1,2,4, all sides, up to 3 orders
  return g;
}

StrategyGrid ic_grid() {
  StrategyGrid g = StrategyGrid::standard();
  g.max_orders = 2;
  g.arrival_offsets = {Rational(0), Rational(1), Rational(2)};
  return g;
}

// Honest sets with at most three orders. Plain-model censorship covers every subset of each.
std::vector<Scenario> honest_sets() {
  Scenario a;
  a.pool = PoolState(Rational(10), Rational(10));
  a.honest_orders = {order(1, "h1", Side::BuyX, 3, Rational(2), 1), order(2, "h2", Side::SellX, 2, Rational(1, 2), 2),
                     order(3, "h3", Side::BuyY, 4, Rational(1, 2), 3)};
  a.adversary_type = UserType{Side::BuyX, Rational(0), Rational(1), Rational(2)};

  Scenario b;
  b.pool = PoolState(Rational(10), Rational(20));
  b.honest_orders = {order(1, "h1", Side::SellX, 4, Rational(1), 1), order(2, "h2", Side::SellY, 3, Rational(4), 1),
                     order(3, "h3", Side::BuyX, 1, Rational(2), 2)};
  b.adversary_type = UserType{Side::BuyX, Rational(0), Rational(1), Rational(1)};
  return {a, b};
}

std::vector<TieBreak> tiebreaks() { return {TieBreak::arrival_stable(), TieBreak::random(0x5eed0001)}; }

Scenario sandwich_scenario() {
  Scenario s;
  s.pool = PoolState(Rational(100), Rational(100));
  s.honest_orders = {order(1, "victim", Side::BuyX, 10, Rational(3, 2), 5)};
  s.adversary_user = "attacker";
  s.model = Model::Plain;
  s.adversary_type = UserType{Side::BuyX, Rational(0), Rational(1), Rational(5)};
  return s;
}

StrategyGrid sandwich_grid() {
  StrategyGrid g = StrategyGrid::standard();
  g.max_orders = 2;
  g.arrival_offsets = {Rational(0), Rational(2)};
  return g;
}

std::vector<Rational> sandwich_amounts() {
  std::vector<Rational> v;
  for (int a = 1; a <= 40; ++a) v.emplace_back(a);
  return v;
}

// ---------------------------------------------------------------------------

Verdict c1_conservation() {
  const auto t0 = Clock::now();
  fuzz::Fuzzer f(1001);
  const Curve c;
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const PoolState p = f.pool(10000);
    const auto orders = f.orders(p, 8);
    const BatchOutcome out = run_batch(p, orders, f.tiebreak(), c, false);
    if (c.phi(out.end_pool) != c.phi(p)) ++bad;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < 30, "1000 batches, " + std::to_string(bad) + " violations, " + fmt_secs(secs)};
}

Verdict c2_worked_trace() {
  const PoolState p(Rational(100), Rational(100));
  const std::vector<Order> batch{order(1, "seller", Side::SellX, 4, Rational(1, 2), 1),
                                 order(2, "buyer", Side::BuyX, 10, Rational(2), 2)};
  const BatchOutcome out = run_batch(p, batch, TieBreak::arrival_stable());
  const bool pool_ok = out.end_pool == PoolState(Rational(94), Rational(5000, 47));
  const bool seller_ok = out.user_outcome("seller") == Outcome{Rational(-4), Rational(4)};
  const bool buyer_ok = out.user_outcome("buyer") == Outcome{Rational(10), Rational(-488, 47)};
  return {pool_ok && seller_ok && buyer_ok, "end pool (" + out.end_pool.x.str() + ", " + out.end_pool.y.str() +
                                                "), buyer dy " + out.user_outcome("buyer").dy.str()};
}

Verdict c3_arbitrage_resilience() {
  const auto t0 = Clock::now();
  const StrategyGrid grid = full_grid();
  std::size_t witnesses = 0;
  std::size_t searches = 0;
  for (Scenario s : honest_sets()) {
    for (const Model m : {Model::Plain, Model::WeakFairSequencing}) {
      for (const TieBreak& tb : tiebreaks()) {
        s.model = m;
        s.tiebreak = tb;
        witnesses += search_arbitrage(s, grid).size();
        ++searches;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {witnesses == 0 && secs < 300, std::to_string(searches) + " searches x " + std::to_string(grid.strategy_count()) +
                                            " strategies, " + std::to_string(witnesses) + " witnesses, " + fmt_secs(secs)};
}

std::vector<UserType> ic_types() {
  std::vector<UserType> types;
  for (const Side side : {Side::BuyX, Side::SellX, Side::BuyY, Side::SellY}) {
    for (const long demand : {1L, 3L}) {
      for (const Rational& rate : {Rational(1, 2), Rational(1), Rational(2)}) {
        types.push_back(UserType{side, Rational(demand), rate, Rational(2)});
      }
    }
  }
  return types;
}

Verdict c4_incentive_compatibility() {
  const auto t0 = Clock::now();
  const StrategyGrid grid = ic_grid();
  std::size_t flagged = 0;
  std::size_t checked = 0;
  std::size_t tied = 0;
  Scenario s = honest_sets().front();
  s.model = Model::WeakFairSequencing;
  s.tiebreak = TieBreak::arrival_stable();
  const auto types = ic_types();
  for (const auto& t : types) {
    s.adversary_type = t;
    const IcReport r = search_ic_deviations(s, t, grid);
    flagged += r.counterexamples.size();
    checked += r.deviations_checked;
    for (const auto& c : r.counterexamples) tied += c.ties_honest_arrival ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {flagged == 0 && secs < 600 && types.size() >= 20,
          std::to_string(types.size()) + " types, " + std::to_string(checked) + " deviations, " + std::to_string(flagged) +
              " counterexamples (" + std::to_string(tied) + " at tied arrivals), " + fmt_secs(secs)};
}

struct LegacyFindings {
  SandwichResult sandwich;
  std::vector<ArbWitness> witnesses;
  std::size_t ic_counterexamples = 0;
};

const LegacyFindings& legacy_findings() {
  static const LegacyFindings findings = [] {
    LegacyFindings lf;
    const Scenario s = sandwich_scenario();
    lf.sandwich = sandwich_attack(s.pool, s.honest_orders.front(), sandwich_amounts());
    Engine legacy;
    legacy.kind = EngineKind::LegacySequential;
    lf.witnesses = search_arbitrage(s, sandwich_grid(), legacy);
    lf.ic_counterexamples = search_ic_deviations(s, *s.adversary_type, sandwich_grid(), legacy).counterexamples.size();
    return lf;
  }();
  return findings;
}

Verdict c5_negative_control() {
  const LegacyFindings& lf = legacy_findings();
  const bool ok = lf.sandwich.best_profit > Rational(0) && lf.ic_counterexamples > 0;
  return {ok, "best front-run " + lf.sandwich.best_front_amount.str() + ", profit ~" +
                  lf.sandwich.best_profit.decimal(6) + ", " + std::to_string(lf.witnesses.size()) + " grid witnesses, " +
                  std::to_string(lf.ic_counterexamples) + " IC counterexamples"};
}

Verdict c6_fact_properties() {
  fuzz::Fuzzer f(6006);
  const Curve c;
  std::size_t mc_bad = 0;
  std::size_t nfl_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const PoolState p = f.pool(10000);
    const Rational level = c.phi(p);
    const Rational x2 = f.positive(10000);
    const PoolState q(x2, level / x2);
    const bool ok = x2 <= p.x ? c.rate(p) <= c.rate(q) : c.rate(q) <= c.rate(p);
    if (!ok) ++mc_bad;
  }
  for (int i = 0; i < 10000; ++i) {
    const PoolState p = f.pool(10000);
    const auto orders = f.orders(p, 1);
    if (orders.empty()) {
      --i;
      continue;
    }
    const Order& o = orders.front();
    const Execution e = execute_limit_order(c, p, o.side, o.amount, o.limit_rate);
    const Outcome g = e.user_gain();
    if ((!g.dx.is_zero() || !g.dy.is_zero()) && g.dx.sign() * g.dy.sign() >= 0) ++nfl_bad;
  }
  return {mc_bad == 0 && nfl_bad == 0, "10000 level-set pairs, " + std::to_string(mc_bad) + " marginal-cost violations; " +
                                           "10000 fills, " + std::to_string(nfl_bad) + " free lunches"};
}

Verdict c7_converter() {
  const LegacyFindings& lf = legacy_findings();
  const Scenario s = sandwich_scenario();
  Engine legacy;
  legacy.kind = EngineKind::LegacySequential;

  std::vector<ArbWitness> all = lf.witnesses;
  if (auto w = find_arbitrage(lf.sandwich.best_run, "attacker")) {
    w->batch_orders = lf.sandwich.best_orders;
    all.push_back(*w);
  }

  std::size_t converted = 0;
  for (const auto& w : all) {
    const ConvertedScenario c = arbitrage_to_ic_violation(w, s);
    const IcReport r = search_ic_deviations(c.scenario, c.zero_demand_type, StrategyGrid{}, legacy);
    if (!r.counterexamples.empty()) ++converted;
  }
  return {!all.empty() && converted == all.size(),
          std::to_string(converted) + "/" + std::to_string(all.size()) + " witnesses converted"};
}

Verdict c8_noshort() {
  const auto t0 = Clock::now();
  fuzz::Fuzzer f(8008);
  std::size_t witnesses = 0;
  std::size_t counterexamples = 0;
  std::size_t searches = 0;

  // Arbitrage: same grid, both models and tie-break regimes, random ledgers.
  for (Scenario s : honest_sets()) {
    Engine e;
    e.kind = EngineKind::BatchNoShort;
    e.ledger = f.ledger(s.honest_orders, 10);
    for (const auto& o : s.honest_orders) e.ledger.try_emplace(o.user, Position{f.rational(0, 10), f.rational(0, 10)});
    e.ledger[s.adversary_user] = Position{f.rational(0, 10), f.rational(0, 10)};
    for (const Model m : {Model::Plain, Model::WeakFairSequencing}) {
      for (const TieBreak& tb : tiebreaks()) {
        s.model = m;
        s.tiebreak = tb;
        witnesses += search_arbitrage(s, full_grid(), e).size();
        ++searches;
      }
    }
  }

  // Total-ordering IC: single-order deviations at offsets {0,1,2} plus pairs.
  for (int k = 0; k < 4; ++k) {
    Scenario s = honest_sets()[static_cast<std::size_t>(k % 2)];
    s.model = Model::WeakFairSequencing;
    s.tiebreak = TieBreak::arrival_stable();
    s.adversary_type->arrival = Rational(2);
    Engine e;
    e.kind = EngineKind::BatchNoShort;
    for (const auto& o : s.honest_orders) e.ledger[o.user] = Position{f.rational(0, 10), f.rational(0, 10)};
    e.ledger[s.adversary_user] = Position{f.rational(0, 10), f.rational(0, 10)};
    for (const Rational& belief : {Rational(1, 2), Rational(3, 2), Rational(3)}) {
      counterexamples += search_ic_total_order(s, belief, ic_grid(), e).counterexamples.size();
      ++searches;
    }
  }

  // Ledger nonnegativity on fuzzed runs.
  std::size_t negative = 0;
  for (int i = 0; i < 1000; ++i) {
    const PoolState p = f.pool(1000);
    const auto orders = f.orders(p, 8);
    const NoShortOutcome out = run_batch_noshort(p, f.ledger(orders, 500), orders, f.tiebreak());
    for (const auto& step : out.batch.trace) {
      if (step.position_after && (step.position_after->x.sign() < 0 || step.position_after->y.sign() < 0)) ++negative;
    }
  }
  const double secs = seconds_since(t0);
  return {witnesses == 0 && counterexamples == 0 && negative == 0,
          std::to_string(searches) + " searches, " + std::to_string(witnesses) + " witnesses, " +
              std::to_string(counterexamples) + " counterexamples, " + std::to_string(negative) +
              " negative balances in 1000 runs, " + fmt_secs(secs)};
}

Verdict c9_ordering() {
  const UserType t{Side::BuyX, Rational(7), Rational(20), Rational(0)};
  const Comparison a = compare(t, Outcome{Rational(6), Rational(-66)}, Outcome{Rational(5), Rational(-50)});
  const Comparison b = compare(t, Outcome{Rational(7), Rational(-70)}, Outcome{Rational(8), Rational(-96)});
  const Comparison c = compare(t, Outcome{Rational(8), Rational(-88)}, Outcome{Rational(7), Rational(-70)});
  const bool ok = a == Comparison::Better && b == Comparison::Better && c == Comparison::Incomparable;
  return {ok, std::string(to_string(a)) + ", " + std::string(to_string(b)) + ", " + std::string(to_string(c))};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c10_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / ("batchswap_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const std::string cli = BATCHSWAP_CLI;
  const std::string scenarios = BATCHSWAP_SCENARIOS;
  const std::vector<std::string> runs{
      "run --scenario " + scenarios + "/random_tiebreak.json --seed 7",
      "run --scenario " + scenarios + "/random_tiebreak.json",
      "run --scenario " + scenarios + "/worked_two_orders.json",
      "run-noshort --scenario " + scenarios + "/noshort_ledger.json",
      "legacy-run --scenario " + scenarios + "/random_tiebreak.json --seed 7",
  };
  std::size_t identical = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto a = dir / ("a" + std::to_string(i) + ".jsonl");
    const auto b = dir / ("b" + std::to_string(i) + ".jsonl");
    const int ra = std::system((cli + " " + runs[i] + " --out " + a.string()).c_str());
    const int rb = std::system((cli + " " + runs[i] + " --out " + b.string()).c_str());
    const std::string ta = read_file(a);
    if (ra == 0 && rb == 0 && !ta.empty() && ta == read_file(b)) ++identical;
  }
  std::filesystem::remove_all(dir);
  return {identical == runs.size(), std::to_string(identical) + "/" + std::to_string(runs.size()) + " trace pairs byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 exact potential conservation", c1_conservation},
      {"2 worked-trace exactness", c2_worked_trace},
      {"3 arbitrage resilience", c3_arbitrage_resilience},
      {"4 incentive compatibility", c4_incentive_compatibility},
      {"5 legacy negative control", c5_negative_control},
      {"6 marginal cost and no free lunch", c6_fact_properties},
      {"7 witness-to-IC converter", c7_converter},
      {"8 no-short-sell variant", c8_noshort},
      {"9 seven-unit ordering example", c9_ordering},
      {"10 determinism", c10_determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.contains(static_cast<int>(i + 1))) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << criteria[i].first << " -- " << v.detail << std::endl;
  }
  return failures;
}
