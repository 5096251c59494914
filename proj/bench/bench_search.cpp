#include "batchswap/adversary.hpp"

#include <benchmark/benchmark.h>

using namespace batchswap;

namespace {

Scenario scenario(Model model) {
  Scenario s;
  s.pool = PoolState(Rational(10), Rational(10));
  s.honest_orders = {Order{1, "h1", Side::BuyX, Rational(3), Rational(2), Rational(1), 0},
                     Order{2, "h2", Side::SellX, Rational(2), Rational(1, 2), Rational(2), 1}};
  s.adversary_type = UserType{Side::BuyX, Rational(2), Rational(2), Rational(2)};
  s.model = model;
  return s;
}

StrategyGrid grid(std::size_t max_orders) {
  StrategyGrid g = StrategyGrid::standard();
  g.max_orders = max_orders;
  return g;
}

void BM_ArbitrageSerial(benchmark::State& st) {
  const Scenario s = scenario(Model::Plain);
  const StrategyGrid g = grid(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::search_arbitrage(s, g));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * g.strategy_count() * 4));
}

void BM_ArbitrageParallel(benchmark::State& st) {
  const Scenario s = scenario(Model::Plain);
  const StrategyGrid g = grid(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(search_arbitrage(s, g));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * g.strategy_count() * 4));
}

void BM_IcSerial(benchmark::State& st) {
  const Scenario s = scenario(Model::WeakFairSequencing);
  const StrategyGrid g = grid(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(serial::search_ic_deviations(s, *s.adversary_type, g));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * g.strategy_count()));
}

void BM_IcParallel(benchmark::State& st) {
  const Scenario s = scenario(Model::WeakFairSequencing);
  const StrategyGrid g = grid(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(search_ic_deviations(s, *s.adversary_type, g));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * g.strategy_count()));
}

}  // namespace

BENCHMARK(BM_ArbitrageSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ArbitrageParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IcSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IcParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
