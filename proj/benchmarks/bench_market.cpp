#include <benchmark/benchmark.h>

#include "lemsim/market.hpp"
#include "lemsim/profiles.hpp"
#include "lemsim/scenario.hpp"
#include "lemsim/settlement.hpp"

using namespace lemsim;

namespace {

Neighborhood year(std::size_t households) {
  std::vector<RosterEntry> roster = default_roster();
  roster.resize(std::min(roster.size(), households));
  for (std::size_t i = roster.size(); i < households; ++i)
    roster.push_back({"X" + std::to_string(i), 3500.0, i % 2 ? 5.0 : 0.0, "synth:" + std::to_string(i),
                      i % 2 ? "synth:100" : ""});
  RosterContext ctx;
  ctx.seed = 2019;
  return build_neighborhood(roster, ctx);
}

void BM_ClearMarketFixed(benchmark::State& state) {
  const Neighborhood n = year(static_cast<std::size_t>(state.range(0)));
  const Thresholds th = Thresholds::fixed(30.46, 8.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(clear_market(n, th));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n.horizon()));
}
BENCHMARK(BM_ClearMarketFixed)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Settle(benchmark::State& state) {
  const Neighborhood n = year(static_cast<std::size_t>(state.range(0)));
  const std::vector<MarketResult> market = clear_market(n, Thresholds::fixed(30.46, 8.0, 5.0));
  for (auto _ : state) benchmark::DoNotOptimize(settle(market, n));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n.horizon()));
}
BENCHMARK(BM_Settle)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_RunScenarioDynamic(benchmark::State& state) {
  const Neighborhood n = year(10);
  const TimeSeries spot = synth_spot(200, n.horizon(), n.start());
  const PriceConstants prices;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_scenario(n, {Scheme::Lcoe, ThresholdMode::Dynamic}, prices, spot));
}
BENCHMARK(BM_RunScenarioDynamic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
