#include <gtest/gtest.h>

#include <fstream>

#include "lemsim/analysis.hpp"
#include "oracles.hpp"

using namespace lemsim;
using namespace std::chrono;

namespace {

Neighborhood small_roster(std::size_t hours) {
  std::vector<Participant> ps;
  for (int i = 1; i <= 5; ++i) {
    const std::string id = "H0" + std::to_string(i);
    if (i == 1 || i == 4)
      ps.emplace_back(id, synth_load(i, 3500, hours), 5.0, synth_pv(100, 5.0, hours));
    else
      ps.emplace_back(id, synth_load(i, 3500, hours));
  }
  return Neighborhood(std::move(ps));
}

SweepSpec spec_for(std::size_t hours) {
  SweepSpec spec;
  spec.tracked_consumer = "H03";
  spec.tracked_prosumer = "H01";
  spec.scenarios = {{Scheme::FiT, ThresholdMode::Fixed}, {Scheme::Lcoe, ThresholdMode::Fixed}};
  spec.prosumer_counts = {4, 1, 2, 3, 2};
  spec.added_pv_per_kwp = synth_pv(7, 1.0, hours);
  return spec;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(DurationCurve, SortsDescending) {
  EXPECT_EQ(duration_curve(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 2, 1}));
  EXPECT_EQ(duration_curve(std::vector<double>(5, 7.0)), std::vector<double>(5, 7.0));
  EXPECT_TRUE(duration_curve(std::vector<double>{}).empty());
}

TEST(DailyMonthly, ConstantMonth) {
  const auto stats = daily_monthly_stats(oracle::price(std::vector<double>(24 * 31, 10.0)));
  ASSERT_EQ(stats.months.size(), 1u);
  EXPECT_EQ(stats.months[0].days.size(), 31u);
  for (const DailyAverage& d : stats.months[0].days) EXPECT_EQ(d.avg_price, 10.0);
  EXPECT_EQ(stats.months[0].mean_of_daily, 10.0);
  EXPECT_EQ(stats.excluded_trailing_hours, 0u);
}

TEST(DailyMonthly, TwoDaySymmetricMean) {
  std::vector<double> v(24, 0.0);
  v.insert(v.end(), 24, 20.0);
  v.push_back(99.0);  // incomplete third day is dropped
  const auto stats = daily_monthly_stats(oracle::price(v));
  ASSERT_EQ(stats.months.size(), 1u);
  EXPECT_EQ(stats.months[0].mean_of_daily, 10.0);
  EXPECT_EQ(stats.excluded_trailing_hours, 1u);
  EXPECT_THROW(daily_monthly_stats(oracle::price(std::vector<double>(23, 1.0))), std::invalid_argument);
}

TEST(DailyMonthly, SplitsAtMonthBoundaries) {
  const Timestamp start = sys_days{2019y / January / 30};
  std::vector<double> v;
  for (int d = 0; d < 4; ++d) v.insert(v.end(), 24, d < 2 ? 1.0 : 3.0);
  const auto stats = daily_monthly_stats(oracle::price(v, start));
  ASSERT_EQ(stats.months.size(), 2u);
  EXPECT_EQ(stats.months[0].month, 2019y / January);
  EXPECT_EQ(stats.find(2019y / February)->mean_of_daily, 3.0);
  EXPECT_EQ(stats.find(2019y / March), nullptr);
  EXPECT_EQ(stats.months[1].days.front().date, 2019y / February / 1);
}

TEST(PercentDelta, Examples) {
  EXPECT_NEAR(*percent_delta(4423, 4458), -0.785, 1e-3);
  EXPECT_EQ(std::round(*percent_delta(4423, 4458) * 10) / 10, -0.8);
  EXPECT_NEAR(*percent_delta(888, 782), 13.555, 1e-3);
  EXPECT_EQ(std::round(*percent_delta(888, 782)), 14.0);
  EXPECT_EQ(*percent_delta(5, 5), 0.0);
  EXPECT_FALSE(percent_delta(1, 0).has_value());
}

TEST(CompareScenarios, IdenticalOutcomesGiveZeroDeltas) {
  const Neighborhood n = small_roster(48);
  std::vector<ScenarioOutcome> outcomes;
  outcomes.push_back(run_scenario(n, {Scheme::FiT, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt));
  outcomes.push_back(run_scenario(n, {Scheme::Lcoe, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt));
  const DeltaTable self = compare_scenarios(outcomes, outcomes[0].label, outcomes[0].label);
  ASSERT_EQ(self.rows.size(), 3u);
  for (const DeltaRow& r : self.rows) EXPECT_EQ(r.delta_pct, 0.0);
  EXPECT_EQ(self.rows[0].metric, "consumer_cost");
  EXPECT_THROW(compare_scenarios(outcomes, {Scheme::BaseFiT, ThresholdMode::Fixed}, outcomes[0].label),
               std::invalid_argument);
}

TEST(Sweep, AssignmentOrderKeepsRoles) {
  const Neighborhood n = small_roster(48);
  const SweepSpec spec = spec_for(48);
  EXPECT_EQ(sweep_assignment_order(n, spec), (std::vector<std::string>{"H01", "H02", "H04", "H05"}));
  for (int c = 1; c <= 4; ++c) {
    const Neighborhood m = neighborhood_with_prosumers(n, spec, c);
    int pv = 0;
    for (const Participant& p : m.participants()) pv += p.has_pv();
    EXPECT_EQ(pv, c);
    EXPECT_TRUE(m[*m.index_of("H01")].has_pv());
    EXPECT_FALSE(m[*m.index_of("H03")].has_pv());
  }
  // H01 keeps its own array; newly equipped houses get the shared per-kWp profile.
  const Neighborhood two = neighborhood_with_prosumers(n, spec, 2);
  EXPECT_EQ(two[0].generation(), n[0].generation());
  EXPECT_EQ(two[1].generation().sum(), spec.added_pv_per_kwp->sum() * 5.0);
  EXPECT_THROW(neighborhood_with_prosumers(n, spec, 0), std::invalid_argument);
  EXPECT_THROW(neighborhood_with_prosumers(n, spec, 5), std::invalid_argument);
}

TEST(Sweep, RoleViolations) {
  const Neighborhood n = small_roster(48);
  SweepSpec spec = spec_for(48);
  spec.tracked_consumer = "H01";
  EXPECT_THROW(sweep_assignment_order(n, spec), std::invalid_argument);
  spec = spec_for(48);
  spec.tracked_prosumer = "H99";
  EXPECT_THROW(sweep_assignment_order(n, spec), std::invalid_argument);
  spec = spec_for(48);
  spec.added_pv_per_kwp.reset();
  EXPECT_THROW(neighborhood_with_prosumers(n, spec, 3), std::invalid_argument);
}

TEST(Sweep, OrderedDeterministicAndDiluting) {
  const std::size_t hours = 24 * 120;
  const Neighborhood n = small_roster(hours);
  const SweepSpec spec = spec_for(hours);
  const auto serial = sensitivity_sweep(n, spec, PriceConstants{}, std::nullopt, 1);
  const auto parallel = sensitivity_sweep(n, spec, PriceConstants{}, std::nullopt, 4);
  ASSERT_EQ(serial.size(), 8u);
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_EQ(serial[k].scenario, parallel[k].scenario);
    EXPECT_EQ(serial[k].tracked_prosumer_revenue, parallel[k].tracked_prosumer_revenue);
    EXPECT_EQ(serial[k].tracked_consumer_net_cost, parallel[k].tracked_consumer_net_cost);
    EXPECT_EQ(serial[k].n_prosumers, static_cast<int>(k % 4) + 1);
  }
  for (std::size_t s = 0; s < 2; ++s) {
    const SweepPoint& one = serial[s * 4];
    const SweepPoint& most = serial[s * 4 + 3];
    EXPECT_LT(most.tracked_prosumer_revenue, one.tracked_prosumer_revenue);
    EXPECT_LE(most.tracked_consumer_net_cost, one.tracked_consumer_net_cost);
  }
}

TEST(SelfConsumption, Shares) {
  const Neighborhood n = small_roster(24 * 30);
  const auto base = run_scenario(n, {Scheme::BaseFiT, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt);
  const SelfConsumptionShares b = self_consumption_report(base.ledger);
  EXPECT_EQ(b.sold_local, 0.0);
  const auto lem = run_scenario(n, {Scheme::FiT, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt);
  const SelfConsumptionShares s = self_consumption_report(lem.ledger);
  EXPECT_NEAR(s.self_consumed + s.sold_local + s.sold_utility + s.curtailed, 1.0, 1e-12);
  EXPECT_GT(s.sold_local, 0.0);
  EXPECT_EQ(s.self_consumed, b.self_consumed);

  const Neighborhood dark({Participant("a", synth_load(1, 3500, 48))});
  EXPECT_THROW(self_consumption_report(
                   run_scenario(dark, {Scheme::FiT, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt).ledger),
               std::domain_error);
}

TEST(SelfConsumption, NoExportMeansFullSelfConsumption) {
  // Generation never exceeds the household's own load.
  const Neighborhood n({oracle::household("a", {2, 2, 2}, {1, 2, 0.5}), oracle::household("b", {1, 1, 1}, {0, 0, 0})});
  const auto lem = run_scenario(n, {Scheme::FiT, ThresholdMode::Fixed}, PriceConstants{}, std::nullopt);
  EXPECT_EQ(self_consumption_report(lem.ledger).self_consumed, 1.0);
}

TEST(Writers, CsvShapes) {
  const auto dir = oracle::scratch_dir("writers");
  write_duration_csv(dir / "d.csv", duration_curve(std::vector<double>{1, 3, 2}));
  EXPECT_EQ(lines_of(dir / "d.csv"), (std::vector<std::string>{"rank,price", "1,3", "2,2", "3,1"}));

  write_daily_avg_csv(dir / "a.csv", daily_monthly_stats(oracle::price(std::vector<double>(48, 2.5))));
  EXPECT_EQ(lines_of(dir / "a.csv"), (std::vector<std::string>{"date,avg_price", "2019-01-01,2.5", "2019-01-02,2.5"}));

  const Neighborhood n = small_roster(48);
  std::vector<ScenarioOutcome> outcomes;
  for (const ScenarioLabel& l : scenario_labels_for(ThresholdMode::Fixed))
    outcomes.push_back(run_scenario(n, l, PriceConstants{}, std::nullopt));
  write_table_csv(dir / "t.csv", outcomes, ThresholdMode::Fixed);
  const auto table = lines_of(dir / "t.csv");
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table[0], "metric,BaseFiT,BaseAuction,FiT,LCOE,delta_fit_pct,delta_auction_pct");
  EXPECT_EQ(table[1].rfind("consumer_cost,", 0), 0u);
  EXPECT_THROW(write_table_csv(dir / "t2.csv", outcomes, ThresholdMode::Dynamic), std::invalid_argument);

  write_summary_csv(dir / "s.csv", outcomes);
  EXPECT_EQ(lines_of(dir / "s.csv").size(), 5u);
}
