#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lemsim/scenario.hpp"
#include "lemsim/settlement.hpp"
#include "lemsim/time_series.hpp"

namespace lemsim {

// --- Price statistics -------------------------------------------------------

/// Prices sorted in descending order.
std::vector<double> duration_curve(std::span<const double> prices);

struct DailyAverage {
  std::chrono::year_month_day date;
  double avg_price = 0.0;
};

struct MonthStats {
  std::chrono::year_month month;
  std::vector<DailyAverage> days;
  double mean_of_daily = 0.0;
};

struct DailyMonthlyStats {
  std::vector<MonthStats> months;       // calendar order
  std::size_t excluded_trailing_hours = 0;  // hours of an incomplete final day

  const MonthStats* find(std::chrono::year_month ym) const;
};

/// Days are consecutive 24-hour blocks from the series start, each dated by
/// its first hour. Throws std::invalid_argument if no full day exists.
DailyMonthlyStats daily_monthly_stats(const TimeSeries& prices);

// --- Scenario comparison ----------------------------------------------------

/// 100 * (subject - reference) / reference; empty when reference is zero.
std::optional<double> percent_delta(double subject, double reference);

struct DeltaRow {
  std::string metric;
  double subject = 0.0;
  double reference = 0.0;
  std::optional<double> delta_pct;
};

struct DeltaTable {
  ScenarioLabel subject;
  ScenarioLabel reference;
  std::vector<DeltaRow> rows;  // consumer cost, prosumer revenue, net cost
};

/// Throws std::invalid_argument when either label is missing from outcomes.
DeltaTable compare_scenarios(std::span<const ScenarioOutcome> outcomes, const ScenarioLabel& subject,
                             const ScenarioLabel& reference);

// --- Sensitivity over prosumer count ----------------------------------------

struct SweepSpec {
  std::vector<int> prosumer_counts;
  std::vector<ScenarioLabel> scenarios;
  std::string tracked_consumer;
  std::string tracked_prosumer;
  /// Capacity and 1-kWp profile for households that have no PV in the base
  /// roster but are assigned one during the sweep.
  double added_pv_kwp = kDefaultPvKwp;
  std::optional<TimeSeries> added_pv_per_kwp;
};

struct SweepPoint {
  ScenarioLabel scenario;
  int n_prosumers = 0;
  double tracked_consumer_net_cost = 0.0;
  double tracked_prosumer_revenue = 0.0;
};

/// Order in which PV is handed out: tracked prosumer first, then ascending
/// id, never the tracked consumer.
std::vector<std::string> sweep_assignment_order(const Neighborhood& base, const SweepSpec& spec);

/// The neighbourhood with exactly the first `count` households of the
/// assignment order equipped with PV.
Neighborhood neighborhood_with_prosumers(const Neighborhood& base, const SweepSpec& spec, int count);

/// One simulation per (scenario, count); output ordered by scenario, then
/// count. Throws std::invalid_argument on role violations.
std::vector<SweepPoint> sensitivity_sweep(const Neighborhood& base, const SweepSpec& spec,
                                          const PriceConstants& prices,
                                          const std::optional<TimeSeries>& spot, unsigned threads = 1);

// --- Energy routing ---------------------------------------------------------

struct SelfConsumptionShares {
  double self_consumed = 0.0;
  double sold_local = 0.0;
  double sold_utility = 0.0;
  double curtailed = 0.0;
};

/// Shares of total PV generation. Throws std::domain_error without generation.
SelfConsumptionShares self_consumption_report(const SettlementLedger& ledger);

// --- Output files -----------------------------------------------------------

void write_duration_csv(const std::filesystem::path& path, std::span<const double> curve);
void write_daily_avg_csv(const std::filesystem::path& path, const DailyMonthlyStats& stats);
/// One row per outcome with deltas against the same-mode FiT and
/// BaseAuction scenarios when those are present.
void write_summary_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes);
/// metric x {BaseFiT, BaseAuction, FiT, LCOE, delta FiT, delta Auction} for one mode.
void write_table_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes,
                     ThresholdMode mode);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepPoint> points);
void write_selfconsumption_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes);

}  // namespace lemsim
