#include "lemsim/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

#include "lemsim/error.hpp"
#include "lemsim/numeric.hpp"
#include "lemsim/parallel.hpp"

namespace lemsim {

std::vector<double> duration_curve(std::span<const double> prices) {
  std::vector<double> curve(prices.begin(), prices.end());
  std::stable_sort(curve.begin(), curve.end(), std::greater<>());
  return curve;
}

const MonthStats* DailyMonthlyStats::find(std::chrono::year_month ym) const {
  for (const MonthStats& m : months)
    if (m.month == ym) return &m;
  return nullptr;
}

DailyMonthlyStats daily_monthly_stats(const TimeSeries& prices) {
  using namespace std::chrono;
  const std::size_t full_days = prices.size() / 24;
  if (full_days == 0) throw std::invalid_argument("daily statistics need at least 24 hourly prices");

  DailyMonthlyStats stats;
  stats.excluded_trailing_hours = prices.size() - full_days * 24;
  for (std::size_t d = 0; d < full_days; ++d) {
    const year_month_day date{floor<days>(prices.time_at(d * 24))};
    const double avg = compensated_sum(prices.values().subspan(d * 24, 24)) / 24.0;
    const year_month ym{date.year(), date.month()};
    if (stats.months.empty() || stats.months.back().month != ym) stats.months.push_back({ym, {}, 0.0});
    stats.months.back().days.push_back({date, avg});
  }
  for (MonthStats& m : stats.months) {
    CompensatedSum sum;
    for (const DailyAverage& day : m.days) sum.add(day.avg_price);
    m.mean_of_daily = sum.value() / static_cast<double>(m.days.size());
  }
  return stats;
}

std::optional<double> percent_delta(double subject, double reference) {
  if (reference == 0.0) return std::nullopt;
  return 100.0 * (subject - reference) / reference;
}

namespace {

const ScenarioOutcome* find_outcome(std::span<const ScenarioOutcome> outcomes, const ScenarioLabel& label) {
  for (const ScenarioOutcome& o : outcomes)
    if (o.label == label) return &o;
  return nullptr;
}

}  // namespace

DeltaTable compare_scenarios(std::span<const ScenarioOutcome> outcomes, const ScenarioLabel& subject,
                             const ScenarioLabel& reference) {
  const ScenarioOutcome* s = find_outcome(outcomes, subject);
  const ScenarioOutcome* r = find_outcome(outcomes, reference);
  if (!s) throw std::invalid_argument("no outcome for scenario " + subject.name());
  if (!r) throw std::invalid_argument("no outcome for reference scenario " + reference.name());
  if (s->ledger.horizon() != r->ledger.horizon() || s->ledger.participant_ids() != r->ledger.participant_ids())
    throw std::invalid_argument(subject.name() + " and " + reference.name() + " cover different neighbourhoods");

  DeltaTable table{subject, reference, {}};
  auto row = [&](const char* metric, double a, double b) { table.rows.push_back({metric, a, b, percent_delta(a, b)}); };
  row("consumer_cost", s->summary.consumer_cost, r->summary.consumer_cost);
  row("prosumer_revenue", s->summary.prosumer_revenue, r->summary.prosumer_revenue);
  row("net_cost", s->summary.net_cost, r->summary.net_cost);
  return table;
}

// --- Sweep ----------------------------------------------------------------------

namespace {

void check_roles(const Neighborhood& base, const SweepSpec& spec) {
  if (!base.index_of(spec.tracked_consumer))
    throw std::invalid_argument("tracked consumer '" + spec.tracked_consumer + "' is not in the roster");
  if (!base.index_of(spec.tracked_prosumer))
    throw std::invalid_argument("tracked prosumer '" + spec.tracked_prosumer + "' is not in the roster");
  if (spec.tracked_consumer == spec.tracked_prosumer)
    throw std::invalid_argument("tracked consumer and tracked prosumer must differ");
}

}  // namespace

std::vector<std::string> sweep_assignment_order(const Neighborhood& base, const SweepSpec& spec) {
  check_roles(base, spec);
  std::vector<std::string> others;
  for (const Participant& p : base.participants())
    if (p.id() != spec.tracked_consumer && p.id() != spec.tracked_prosumer) others.push_back(p.id());
  std::sort(others.begin(), others.end());
  std::vector<std::string> order{spec.tracked_prosumer};
  order.insert(order.end(), others.begin(), others.end());
  return order;
}

Neighborhood neighborhood_with_prosumers(const Neighborhood& base, const SweepSpec& spec, int count) {
  const std::vector<std::string> order = sweep_assignment_order(base, spec);
  if (count < 1 || static_cast<std::size_t>(count) >= base.size())
    throw std::invalid_argument("prosumer count " + std::to_string(count) + " must lie in [1, " +
                                std::to_string(base.size() - 1) + "] so the tracked consumer stays a consumer");
  const std::vector<std::string> chosen(order.begin(), order.begin() + count);

  std::vector<Participant> participants;
  participants.reserve(base.size());
  for (const Participant& p : base.participants()) {
    const bool assigned = std::find(chosen.begin(), chosen.end(), p.id()) != chosen.end();
    if (!assigned) {
      participants.emplace_back(p.id(), p.load());
    } else if (p.has_pv()) {
      participants.push_back(p);
    } else {
      if (!spec.added_pv_per_kwp)
        throw std::invalid_argument(p.id() + " needs a PV profile but the sweep has none to assign");
      const TimeSeries& unit = *spec.added_pv_per_kwp;
      if (!unit.same_axis(p.load())) throw std::invalid_argument("sweep PV profile does not match the time axis");
      std::vector<double> gen(unit.values().begin(), unit.values().end());
      for (double& g : gen) g *= spec.added_pv_kwp;
      participants.emplace_back(p.id(), p.load(), spec.added_pv_kwp,
                                TimeSeries(unit.start(), std::move(gen), Unit::EnergyKwh));
    }
  }
  return Neighborhood(std::move(participants));
}

std::vector<SweepPoint> sensitivity_sweep(const Neighborhood& base, const SweepSpec& spec,
                                          const PriceConstants& prices, const std::optional<TimeSeries>& spot,
                                          unsigned threads) {
  check_roles(base, spec);
  std::vector<int> counts = spec.prosumer_counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  if (counts.empty()) throw std::invalid_argument("sweep needs at least one prosumer count");

  std::vector<Neighborhood> variants;
  variants.reserve(counts.size());
  for (int count : counts) variants.push_back(neighborhood_with_prosumers(base, spec, count));
  const std::size_t consumer = *base.index_of(spec.tracked_consumer);
  const std::size_t prosumer = *base.index_of(spec.tracked_prosumer);

  std::vector<SweepPoint> points(spec.scenarios.size() * counts.size());
  parallel_for(points.size(), threads, [&](std::size_t job) {
    const std::size_t s = job / counts.size();
    const std::size_t c = job % counts.size();
    const ScenarioOutcome outcome = run_scenario(variants[c], spec.scenarios[s], prices, spot);
    points[job] = {spec.scenarios[s], counts[c], outcome.ledger.totals(consumer).net_cost,
                   outcome.ledger.totals(prosumer).revenue};
  });
  return points;
}

SelfConsumptionShares self_consumption_report(const SettlementLedger& ledger) {
  CompensatedSum generation, self, local, utility, curtailed;
  for (std::size_t i = 0; i < ledger.participant_count(); ++i) {
    const ParticipantTotals& t = ledger.totals(i);
    generation.add(t.generation);
    self.add(t.self_consumed);
    local.add(t.sold_local);
    utility.add(t.sold_utility);
    curtailed.add(t.curtailed);
  }
  const double total = generation.value();
  if (!(total > 0.0)) throw std::domain_error("self-consumption shares undefined without PV generation");
  return {self.value() / total, local.value() / total, utility.value() / total, curtailed.value() / total};
}

// --- Writers ----------------------------------------------------------------------

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string format_date(std::chrono::year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

}  // namespace

void write_duration_csv(const std::filesystem::path& path, std::span<const double> curve) {
  std::ofstream out = open_output(path);
  out << "rank,price\n";
  for (std::size_t k = 0; k < curve.size(); ++k) out << k + 1 << ',' << format_double(curve[k]) << '\n';
}

void write_daily_avg_csv(const std::filesystem::path& path, const DailyMonthlyStats& stats) {
  std::ofstream out = open_output(path);
  out << "date,avg_price\n";
  for (const MonthStats& m : stats.months)
    for (const DailyAverage& d : m.days) out << format_date(d.date) << ',' << format_double(d.avg_price) << '\n';
}

void write_summary_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes) {
  std::ofstream out = open_output(path);
  out << "scenario,consumer_cost,prosumer_revenue,net_cost,"
         "delta_vs_fit_consumer_cost_pct,delta_vs_fit_prosumer_revenue_pct,delta_vs_fit_net_cost_pct,"
         "delta_vs_auction_consumer_cost_pct,delta_vs_auction_prosumer_revenue_pct,delta_vs_auction_net_cost_pct\n";
  for (const ScenarioOutcome& o : outcomes) {
    out << o.label.name() << ',' << format_double(o.summary.consumer_cost) << ','
        << format_double(o.summary.prosumer_revenue) << ',' << format_double(o.summary.net_cost);
    for (Scheme ref : {Scheme::FiT, Scheme::BaseAuction}) {
      const ScenarioLabel reference{ref, o.label.mode};
      if (find_outcome(outcomes, reference)) {
        for (const DeltaRow& row : compare_scenarios(outcomes, o.label, reference).rows)
          out << ',' << format_optional(row.delta_pct);
      } else {
        out << ",,,";
      }
    }
    out << '\n';
  }
}

void write_table_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes,
                     ThresholdMode mode) {
  const auto labels = scenario_labels_for(mode);
  for (const ScenarioLabel& l : labels)
    if (!find_outcome(outcomes, l)) throw std::invalid_argument("table needs scenario " + l.name());
  const DeltaTable vs_fit = compare_scenarios(outcomes, {Scheme::Lcoe, mode}, {Scheme::FiT, mode});
  const DeltaTable vs_auction = compare_scenarios(outcomes, {Scheme::Lcoe, mode}, {Scheme::BaseAuction, mode});

  std::ofstream out = open_output(path);
  out << "metric,BaseFiT,BaseAuction,FiT,LCOE,delta_fit_pct,delta_auction_pct\n";
  for (std::size_t row = 0; row < 3; ++row) {
    out << vs_fit.rows[row].metric;
    for (const ScenarioLabel& l : labels) {
      const NeighborhoodTotals& s = find_outcome(outcomes, l)->summary;
      const double v = row == 0 ? s.consumer_cost : (row == 1 ? s.prosumer_revenue : s.net_cost);
      out << ',' << format_double(v);
    }
    out << ',' << format_optional(vs_fit.rows[row].delta_pct) << ',' << format_optional(vs_auction.rows[row].delta_pct)
        << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepPoint> points) {
  std::ofstream out = open_output(path);
  out << "scenario,n_prosumers,tracked_consumer_cost,tracked_prosumer_revenue\n";
  for (const SweepPoint& p : points)
    out << p.scenario.name() << ',' << p.n_prosumers << ',' << format_double(p.tracked_consumer_net_cost) << ','
        << format_double(p.tracked_prosumer_revenue) << '\n';
}

void write_selfconsumption_csv(const std::filesystem::path& path, std::span<const ScenarioOutcome> outcomes) {
  std::ofstream out = open_output(path);
  out << "scenario,self_consumed,sold_local,sold_utility,curtailed\n";
  for (const ScenarioOutcome& o : outcomes) {
    out << o.label.name();
    try {
      const SelfConsumptionShares s = self_consumption_report(o.ledger);
      out << ',' << format_double(s.self_consumed) << ',' << format_double(s.sold_local) << ','
          << format_double(s.sold_utility) << ',' << format_double(s.curtailed) << '\n';
    } catch (const std::domain_error&) {
      out << ",,,,\n";  // no PV in the neighbourhood
    }
  }
}

}  // namespace lemsim
