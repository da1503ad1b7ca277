#include "lemsim/settlement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lemsim/error.hpp"
#include "lemsim/numeric.hpp"

namespace lemsim {

namespace {

// Energy traded inside the neighbourhood this hour, kWh.
double local_energy(const MarketResult& mr) {
  if (mr.regime == Regime::Curtailed) return 0.0;
  return std::min(mr.total_surplus, mr.total_demand);
}

}  // namespace

SettlementLedger::SettlementLedger(std::vector<std::string> participant_ids, std::size_t horizon,
                                   std::vector<SettlementRecord> records, std::vector<double> generation_kwh)
    : ids_(std::move(participant_ids)), horizon_(horizon), records_(std::move(records)) {
  if (records_.size() != horizon_ * ids_.size())
    throw InvariantError("ledger holds " + std::to_string(records_.size()) + " records, expected " +
                         std::to_string(horizon_ * ids_.size()));
  if (generation_kwh.size() != ids_.size()) throw InvariantError("ledger generation totals do not match participants");

  struct Acc {
    CompensatedSum cost, revenue, net, bought_local, bought_utility, sold_local, sold_utility, curtailed, self;
  };
  std::vector<Acc> acc(ids_.size());
  CompensatedSum cost, revenue, net;
  for (const SettlementRecord& r : records_) {
    Acc& a = acc[r.participant];
    a.cost.add(r.cost);
    a.revenue.add(r.revenue);
    a.net.add(r.net_cost);
    a.bought_local.add(r.bought_local);
    a.bought_utility.add(r.bought_utility);
    a.sold_local.add(r.sold_local);
    a.sold_utility.add(r.sold_utility);
    a.curtailed.add(r.curtailed);
    a.self.add(r.self_consumed);
    cost.add(r.cost);
    revenue.add(r.revenue);
    net.add(r.net_cost);
  }
  totals_.resize(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const Acc& a = acc[i];
    totals_[i] = {a.cost.value(),       a.revenue.value(),      a.net.value(),
                  a.bought_local.value(), a.bought_utility.value(), a.sold_local.value(),
                  a.sold_utility.value(), a.curtailed.value(),    a.self.value(),
                  generation_kwh[i]};
  }
  neighborhood_ = {cost.value(), revenue.value(), net.value()};
}

double total_cost(const MarketResult& mr) {
  const double local = local_energy(mr);
  return energy_cost_eur(local, mr.price) + energy_cost_eur(mr.total_demand - local, mr.p_upper);
}

double individual_cost(const MarketResult& mr, std::size_t i) {
  if (!(mr.total_demand > 0.0)) return 0.0;
  return mr.demands.at(i) / mr.total_demand * total_cost(mr);
}

double individual_cost_closed_form(const MarketResult& mr, std::size_t i) {
  const double r = mr.sdr.ratio();
  return energy_cost_eur(mr.demands.at(i), r * mr.price + (1.0 - r) * mr.p_upper);
}

double total_revenue(const MarketResult& mr) {
  if (mr.regime == Regime::Curtailed) return 0.0;
  const double local = local_energy(mr);
  return energy_cost_eur(local, mr.price) + energy_cost_eur(mr.total_surplus - local, mr.export_price);
}

double individual_revenue(const MarketResult& mr, std::size_t i) {
  if (!(mr.total_surplus > 0.0)) return 0.0;
  return mr.surpluses.at(i) / mr.total_surplus * total_revenue(mr);
}

double individual_revenue_closed_form(const MarketResult& mr, std::size_t i) {
  const double s = mr.surpluses.at(i);
  if (mr.sdr.is_infinite()) return energy_cost_eur(s, mr.export_price);
  const double r = mr.sdr.ratio();
  if (r == 0.0) return 0.0;
  return energy_cost_eur(s, mr.price / r + (1.0 - 1.0 / r) * mr.export_price);
}

SettlementLedger settle(std::span<const MarketResult> results, const Neighborhood& n) {
  if (results.size() != n.horizon())
    throw InvariantError("market results cover " + std::to_string(results.size()) + " of " +
                         std::to_string(n.horizon()) + " timesteps");
  const std::size_t count = n.size();
  std::vector<SettlementRecord> records;
  records.reserve(results.size() * count);
  for (std::size_t t = 0; t < results.size(); ++t) {
    const MarketResult& mr = results[t];
    if (mr.t != t || mr.surpluses.size() != count || mr.demands.size() != count)
      throw InvariantError("market result " + std::to_string(t) + " does not match the neighbourhood");
    const double local = local_energy(mr);
    const double c_t = total_cost(mr);
    const double y_t = total_revenue(mr);
    const bool curtailed = mr.regime == Regime::Curtailed;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = mr.demands[i];
      const double s = mr.surpluses[i];
      SettlementRecord rec;
      rec.participant = i;
      rec.t = t;
      rec.cost = mr.total_demand > 0.0 ? d / mr.total_demand * c_t : 0.0;
      rec.revenue = mr.total_surplus > 0.0 ? s / mr.total_surplus * y_t : 0.0;
      rec.net_cost = rec.cost - rec.revenue;
      rec.bought_local = mr.total_demand > 0.0 ? d * (local / mr.total_demand) : 0.0;
      rec.bought_utility = d - rec.bought_local;
      if (curtailed) {
        rec.curtailed = s;
      } else {
        rec.sold_local = mr.total_surplus > 0.0 ? s * (local / mr.total_surplus) : 0.0;
        rec.sold_utility = s - rec.sold_local;
      }
      const Participant& p = n[i];
      rec.self_consumed = std::min(p.generation()[t], p.load()[t]);
      records.push_back(rec);
    }
  }
  std::vector<std::string> ids;
  std::vector<double> generation;
  for (const Participant& p : n.participants()) {
    ids.push_back(p.id());
    generation.push_back(p.generation().sum());
  }
  return SettlementLedger(std::move(ids), n.horizon(), std::move(records), std::move(generation));
}

SettlementLedger settle_base(const Neighborhood& n, double sell_price, const Thresholds& th) {
  check_threshold_axis(n, th);
  const std::size_t count = n.size();
  std::vector<SettlementRecord> records;
  records.reserve(n.horizon() * count);
  for (std::size_t t = 0; t < n.horizon(); ++t) {
    const double retail = upper_threshold(t, th);
    for (std::size_t i = 0; i < count; ++i) {
      const NetPosition pos = net_position(n[i], t);
      SettlementRecord rec;
      rec.participant = i;
      rec.t = t;
      rec.cost = energy_cost_eur(pos.demand_kwh, retail);
      rec.revenue = energy_cost_eur(pos.surplus_kwh, sell_price);
      rec.net_cost = rec.cost - rec.revenue;
      rec.bought_utility = pos.demand_kwh;
      rec.sold_utility = pos.surplus_kwh;
      rec.self_consumed = std::min(n[i].generation()[t], n[i].load()[t]);
      records.push_back(rec);
    }
  }
  std::vector<std::string> ids;
  std::vector<double> generation;
  for (const Participant& p : n.participants()) {
    ids.push_back(p.id());
    generation.push_back(p.generation().sum());
  }
  return SettlementLedger(std::move(ids), n.horizon(), std::move(records), std::move(generation));
}

BalanceReport check_balances(std::span<const MarketResult> results, const SettlementLedger& ledger) {
  BalanceReport report;
  auto observe = [&](double a, double b, std::size_t t, const char* what, double scale = 0.0) {
    const double err = relative_difference(a, b, std::max(scale, 1e-12));
    if (err > report.worst_relative_error) {
      report.worst_relative_error = err;
      report.worst_t = t;
      report.worst_check = what;
    }
  };

  const std::size_t count = ledger.participant_count();
  for (std::size_t t = 0; t < ledger.horizon(); ++t) {
    double cost = 0.0, revenue = 0.0, bought_local = 0.0, sold_local = 0.0, bought_utility = 0.0,
           sold_utility = 0.0, curtailed = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const SettlementRecord& r = ledger.record(t, i);
      if (r.net_cost != r.cost - r.revenue) observe(r.net_cost, r.cost - r.revenue, t, "net-cost identity");
      cost += r.cost;
      revenue += r.revenue;
      bought_local += r.bought_local;
      sold_local += r.sold_local;
      bought_utility += r.bought_utility;
      sold_utility += r.sold_utility;
      curtailed += r.curtailed;
      if (!results.empty()) {
        observe(r.bought_local + r.bought_utility, results[t].demands[i], t, "record demand routing");
        observe(r.sold_local + r.sold_utility + r.curtailed, results[t].surpluses[i], t, "record surplus routing");
      }
    }
    if (results.empty()) continue;
    const MarketResult& mr = results[t];
    observe(cost, total_cost(mr), t, "cost allocation");
    observe(revenue, total_revenue(mr), t, "revenue allocation");
    observe(cost, energy_cost_eur(sold_local, mr.price) + energy_cost_eur(bought_utility, mr.p_upper), t,
            "consumer payments = local receipts + utility receipts");
    observe(revenue, energy_cost_eur(sold_local, mr.price) + energy_cost_eur(sold_utility, mr.export_price), t,
            "prosumer receipts = local sales + utility exports");
    observe(bought_local, sold_local, t, "local energy balance");
    observe(bought_utility - sold_utility - curtailed, mr.total_demand - mr.total_surplus, t,
            "import/export balance", mr.total_demand + mr.total_surplus);
    if (mr.regime == Regime::Curtailed) observe(curtailed, mr.total_surplus, t, "curtailment");
  }
  return report;
}

void write_ledger_csv(const std::filesystem::path& path, const SettlementLedger& ledger) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "participant,t,cost,revenue,net_cost,bought_local,bought_utility,sold_local,sold_utility,curtailed\n";
  for (const SettlementRecord& r : ledger.records())
    out << ledger.participant_ids()[r.participant] << ',' << r.t << ',' << format_double(r.cost) << ','
        << format_double(r.revenue) << ',' << format_double(r.net_cost) << ',' << format_double(r.bought_local)
        << ',' << format_double(r.bought_utility) << ',' << format_double(r.sold_local) << ','
        << format_double(r.sold_utility) << ',' << format_double(r.curtailed) << '\n';
}

}  // namespace lemsim
