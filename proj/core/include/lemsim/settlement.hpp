#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lemsim/market.hpp"
#include "lemsim/profiles.hpp"

namespace lemsim {

/// One participant in one hour. Money in EUR, energy in kWh.
struct SettlementRecord {
  std::size_t participant = 0;
  std::size_t t = 0;
  double cost = 0.0;
  double revenue = 0.0;
  double net_cost = 0.0;
  double bought_local = 0.0;
  double bought_utility = 0.0;
  double sold_local = 0.0;
  double sold_utility = 0.0;
  double curtailed = 0.0;
  double self_consumed = 0.0;
};

struct ParticipantTotals {
  double cost = 0.0;
  double revenue = 0.0;
  double net_cost = 0.0;
  double bought_local = 0.0;
  double bought_utility = 0.0;
  double sold_local = 0.0;
  double sold_utility = 0.0;
  double curtailed = 0.0;
  double self_consumed = 0.0;
  double generation = 0.0;
};

struct NeighborhoodTotals {
  double consumer_cost = 0.0;     // sum of every c_it
  double prosumer_revenue = 0.0;  // sum of every y_it
  double net_cost = 0.0;          // sum of every c_it - y_it
};

class SettlementLedger {
 public:
  SettlementLedger(std::vector<std::string> participant_ids, std::size_t horizon,
                   std::vector<SettlementRecord> records, std::vector<double> generation_kwh);

  std::size_t horizon() const { return horizon_; }
  std::size_t participant_count() const { return ids_.size(); }
  const std::vector<std::string>& participant_ids() const { return ids_; }
  const SettlementRecord& record(std::size_t t, std::size_t participant) const {
    return records_[t * ids_.size() + participant];
  }
  std::span<const SettlementRecord> records() const { return records_; }
  const ParticipantTotals& totals(std::size_t participant) const { return totals_[participant]; }
  const NeighborhoodTotals& neighborhood() const { return neighborhood_; }

 private:
  std::vector<std::string> ids_;
  std::size_t horizon_;
  std::vector<SettlementRecord> records_;  // t-major
  std::vector<ParticipantTotals> totals_;
  NeighborhoodTotals neighborhood_;
};

/// Neighbourhood procurement cost c_t: local energy at the local price, the
/// rest of the demand at the retail price.
double total_cost(const MarketResult& mr);

/// Share of c_t in proportion to the participant's demand.
double individual_cost(const MarketResult& mr, std::size_t i);

/// d_it * (r p_t + (1 - r) p_Ut). Agrees with individual_cost for 0 < r <= 1.
double individual_cost_closed_form(const MarketResult& mr, std::size_t i);

/// Prosumer revenue y_t. Local sales earn the local price and exports earn
/// the export price; zero when curtailed.
double total_revenue(const MarketResult& mr);

/// Share of y_t in proportion to the participant's surplus.
double individual_revenue(const MarketResult& mr, std::size_t i);

/// s_it * (p_t / r + (1 - 1/r) p_L), with 1/r = 0 for the infinite marker.
/// This only matches individual_revenue when p_t equals the export price;
/// for 0 < r < 1 the two differ.
double individual_revenue_closed_form(const MarketResult& mr, std::size_t i);

/// Settles every participant and timestep. Throws InvariantError on a
/// horizon or participant-count mismatch.
SettlementLedger settle(std::span<const MarketResult> results, const Neighborhood& n);

/// No local market: all demand at the retail price, all surplus sold at
/// `sell_price`.
SettlementLedger settle_base(const Neighborhood& n, double sell_price, const Thresholds& th);

struct BalanceReport {
  double worst_relative_error = 0.0;
  std::size_t worst_t = 0;
  std::string worst_check;
};

/// Verifies allocation conservation, money balance, energy balance and the
/// net-cost identity at every timestep; reports the worst relative deviation.
BalanceReport check_balances(std::span<const MarketResult> results, const SettlementLedger& ledger);

void write_ledger_csv(const std::filesystem::path& path, const SettlementLedger& ledger);

}  // namespace lemsim
