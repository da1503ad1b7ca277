#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemsim/market.hpp"
#include "lemsim/profiles.hpp"
#include "lemsim/settlement.hpp"
#include "lemsim/time_series.hpp"

namespace lemsim {

/// How prosumers are remunerated. The two base schemes have no local market.
enum class Scheme { BaseFiT, BaseAuction, FiT, Lcoe };

struct ScenarioLabel {
  Scheme scheme = Scheme::Lcoe;
  ThresholdMode mode = ThresholdMode::Fixed;

  bool is_base() const { return scheme == Scheme::BaseFiT || scheme == Scheme::BaseAuction; }
  /// e.g. "LCOE-Fixed", "BaseAuction-Dynamic".
  std::string name() const;
  /// Inverse of name(), case-insensitive. Throws std::invalid_argument.
  static ScenarioLabel parse(std::string_view text);

  friend auto operator<=>(const ScenarioLabel&, const ScenarioLabel&) = default;
};

/// The eight labels, fixed mode first, in table column order.
std::vector<ScenarioLabel> all_scenario_labels();
std::vector<ScenarioLabel> scenario_labels_for(ThresholdMode mode);

/// Price constants, EUR/MWh. Defaults are the 2019 German case study values.
struct PriceConstants {
  double p_fixed_upper = 30.46;
  double fit = 6.0;
  double lcoe = 8.0;
  double p_lower_auction = 5.0;
  double markup = 0.10;
  MarkupKind markup_kind = MarkupKind::Proportional;
};

/// FiT scenarios use the FiT both as lower bound reference and as export
/// price; LCOE scenarios use the LCOE as reference and the auction price for
/// exports. Base labels get the thresholds of the matching retail contract.
Thresholds thresholds_for(const ScenarioLabel& label, const PriceConstants& prices,
                          const std::optional<TimeSeries>& spot);

/// Export price of a base scenario.
double base_sell_price(Scheme scheme, const PriceConstants& prices);

struct ScenarioOutcome {
  ScenarioLabel label;
  TimeSeries prices;                  // cleared local price, or retail price for base labels
  std::vector<MarketResult> market;   // empty for base labels
  SettlementLedger ledger;
  NeighborhoodTotals summary;
};

ScenarioOutcome run_scenario(const Neighborhood& n, const ScenarioLabel& label,
                             const PriceConstants& prices, const std::optional<TimeSeries>& spot);

}  // namespace lemsim
