#include "lemsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "lemsim/error.hpp"

namespace lemsim {

namespace {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::BaseFiT: return "BaseFiT";
    case Scheme::BaseAuction: return "BaseAuction";
    case Scheme::FiT: return "FiT";
    case Scheme::Lcoe: return "LCOE";
  }
  return "?";
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string ScenarioLabel::name() const {
  return std::string(scheme_name(scheme)) + "-" + std::string(to_string(mode));
}

ScenarioLabel ScenarioLabel::parse(std::string_view text) {
  const std::string wanted = lower(text);
  for (const ScenarioLabel& label : all_scenario_labels())
    if (lower(label.name()) == wanted) return label;
  throw std::invalid_argument("unknown scenario '" + std::string(text) +
                              "' (expected <BaseFiT|BaseAuction|FiT|LCOE>-<Fixed|Dynamic>)");
}

std::vector<ScenarioLabel> scenario_labels_for(ThresholdMode mode) {
  return {{Scheme::BaseFiT, mode}, {Scheme::BaseAuction, mode}, {Scheme::FiT, mode}, {Scheme::Lcoe, mode}};
}

std::vector<ScenarioLabel> all_scenario_labels() {
  auto labels = scenario_labels_for(ThresholdMode::Fixed);
  const auto dynamic = scenario_labels_for(ThresholdMode::Dynamic);
  labels.insert(labels.end(), dynamic.begin(), dynamic.end());
  return labels;
}

double base_sell_price(Scheme scheme, const PriceConstants& prices) {
  switch (scheme) {
    case Scheme::BaseFiT:
    case Scheme::FiT: return prices.fit;
    case Scheme::BaseAuction:
    case Scheme::Lcoe: return prices.p_lower_auction;
  }
  return prices.p_lower_auction;
}

Thresholds thresholds_for(const ScenarioLabel& label, const PriceConstants& prices,
                          const std::optional<TimeSeries>& spot) {
  const bool fit_like = label.scheme == Scheme::FiT || label.scheme == Scheme::BaseFiT;
  const double reference = fit_like ? prices.fit : prices.lcoe;
  const double export_price = base_sell_price(label.scheme, prices);
  if (label.mode == ThresholdMode::Fixed) return Thresholds::fixed(prices.p_fixed_upper, reference, export_price);
  if (!spot) throw ValidationError(label.name() + " needs a spot price series");
  return Thresholds::dynamic(*spot, prices.markup, reference, export_price, prices.markup_kind);
}

ScenarioOutcome run_scenario(const Neighborhood& n, const ScenarioLabel& label, const PriceConstants& prices,
                             const std::optional<TimeSeries>& spot) {
  const Thresholds th = thresholds_for(label, prices, spot);
  std::vector<double> price_series(n.horizon());
  if (label.is_base()) {
    check_threshold_axis(n, th);
    for (std::size_t t = 0; t < n.horizon(); ++t) price_series[t] = upper_threshold(t, th);
    SettlementLedger ledger = settle_base(n, base_sell_price(label.scheme, prices), th);
    const NeighborhoodTotals summary = ledger.neighborhood();
    return {label, TimeSeries(n.start(), std::move(price_series), Unit::PriceEurPerMwh), {}, std::move(ledger),
            summary};
  }
  std::vector<MarketResult> market = clear_market(n, th);
  for (const MarketResult& mr : market) price_series[mr.t] = mr.price;
  SettlementLedger ledger = settle(market, n);
  const NeighborhoodTotals summary = ledger.neighborhood();
  return {label, TimeSeries(n.start(), std::move(price_series), Unit::PriceEurPerMwh), std::move(market),
          std::move(ledger), summary};
}

}  // namespace lemsim
