#include "lemsim/market.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lemsim/error.hpp"
#include "lemsim/numeric.hpp"

namespace lemsim {

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::Fixed ? "Fixed" : "Dynamic";
}

std::string_view to_string(MarkupKind kind) {
  return kind == MarkupKind::Proportional ? "proportional" : "additive";
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Inactive: return "Inactive";
    case Regime::Partial: return "Partial";
    case Regime::Saturated: return "Saturated";
    case Regime::BelowLcoe: return "BelowLcoe";
    case Regime::Curtailed: return "Curtailed";
  }
  return "?";
}

Thresholds Thresholds::fixed(double p_upper, double lower_bound_ref, double p_lower) {
  Thresholds th;
  th.mode = ThresholdMode::Fixed;
  th.p_upper_fixed = p_upper;
  th.lower_bound_ref = lower_bound_ref;
  th.p_lower = p_lower;
  return th;
}

Thresholds Thresholds::dynamic(TimeSeries spot, double markup, double lower_bound_ref, double p_lower,
                               MarkupKind kind) {
  Thresholds th;
  th.mode = ThresholdMode::Dynamic;
  th.spot = std::move(spot);
  th.markup = markup;
  th.markup_kind = kind;
  th.lower_bound_ref = lower_bound_ref;
  th.p_lower = p_lower;
  return th;
}

void Thresholds::validate(std::size_t horizon) const {
  for (double v : {p_upper_fixed, markup, p_lower, lower_bound_ref})
    if (!std::isfinite(v)) throw ValidationError("price thresholds must be finite");
  if (mode == ThresholdMode::Fixed) {
    if (!(p_lower <= lower_bound_ref && lower_bound_ref <= p_upper_fixed))
      throw ValidationError("fixed thresholds violate p_L <= reference <= p_U (" + format_double(p_lower) +
                            ", " + format_double(lower_bound_ref) + ", " + format_double(p_upper_fixed) + ")");
    return;
  }
  if (markup < 0.0) throw ValidationError("markup must be >= 0");
  if (!spot) throw ValidationError("dynamic thresholds need a spot price series");
  if (spot->size() < horizon)
    throw ValidationError("spot series covers " + std::to_string(spot->size()) + " of " +
                          std::to_string(horizon) + " timesteps");
}

double Sdr::ratio() const {
  if (infinite_) throw std::logic_error("supply-demand ratio is infinite");
  return ratio_;
}

Sdr sdr(std::span<const double> surpluses, std::span<const double> demands) {
  double supply = 0.0;
  double demand = 0.0;
  for (double s : surpluses) {
    if (s < 0.0) throw std::invalid_argument("negative surplus");
    supply += s;
  }
  for (double d : demands) {
    if (d < 0.0) throw std::invalid_argument("negative demand");
    demand += d;
  }
  if (demand > 0.0) return Sdr::finite(supply / demand);
  return supply > 0.0 ? Sdr::saturated_infinite() : Sdr::finite(0.0);
}

namespace {

PriceDecision sdr_rule(const Sdr& r, double upper, const Thresholds& th) {
  if (r.is_zero()) return {upper, Regime::Inactive};
  if (r.is_saturated()) return {th.p_lower, Regime::Saturated};
  const double ratio = r.ratio();
  return {ratio * th.lower_bound_ref + (1.0 - ratio) * upper, Regime::Partial};
}

}  // namespace

PriceDecision price_fixed(const Sdr& r, const Thresholds& th) { return sdr_rule(r, th.p_upper_fixed, th); }

double upper_threshold(std::size_t t, const Thresholds& th) {
  if (th.mode == ThresholdMode::Fixed) return th.p_upper_fixed;
  if (!th.spot) throw std::logic_error("dynamic thresholds without a spot series");
  const double alpha = th.spot->at(t);
  return th.markup_kind == MarkupKind::Proportional ? alpha * (1.0 + th.markup) : alpha + th.markup;
}

PriceDecision price_dynamic(const Sdr& r, double p_upper_t, const Thresholds& th) {
  if (r.is_zero()) return {p_upper_t, Regime::Inactive};
  if (p_upper_t < 0.0) return {p_upper_t, Regime::Curtailed};
  if (p_upper_t < th.lower_bound_ref || p_upper_t == 0.0) return {p_upper_t, Regime::BelowLcoe};
  return sdr_rule(r, p_upper_t, th);
}

MarketResult clear_timestep(const Neighborhood& n, std::size_t t, const Thresholds& th) {
  MarketResult mr;
  mr.t = t;
  mr.surpluses.reserve(n.size());
  mr.demands.reserve(n.size());
  for (const Participant& p : n.participants()) {
    const NetPosition pos = net_position(p, t);
    mr.surpluses.push_back(pos.surplus_kwh);
    mr.demands.push_back(pos.demand_kwh);
    mr.total_surplus += pos.surplus_kwh;
    mr.total_demand += pos.demand_kwh;
  }
  mr.sdr = sdr(mr.surpluses, mr.demands);
  mr.p_upper = upper_threshold(t, th);
  mr.export_price = th.p_lower;
  const PriceDecision decision =
      th.mode == ThresholdMode::Fixed ? price_fixed(mr.sdr, th) : price_dynamic(mr.sdr, mr.p_upper, th);
  mr.price = decision.price;
  mr.regime = decision.regime;
  return mr;
}

void check_threshold_axis(const Neighborhood& n, const Thresholds& th) {
  if (th.mode == ThresholdMode::Dynamic && th.spot) {
    if (th.spot->start() != n.start())
      throw InputError("spot series starts at " + format_iso8601_utc(th.spot->start()) +
                       " but the profiles start at " + format_iso8601_utc(n.start()));
    if (th.spot->size() < n.horizon())
      throw InputError("spot series covers " + std::to_string(th.spot->size()) + " of " +
                       std::to_string(n.horizon()) + " timesteps");
  }
}

std::vector<MarketResult> clear_market(const Neighborhood& n, const Thresholds& th) {
  check_threshold_axis(n, th);
  th.validate(n.horizon());
  std::vector<MarketResult> results;
  results.reserve(n.horizon());
  for (std::size_t t = 0; t < n.horizon(); ++t) results.push_back(clear_timestep(n, t, th));
  return results;
}

}  // namespace lemsim
