#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lemsim/profiles.hpp"
#include "lemsim/time_series.hpp"

namespace lemsim {

enum class ThresholdMode { Fixed, Dynamic };

/// How the wholesaler's markup is applied to the spot price.
enum class MarkupKind {
  Proportional,  // p_upper = spot * (1 + markup)
  Additive,      // p_upper = spot + markup
};

std::string_view to_string(ThresholdMode mode);
std::string_view to_string(MarkupKind kind);

/// Price thresholds of the local market, EUR/MWh.
///
/// `lower_bound_ref` is the LCOE (or FiT) inside the convex combination;
/// `p_lower` is what the utility pays for exported surplus.
struct Thresholds {
  ThresholdMode mode = ThresholdMode::Fixed;
  double p_upper_fixed = 30.46;
  std::optional<TimeSeries> spot;
  double markup = 0.10;
  MarkupKind markup_kind = MarkupKind::Proportional;
  double p_lower = 5.0;
  double lower_bound_ref = 8.0;

  static Thresholds fixed(double p_upper, double lower_bound_ref, double p_lower);
  static Thresholds dynamic(TimeSeries spot, double markup, double lower_bound_ref, double p_lower,
                            MarkupKind kind = MarkupKind::Proportional);

  /// Fixed: p_lower <= lower_bound_ref <= p_upper_fixed. Dynamic: spot covers
  /// `horizon` steps. Throws ValidationError.
  void validate(std::size_t horizon) const;
};

/// Supply-demand ratio. Zero demand with positive surplus is kept as a
/// distinct marker rather than a floating-point infinity.
class Sdr {
 public:
  static Sdr finite(double ratio) { return Sdr(ratio, false); }
  static Sdr saturated_infinite() { return Sdr(0.0, true); }

  bool is_infinite() const { return infinite_; }
  bool is_zero() const { return !infinite_ && ratio_ == 0.0; }
  /// r >= 1, including the infinite marker.
  bool is_saturated() const { return infinite_ || ratio_ >= 1.0; }
  /// Finite ratio; must not be called on the infinite marker.
  double ratio() const;

  friend bool operator==(const Sdr&, const Sdr&) = default;

 private:
  Sdr(double ratio, bool infinite) : ratio_(ratio), infinite_(infinite) {}
  double ratio_;
  bool infinite_;
};

enum class Regime { Inactive, Partial, Saturated, BelowLcoe, Curtailed };

std::string_view to_string(Regime regime);

struct PriceDecision {
  double price = 0.0;
  Regime regime = Regime::Inactive;
};

struct MarketResult {
  std::size_t t = 0;
  std::vector<double> surpluses;  // kWh, one per participant
  std::vector<double> demands;    // kWh, one per participant
  double total_surplus = 0.0;
  double total_demand = 0.0;
  Sdr sdr = Sdr::finite(0.0);
  double p_upper = 0.0;       // utility retail price this hour
  double price = 0.0;         // cleared local price
  double export_price = 0.0;  // paid by the utility for exported surplus
  Regime regime = Regime::Inactive;
};

/// Sum of surpluses over sum of demands. Throws std::invalid_argument on a
/// negative entry.
Sdr sdr(std::span<const double> surpluses, std::span<const double> demands);

/// Fixed thresholds: p_upper at r = 0, the convex combination of
/// lower_bound_ref and p_upper for 0 < r < 1, p_lower once saturated.
PriceDecision price_fixed(const Sdr& r, const Thresholds& th);

/// Retail price at t: the marked-up spot price under dynamic thresholds, the
/// constant p_upper_fixed otherwise. Throws std::out_of_range past the spot
/// horizon.
double upper_threshold(std::size_t t, const Thresholds& th);

/// Dynamic thresholds. With surplus present: a negative p_upper curtails, a
/// p_upper below lower_bound_ref becomes the local price, otherwise the fixed
/// rule applies with p_upper_t in place of the constant. Without surplus the
/// market is Inactive at p_upper_t.
PriceDecision price_dynamic(const Sdr& r, double p_upper_t, const Thresholds& th);

/// Throws InputError unless a dynamic spot series starts with the
/// neighbourhood and covers its horizon. No-op in Fixed mode.
void check_threshold_axis(const Neighborhood& n, const Thresholds& th);

/// Clears a single timestep.
MarketResult clear_timestep(const Neighborhood& n, std::size_t t, const Thresholds& th);

/// One result per timestep, in time order. Throws InputError when the spot
/// series does not cover the neighbourhood's time axis.
std::vector<MarketResult> clear_market(const Neighborhood& n, const Thresholds& th);

}  // namespace lemsim
