#pragma once

#include <span>
#include <vector>

namespace lemsim {

/// Per-kWp investment components of a rooftop PV system, EUR/kWp.
struct PvCostModel {
  double equipment_per_kwp = 900.0;
  double direct_labor_per_kwp = 100.0;
  double indirect_labor_per_kwp = 50.0;
  double permitting_per_kwp = 30.0;
  double overhead_per_kwp = 20.0;

  double total_per_kwp() const;
  void validate() const;
};

struct FinancialParams {
  int lifetime_years = 25;
  double wacc = 0.04;
  std::vector<double> annual_opex_eur;    // one entry per year, year 1 first
  std::vector<double> annual_energy_kwh;  // one entry per year, year 1 first

  /// Constant OPEX and production over the lifetime.
  static FinancialParams flat(int lifetime_years, double wacc, double annual_opex_eur,
                              double annual_energy_kwh);
  void validate() const;
};

/// Default yearly OPEX as a fraction of CAPEX.
inline constexpr double kDefaultOpexFraction = 0.01;

/// Up-front investment, EUR.
double capex(const PvCostModel& model, double pv_capacity_kwp);

/// Levelized cost of electricity in EUR/MWh: the investment plus discounted
/// yearly costs over discounted yearly production, years counted from 1.
/// Throws std::domain_error when discounted production is zero.
double lcoe(double investment_eur, const FinancialParams& fin);

/// Arithmetic mean of per-prosumer values; throws on an empty input.
double neighborhood_lcoe(std::span<const double> values);

}  // namespace lemsim
