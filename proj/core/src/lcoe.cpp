#include "lemsim/lcoe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lemsim {

double PvCostModel::total_per_kwp() const {
  return equipment_per_kwp + direct_labor_per_kwp + indirect_labor_per_kwp + permitting_per_kwp + overhead_per_kwp;
}

void PvCostModel::validate() const {
  for (double c : {equipment_per_kwp, direct_labor_per_kwp, indirect_labor_per_kwp, permitting_per_kwp,
                   overhead_per_kwp})
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("PV cost components must be finite and >= 0");
}

FinancialParams FinancialParams::flat(int lifetime_years, double wacc, double annual_opex_eur,
                                      double annual_energy_kwh) {
  if (lifetime_years < 1) throw std::invalid_argument("lifetime must be at least one year");
  FinancialParams fin;
  fin.lifetime_years = lifetime_years;
  fin.wacc = wacc;
  fin.annual_opex_eur.assign(static_cast<std::size_t>(lifetime_years), annual_opex_eur);
  fin.annual_energy_kwh.assign(static_cast<std::size_t>(lifetime_years), annual_energy_kwh);
  return fin;
}

void FinancialParams::validate() const {
  if (lifetime_years < 1) throw std::invalid_argument("lifetime must be at least one year");
  if (!std::isfinite(wacc) || wacc < 0.0) throw std::invalid_argument("WACC must be finite and >= 0");
  const auto n = static_cast<std::size_t>(lifetime_years);
  if (annual_opex_eur.size() != n || annual_energy_kwh.size() != n)
    throw std::invalid_argument("yearly OPEX and energy sequences must hold " + std::to_string(n) + " entries");
  for (double a : annual_opex_eur)
    if (!std::isfinite(a)) throw std::invalid_argument("yearly OPEX must be finite");
  for (double m : annual_energy_kwh)
    if (!std::isfinite(m) || m < 0.0) throw std::invalid_argument("yearly energy must be finite and >= 0");
  if (std::none_of(annual_energy_kwh.begin(), annual_energy_kwh.end(), [](double m) { return m > 0.0; }))
    throw std::domain_error("LCOE undefined: no production over the lifetime");
}

double capex(const PvCostModel& model, double pv_capacity_kwp) {
  model.validate();
  if (!std::isfinite(pv_capacity_kwp) || pv_capacity_kwp < 0.0)
    throw std::invalid_argument("PV capacity must be finite and >= 0");
  return pv_capacity_kwp * model.total_per_kwp();
}

double lcoe(double investment_eur, const FinancialParams& fin) {
  if (!std::isfinite(investment_eur) || investment_eur < 0.0)
    throw std::invalid_argument("investment must be finite and >= 0");
  fin.validate();
  double costs = investment_eur;
  double energy_mwh = 0.0;
  double discount = 1.0;
  for (std::size_t n = 0; n < fin.annual_energy_kwh.size(); ++n) {
    discount /= 1.0 + fin.wacc;
    costs += fin.annual_opex_eur[n] * discount;
    energy_mwh += fin.annual_energy_kwh[n] / 1000.0 * discount;
  }
  if (!(energy_mwh > 0.0)) throw std::domain_error("LCOE undefined: discounted production is zero");
  return costs / energy_mwh;
}

double neighborhood_lcoe(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("neighbourhood LCOE needs at least one prosumer value");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace lemsim
