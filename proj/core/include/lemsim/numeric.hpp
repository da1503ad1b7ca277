#pragma once

#include <span>
#include <string>

namespace lemsim {

// Neumaier variant of Kahan summation; used for every annual total.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// Relative difference |a-b| / max(|a|,|b|,floor); `floor` keeps near-zero
/// comparisons meaningful.
double relative_difference(double a, double b, double floor = 1.0);

/// Energy (kWh) times price (EUR/MWh) in EUR.
constexpr double energy_cost_eur(double kwh, double eur_per_mwh) { return kwh / 1000.0 * eur_per_mwh; }

}  // namespace lemsim
