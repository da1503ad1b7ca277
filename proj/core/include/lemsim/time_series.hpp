#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lemsim {

using Timestamp = std::chrono::sys_seconds;

/// 2019-01-01T00:00:00Z, the calendar year used by the default synthetic profiles.
Timestamp default_start();

/// Parses `YYYY-MM-DDTHH:MM[:SS][Z]` (a space may replace the `T`). Throws
/// std::invalid_argument on anything else.
Timestamp parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(Timestamp ts);
bool is_hour_aligned(Timestamp ts);

enum class Unit { EnergyKwh, PriceEurPerMwh };

std::string_view to_string(Unit unit);

// Immutable hourly series. Energy series must be non-negative; every value
// must be finite.
class TimeSeries {
 public:
  static constexpr std::chrono::hours kStep{1};

  TimeSeries(Timestamp start, std::vector<double> values, Unit unit);

  Timestamp start() const { return start_; }
  Unit unit() const { return unit_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t t) const { return values_[t]; }
  double at(std::size_t t) const;
  std::span<const double> values() const { return values_; }
  Timestamp time_at(std::size_t t) const { return start_ + kStep * static_cast<long>(t); }

  /// True when both series share start and length.
  bool same_axis(const TimeSeries& other) const {
    return start_ == other.start_ && values_.size() == other.values_.size();
  }

  double sum() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  Timestamp start_;
  std::vector<double> values_;
  Unit unit_;
};

}  // namespace lemsim
