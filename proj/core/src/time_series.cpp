#include "lemsim/time_series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lemsim/numeric.hpp"

namespace lemsim {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw std::invalid_argument("timestamp too short: " + std::string(text));
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len)
    throw std::invalid_argument("bad timestamp field in: " + std::string(text));
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos)
    throw std::invalid_argument("bad timestamp separator in: " + std::string(text));
}

}  // namespace

Timestamp default_start() {
  using namespace std::chrono;
  return sys_seconds{sys_days{year{2019} / January / 1}};
}

Timestamp parse_iso8601_utc(std::string_view text) {
  using namespace std::chrono;
  // YYYY-MM-DDTHH:MM[:SS][Z]
  const int y = parse_field(text, 0, 4);
  expect_char(text, 4, "-");
  const int mo = parse_field(text, 5, 2);
  expect_char(text, 7, "-");
  const int d = parse_field(text, 8, 2);
  expect_char(text, 10, "T ");
  const int h = parse_field(text, 11, 2);
  expect_char(text, 13, ":");
  const int mi = parse_field(text, 14, 2);
  std::size_t pos = 16;
  int s = 0;
  if (pos < text.size() && text[pos] == ':') {
    s = parse_field(text, pos + 1, 2);
    pos += 3;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) throw std::invalid_argument("trailing characters in timestamp: " + std::string(text));

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
    throw std::invalid_argument("timestamp out of range: " + std::string(text));
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_iso8601_utc(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

bool is_hour_aligned(Timestamp ts) {
  return ts.time_since_epoch() % std::chrono::hours{1} == std::chrono::seconds{0};
}

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::EnergyKwh: return "kWh";
    case Unit::PriceEurPerMwh: return "EUR/MWh";
  }
  return "?";
}

TimeSeries::TimeSeries(Timestamp start, std::vector<double> values, Unit unit)
    : start_(start), values_(std::move(values)), unit_(unit) {
  if (values_.empty()) throw std::invalid_argument("time series must hold at least one value");
  if (!is_hour_aligned(start_))
    throw std::invalid_argument("time series start is not hour-aligned: " + format_iso8601_utc(start_));
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t]))
      throw std::invalid_argument("non-finite value at step " + std::to_string(t));
    if (unit_ == Unit::EnergyKwh && values_[t] < 0.0)
      throw std::invalid_argument("negative energy at step " + std::to_string(t));
  }
}

double TimeSeries::at(std::size_t t) const {
  if (t >= values_.size())
    throw std::out_of_range("timestep " + std::to_string(t) + " outside horizon " + std::to_string(values_.size()));
  return values_[t];
}

double TimeSeries::sum() const { return compensated_sum(values_); }

}  // namespace lemsim
