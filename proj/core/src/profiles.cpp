#include "lemsim/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lemsim/error.hpp"
#include "lemsim/numeric.hpp"

namespace lemsim {

// --- Participant / Neighborhood ----------------------------------------------

Participant::Participant(std::string id, TimeSeries load)
    : Participant(id, load, 0.0,
                  TimeSeries(load.start(), std::vector<double>(load.size(), 0.0), Unit::EnergyKwh)) {}

Participant::Participant(std::string id, TimeSeries load, double pv_capacity_kwp, TimeSeries generation)
    : id_(std::move(id)),
      load_(std::move(load)),
      pv_capacity_kwp_(pv_capacity_kwp),
      generation_(std::move(generation)) {
  if (id_.empty()) throw std::invalid_argument("participant id must not be empty");
  if (load_.unit() != Unit::EnergyKwh || generation_.unit() != Unit::EnergyKwh)
    throw std::invalid_argument(id_ + ": load and generation must be energy series");
  if (!load_.same_axis(generation_))
    throw std::invalid_argument(id_ + ": load and generation do not share a time axis");
  if (!std::isfinite(pv_capacity_kwp_) || pv_capacity_kwp_ < 0.0)
    throw std::invalid_argument(id_ + ": PV capacity must be finite and >= 0");
  const auto gen = generation_.values();
  const bool all_zero = std::all_of(gen.begin(), gen.end(), [](double g) { return g == 0.0; });
  if (pv_capacity_kwp_ == 0.0 && !all_zero)
    throw std::invalid_argument(id_ + ": generation without PV capacity");
  if (pv_capacity_kwp_ > 0.0 && all_zero)
    throw std::invalid_argument(id_ + ": PV capacity with an all-zero generation profile");
}

Neighborhood::Neighborhood(std::vector<Participant> participants) : participants_(std::move(participants)) {
  if (participants_.empty()) throw std::invalid_argument("a neighborhood needs at least one participant");
  std::set<std::string> seen;
  const TimeSeries& axis = participants_.front().load();
  for (const Participant& p : participants_) {
    if (!seen.insert(p.id()).second) throw std::invalid_argument("duplicate participant id " + p.id());
    if (!p.load().same_axis(axis))
      throw std::invalid_argument(p.id() + ": time axis differs from " + participants_.front().id());
  }
}

std::optional<std::size_t> Neighborhood::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < participants_.size(); ++i)
    if (participants_[i].id() == id) return i;
  return std::nullopt;
}

NetPosition net_position(const Participant& p, std::size_t t) {
  const double g = p.generation().at(t);
  const double l = p.load().at(t);
  if (g > l) return {g - l, 0.0};
  return {0.0, l - g};
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::optional<double> parse_decimal(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  return line;
}

}  // namespace

TimeSeries load_profile_csv(const std::filesystem::path& path, Unit unit) {
  std::ifstream in = open_or_throw(path);
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw InputError(where + ": empty file");
  line = strip_bom(std::move(line));
  const auto header = split_csv(line);
  if (header.size() != 2 || header[0] != "timestamp" || header[1] != "value")
    throw InputError(where + ": header must be 'timestamp,value'");

  std::optional<Timestamp> start;
  Timestamp previous{};
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::string at = where + ": row " + std::to_string(row);
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw InputError(at + ": expected 2 fields, got " + std::to_string(fields.size()));
    Timestamp ts;
    try {
      ts = parse_iso8601_utc(fields[0]);
    } catch (const std::invalid_argument& e) {
      throw InputError(at + ": " + e.what());
    }
    if (!is_hour_aligned(ts)) throw InputError(at + ": timestamp is not hour-aligned");
    if (start && ts != previous + TimeSeries::kStep)
      throw InputError(at + ": timestamp does not follow the previous row by one hour");
    const auto value = parse_decimal(fields[1]);
    if (!value) throw InputError(at + ": malformed value '" + std::string(fields[1]) + "'");
    if (!std::isfinite(*value)) throw InputError(at + ": non-finite value");
    if (unit == Unit::EnergyKwh && *value < 0.0) throw InputError(at + ": negative energy value");
    if (!start) start = ts;
    previous = ts;
    values.push_back(*value);
  }
  if (values.empty()) throw InputError(where + ": no data rows");
  return TimeSeries(*start, std::move(values), unit);
}

void write_profile_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "timestamp,value\n";
  for (std::size_t t = 0; t < series.size(); ++t)
    out << format_iso8601_utc(series.time_at(t)) << ',' << format_double(series[t]) << '\n';
}

// --- Synthetic generators -----------------------------------------------------

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool cached_ = false;
};

struct CalendarHour {
  int day_of_year;  // 0-based
  long day_index;   // days since the series start day
  int hour;         // 0..23 in the requested time zone
  bool weekend;
};

CalendarHour calendar_hour(Timestamp ts, int utc_offset_hours, Timestamp start) {
  using namespace std::chrono;
  const auto local = ts + hours{utc_offset_hours};
  const auto day = floor<days>(local);
  const year_month_day ymd{day};
  const auto jan1 = sys_days{ymd.year() / January / 1};
  const weekday wd{day};
  const auto start_day = floor<days>(start + hours{utc_offset_hours});
  return {static_cast<int>((day - jan1).count()), static_cast<long>((day - start_day).count()),
          static_cast<int>((local - day).count() / 3600), wd == Saturday || wd == Sunday};
}

double bump(double x, double centre, double width) {
  const double z = (x - centre) / width;
  return std::exp(-0.5 * z * z);
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCentralEuropeanOffset = 1;

// 1 at the June solstice, 0 at the December solstice.
double summerness(int day_of_year) { return 0.5 * (1.0 + std::cos(kTwoPi * (day_of_year - 171) / 365.25)); }

void require_horizon(std::size_t horizon) {
  if (horizon < 24) throw std::invalid_argument("synthetic profiles need a horizon of at least 24 hours");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t offset) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (offset + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TimeSeries synth_load(std::uint64_t seed, double annual_kwh, std::size_t horizon, Timestamp start) {
  if (!(annual_kwh > 0.0) || !std::isfinite(annual_kwh))
    throw std::invalid_argument("annual consumption must be positive");
  require_horizon(horizon);
  Rng rng(seed);

  std::vector<double> raw(horizon);
  long current_day = -1;
  double day_level = 0.0;
  double day_factor = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const CalendarHour c = calendar_hour(start + TimeSeries::kStep * static_cast<long>(t), kCentralEuropeanOffset, start);
    if (c.day_index != current_day) {
      current_day = c.day_index;
      day_level = 0.6 * day_level + 0.8 * rng.normal();
      day_factor = std::exp(0.12 * day_level);
    }
    const double h = c.hour + 0.5;
    double shape;
    if (c.weekend)
      shape = 0.36 + 0.45 * bump(h, 9.5, 1.6) + 0.35 * bump(h, 13.0, 1.8) + 0.95 * bump(h, 19.5, 2.0);
    else
      shape = 0.30 + 0.55 * bump(h, 7.0, 1.1) + 0.10 * bump(h, 12.5, 1.4) + 1.00 * bump(h, 19.5, 1.8);
    const double season = 1.0 + 0.18 * std::cos(kTwoPi * (c.day_of_year - 10) / 365.25);
    double value = shape * season * day_factor * std::exp(0.3 * rng.normal() - 0.045);
    if (h > 6.0 && h < 23.0 && rng.uniform() < 0.05) value += 0.8 * rng.uniform();
    raw[t] = value;
  }

  const double target = annual_kwh * static_cast<double>(horizon) / 8760.0;
  const double scale = target / compensated_sum(raw);
  for (double& v : raw) v *= scale;
  return TimeSeries(start, std::move(raw), Unit::EnergyKwh);
}

TimeSeries synth_pv(std::uint64_t seed, double capacity_kwp, std::size_t horizon, Timestamp start) {
  if (!(capacity_kwp >= 0.0) || !std::isfinite(capacity_kwp))
    throw std::invalid_argument("PV capacity must be finite and >= 0");
  require_horizon(horizon);
  if (capacity_kwp == 0.0) return TimeSeries(start, std::vector<double>(horizon, 0.0), Unit::EnergyKwh);

  constexpr double kDeg = std::numbers::pi / 180.0;
  constexpr double kLatitude = 48.0 * kDeg;
  constexpr double kLongitudeDeg = 7.85;
  constexpr double kTilt = 35.0 * kDeg;
  constexpr double kPerformanceRatio = 0.80;

  Rng rng(seed);
  std::vector<double> out(horizon);
  long current_day = -1;
  double clearness = 0.5;
  int category = 1;  // 0 clear, 1 partly cloudy, 2 overcast
  for (std::size_t t = 0; t < horizon; ++t) {
    const Timestamp ts = start + TimeSeries::kStep * static_cast<long>(t);
    const CalendarHour c = calendar_hour(ts, 0, start);
    if (c.day_index != current_day) {
      current_day = c.day_index;
      const double s = summerness(c.day_of_year);
      if (rng.uniform() >= 0.4) {  // otherwise yesterday's sky persists
        const double p_clear = 0.20 + 0.32 * s;
        const double p_overcast = 0.46 - 0.26 * s;
        const double u = rng.uniform();
        category = u < p_clear ? 0 : (u < p_clear + p_overcast ? 2 : 1);
      }
      const double u = rng.uniform();
      clearness = category == 0 ? 0.85 + 0.15 * u : (category == 2 ? 0.10 + 0.22 * u : 0.40 + 0.40 * u);
    }

    const double solar_time = c.hour + 0.5 + kLongitudeDeg / 15.0;
    const double hour_angle = 15.0 * (solar_time - 12.0) * kDeg;
    const double declination = 23.45 * kDeg * std::sin(kTwoPi * (284.0 + c.day_of_year + 1) / 365.0);
    const double cos_zenith = std::sin(kLatitude) * std::sin(declination) +
                              std::cos(kLatitude) * std::cos(declination) * std::cos(hour_angle);
    if (cos_zenith <= 0.0) {
      out[t] = 0.0;
      continue;
    }
    const double cos_incidence = std::sin(kLatitude - kTilt) * std::sin(declination) +
                                 std::cos(kLatitude - kTilt) * std::cos(declination) * std::cos(hour_angle);
    const double air_mass = 1.0 / std::max(cos_zenith, 0.05);
    const double beam = 1.353 * std::pow(0.7, std::pow(air_mass, 0.678));  // kW/m2
    const double plane_of_array = beam * std::max(cos_incidence, 0.0) + 0.24 * beam * std::sqrt(cos_zenith);
    const double jitter = category == 1 ? std::clamp(1.0 + 0.25 * rng.normal(), 0.2, 1.25)
                                        : std::clamp(1.0 + 0.05 * rng.normal(), 0.8, 1.1);
    out[t] = capacity_kwp * kPerformanceRatio * plane_of_array * clearness * jitter;
  }
  return TimeSeries(start, std::move(out), Unit::EnergyKwh);
}

TimeSeries synth_spot(std::uint64_t seed, std::size_t horizon, Timestamp start) {
  require_horizon(horizon);
  Rng rng(seed);
  std::vector<double> out(horizon);
  long current_day = -1;
  double wind = 0.0;
  double hourly = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const CalendarHour c =
        calendar_hour(start + TimeSeries::kStep * static_cast<long>(t), kCentralEuropeanOffset, start);
    if (c.day_index != current_day) {
      current_day = c.day_index;
      wind = 0.7 * wind + 7.0 * rng.normal();
    }
    hourly = 0.85 * hourly + 3.0 * rng.normal();
    const double h = c.hour + 0.5;
    const double s = summerness(c.day_of_year);
    double price = 37.7 + 6.0 * std::cos(kTwoPi * (c.day_of_year - 15) / 365.25);
    price += -9.0 * bump(h, 3.5, 2.2) + 6.0 * bump(h, 8.5, 1.5) + 9.0 * bump(h, 18.5, 1.8) -
             (3.0 + 9.0 * s) * bump(h, 13.0, 2.8);
    if (c.weekend) price -= 6.0 + 4.0 * bump(h, 13.0, 3.0);
    price += wind + hourly;
    out[t] = price;
  }
  return TimeSeries(start, std::move(out), Unit::PriceEurPerMwh);
}

// --- Roster ---------------------------------------------------------------------

std::optional<std::uint64_t> parse_synth_token(const std::string& source) {
  constexpr std::string_view prefix = "synth:";
  if (source.rfind(prefix, 0) != 0) return std::nullopt;
  const std::string_view digits = std::string_view(source).substr(prefix.size());
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size())
    throw InputError("malformed synthetic source '" + source + "', expected synth:<non-negative integer>");
  return n;
}

std::vector<RosterEntry> read_roster_csv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw InputError(where + ": empty roster");
  line = strip_bom(std::move(line));
  const auto header = split_csv(line);
  const std::vector<std::string_view> expected{"id", "annual_kwh", "pv_capacity_kwp", "load_file", "generation_file"};
  if (header != expected)
    throw InputError(where + ": header must be 'id,annual_kwh,pv_capacity_kwp,load_file,generation_file'");

  std::vector<RosterEntry> roster;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::string at = where + ": row " + std::to_string(row);
    const auto f = split_csv(line);
    if (f.size() != 5) throw InputError(at + ": expected 5 fields, got " + std::to_string(f.size()));
    RosterEntry e;
    e.id = std::string(f[0]);
    if (e.id.empty()) throw InputError(at + ": empty id");
    if (!f[1].empty()) {
      const auto v = parse_decimal(f[1]);
      if (!v || !std::isfinite(*v) || *v <= 0.0) throw InputError(at + ": annual_kwh must be a positive number");
      e.annual_kwh = *v;
    }
    if (!f[2].empty()) {
      const auto v = parse_decimal(f[2]);
      if (!v || !std::isfinite(*v) || *v < 0.0) throw InputError(at + ": pv_capacity_kwp must be a number >= 0");
      e.pv_capacity_kwp = *v;
    }
    e.load_source = std::string(f[3]);
    e.generation_source = std::string(f[4]);
    if (e.load_source.empty()) throw InputError(at + ": load_file is required");
    roster.push_back(std::move(e));
  }
  if (roster.empty()) throw InputError(where + ": roster has no participants");
  return roster;
}

void write_roster_csv(const std::filesystem::path& path, const std::vector<RosterEntry>& roster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "id,annual_kwh,pv_capacity_kwp,load_file,generation_file\n";
  for (const RosterEntry& e : roster)
    out << e.id << ',' << format_double(e.annual_kwh) << ',' << format_double(e.pv_capacity_kwp) << ','
        << e.load_source << ',' << e.generation_source << '\n';
}

std::vector<RosterEntry> default_roster() {
  std::vector<RosterEntry> roster;
  for (int i = 1; i <= 10; ++i) {
    RosterEntry e;
    e.id = (i < 10 ? "H0" : "H") + std::to_string(i);
    e.annual_kwh = kDefaultAnnualKwh;
    e.load_source = "synth:" + std::to_string(i);
    if (i == 1 || i == 2 || i == 4 || i == 6) {
      e.pv_capacity_kwp = kDefaultPvKwp;
      e.generation_source = "synth:100";
    }
    roster.push_back(std::move(e));
  }
  return roster;
}

Neighborhood build_neighborhood(const std::vector<RosterEntry>& roster, const RosterContext& ctx) {
  if (roster.empty()) throw InputError("roster has no participants");

  auto resolve = [&](const std::string& source) {
    std::filesystem::path p(source);
    return p.is_absolute() ? p : ctx.base_dir / p;
  };

  // File-backed series fix the axis; every other file must agree with it.
  std::optional<TimeSeries> axis;
  std::vector<std::optional<TimeSeries>> loads(roster.size()), gens(roster.size());
  auto adopt_axis = [&](const TimeSeries& s, const std::string& source) {
    if (!axis)
      axis = s;
    else if (!axis->same_axis(s))
      throw InputError(source + ": time axis differs from the other profile files");
  };
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const RosterEntry& e = roster[i];
    if (!parse_synth_token(e.load_source)) {
      loads[i] = load_profile_csv(resolve(e.load_source), Unit::EnergyKwh);
      adopt_axis(*loads[i], e.load_source);
    }
    if (e.pv_capacity_kwp == 0.0 && !e.generation_source.empty())
      throw InputError(e.id + ": generation_file given for a participant without PV capacity");
    if (e.pv_capacity_kwp > 0.0 && e.generation_source.empty())
      throw InputError(e.id + ": PV capacity given without a generation_file");
    if (!e.generation_source.empty() && !parse_synth_token(e.generation_source)) {
      gens[i] = load_profile_csv(resolve(e.generation_source), Unit::EnergyKwh);
      adopt_axis(*gens[i], e.generation_source);
    }
  }
  const Timestamp start = axis ? axis->start() : default_start();
  const std::size_t horizon = axis ? axis->size() : ctx.synth_horizon;

  std::vector<Participant> participants;
  participants.reserve(roster.size());
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const RosterEntry& e = roster[i];
    try {
      TimeSeries load = loads[i] ? *loads[i]
                                 : synth_load(derive_seed(ctx.seed, *parse_synth_token(e.load_source)),
                                              e.annual_kwh, horizon, start);
      if (e.pv_capacity_kwp == 0.0) {
        participants.emplace_back(e.id, std::move(load));
        continue;
      }
      TimeSeries gen = gens[i] ? *gens[i]
                               : synth_pv(derive_seed(ctx.seed, *parse_synth_token(e.generation_source)),
                                          e.pv_capacity_kwp, horizon, start);
      participants.emplace_back(e.id, std::move(load), e.pv_capacity_kwp, std::move(gen));
    } catch (const std::invalid_argument& ex) {
      throw InputError(e.id + ": " + ex.what());
    }
  }
  try {
    return Neighborhood(std::move(participants));
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
}

}  // namespace lemsim
