#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lemsim/time_series.hpp"

namespace lemsim {

/// One household. Prosumer/consumer roles are not stored; they follow from
/// the net position at each timestep.
class Participant {
 public:
  /// Pure consumer: generation is the all-zero series on the load's axis.
  Participant(std::string id, TimeSeries load);
  Participant(std::string id, TimeSeries load, double pv_capacity_kwp, TimeSeries generation);

  const std::string& id() const { return id_; }
  const TimeSeries& load() const { return load_; }
  const TimeSeries& generation() const { return generation_; }
  double pv_capacity_kwp() const { return pv_capacity_kwp_; }
  bool has_pv() const { return pv_capacity_kwp_ > 0.0; }

 private:
  std::string id_;
  TimeSeries load_;
  double pv_capacity_kwp_;
  TimeSeries generation_;
};

class Neighborhood {
 public:
  explicit Neighborhood(std::vector<Participant> participants);

  const std::vector<Participant>& participants() const { return participants_; }
  const Participant& operator[](std::size_t i) const { return participants_[i]; }
  std::size_t size() const { return participants_.size(); }
  std::size_t horizon() const { return participants_.front().load().size(); }
  Timestamp start() const { return participants_.front().load().start(); }
  std::optional<std::size_t> index_of(const std::string& id) const;

 private:
  std::vector<Participant> participants_;
};

struct NetPosition {
  double surplus_kwh = 0.0;
  double demand_kwh = 0.0;
};

/// Surplus is generation above load, demand is load above generation; at most
/// one of the two is non-zero. Throws std::out_of_range for t past the horizon.
NetPosition net_position(const Participant& p, std::size_t t);

// --- CSV profiles -----------------------------------------------------------

/// Reads a `timestamp,value` file. Errors are InputError and name the
/// 1-based data row at fault.
TimeSeries load_profile_csv(const std::filesystem::path& path, Unit unit);
void write_profile_csv(const std::filesystem::path& path, const TimeSeries& series);

// --- Synthetic generators ---------------------------------------------------
//
// All three are pure functions of their arguments. Each draws from its own
// mt19937_64 stream seeded with `seed`; the normal deviates use Box-Muller on
// the raw 64-bit output so the series are identical across standard libraries.

/// Household load with a morning and an evening peak, higher in winter and a
/// flatter weekday/weekend contrast. Scaled so the series sums to
/// annual_kwh * horizon / 8760. Requires horizon >= 24 and annual_kwh > 0.
TimeSeries synth_load(std::uint64_t seed, double annual_kwh, std::size_t horizon,
                      Timestamp start = default_start());

/// Rooftop PV output for a south-facing array near 48N 7.85E: clear-sky
/// elevation model times a seeded daily cloudiness process. Zero whenever the
/// sun is below the horizon. Requires horizon >= 24 and capacity_kwp >= 0.
TimeSeries synth_pv(std::uint64_t seed, double capacity_kwp, std::size_t horizon,
                    Timestamp start = default_start());

/// Day-ahead spot price in EUR/MWh with seasonal, weekly and diurnal terms plus
/// autocorrelated noise. Occasionally negative.
TimeSeries synth_spot(std::uint64_t seed, std::size_t horizon, Timestamp start = default_start());

/// Mixes a base seed with a per-series offset (splitmix64 finaliser).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t offset);

// --- Roster -----------------------------------------------------------------

inline constexpr double kDefaultAnnualKwh = 3500.0;
inline constexpr double kDefaultPvKwp = 5.0;

struct RosterEntry {
  std::string id;
  double annual_kwh = kDefaultAnnualKwh;
  double pv_capacity_kwp = 0.0;
  std::string load_source;        // file path or "synth:<n>"
  std::string generation_source;  // file path, "synth:<n>", or empty for consumers
};

/// Reads `id,annual_kwh,pv_capacity_kwp,load_file,generation_file`.
std::vector<RosterEntry> read_roster_csv(const std::filesystem::path& path);
void write_roster_csv(const std::filesystem::path& path, const std::vector<RosterEntry>& roster);

/// Ten households H01..H10, prosumers H01, H02, H04 and H06 with 5 kWp each
/// sharing one weather year.
std::vector<RosterEntry> default_roster();

/// If `source` is `synth:<n>`, returns n.
std::optional<std::uint64_t> parse_synth_token(const std::string& source);

struct RosterContext {
  std::filesystem::path base_dir;  // relative file paths resolve against this
  std::uint64_t seed = 0;          // combined with every synth:<n> token
  std::size_t synth_horizon = 8760;
};

/// Materialises every series. File-backed series fix the time axis; synthetic
/// series are generated on that axis (or on default_start()/synth_horizon
/// when no file is referenced).
Neighborhood build_neighborhood(const std::vector<RosterEntry>& roster, const RosterContext& ctx);

}  // namespace lemsim
