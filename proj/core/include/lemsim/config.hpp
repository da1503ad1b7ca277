#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lemsim/lcoe.hpp"
#include "lemsim/scenario.hpp"

namespace lemsim {

// Config grammar (UTF-8, one statement per line):
//
//   # comment            ; comment
//   [section]
//   key = value          value runs to end of line, surrounding blanks trimmed
//
// Sections: general, prices, finance, sweep. Unknown sections or keys are
// reported as validation issues. See README for the key list.

struct FinanceConfig {
  bool compute_lcoe = false;
  PvCostModel costs;
  int lifetime_years = 25;
  double wacc = 0.04;
  std::optional<double> annual_opex_eur;    // default: kDefaultOpexFraction * capex
  std::optional<double> annual_energy_kwh;  // default: the prosumer's simulated yearly yield
};

struct SweepConfig {
  std::vector<int> counts;  // empty: 1 .. participants-1
  std::string tracked_consumer = "H03";
  std::string tracked_prosumer = "H01";
  double pv_capacity_kwp = kDefaultPvKwp;
  std::uint64_t pv_seed = 7;  // synth:<n> offset for newly assigned PV
};

struct ScenarioConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::optional<std::string> roster;
  std::optional<std::string> spot;
  std::vector<ScenarioLabel> scenarios;
  PriceConstants prices;
  std::optional<FinanceConfig> finance;
  std::optional<SweepConfig> sweep;
  std::string output_dir = "out";
  std::uint64_t seed = 2019;
  std::size_t horizon = 8760;
  bool write_ledger = false;

  /// Every key/value as written, keyed by "section.key"; echoed in the manifest.
  std::map<std::string, std::string> raw;

  bool has_dynamic() const;
};

struct ConfigIssue {
  std::string field;
  std::string reason;
};

struct ParsedConfig {
  ScenarioConfig config;
  std::vector<ConfigIssue> issues;  // syntax and value-format problems
};

ParsedConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {});

/// Throws InputError when the file cannot be read.
ParsedConfig parse_config_file(const std::filesystem::path& path);

/// Semantic checks: ranges, the p_L <= reference <= p_U ordering of each
/// fixed local-market scenario, spot presence for dynamic runs, referenced
/// files, sweep settings.
std::vector<ConfigIssue> validate_config(const ScenarioConfig& config);

/// parse + validate; every problem found.
std::vector<ConfigIssue> validate_config_file(const std::filesystem::path& path);

std::string format_issues(const std::vector<ConfigIssue>& issues);

}  // namespace lemsim
