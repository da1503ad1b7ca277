#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lemsim/analysis.hpp"
#include "lemsim/config.hpp"
#include "lemsim/parallel.hpp"
#include "lemsim/scenario.hpp"

namespace lemsim {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides general.output_dir
  std::optional<std::uint64_t> seed;             // overrides general.seed
  std::vector<ScenarioLabel> only;               // empty: every configured scenario
  bool require_sweep = false;
  unsigned threads = 1;
  std::ostream* log = nullptr;
  std::optional<std::filesystem::path> config_path;  // hashed into the manifest
};

struct RunResult {
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // written, relative to out_dir, sorted
  std::vector<ScenarioOutcome> outcomes;
  std::vector<SweepPoint> sweep;
  double lcoe_used = 0.0;
};

/// Loads inputs, runs every scenario, checks balances, writes outputs and
/// manifest.json. Throws ValidationError, InputError or InvariantError.
RunResult run_pipeline(const ScenarioConfig& config, const RunOptions& options);

RunResult run_config_file(const std::filesystem::path& path, RunOptions options);

/// Neighbourhood and spot series exactly as a run would build them.
Neighborhood load_neighborhood(const ScenarioConfig& config);
std::optional<TimeSeries> load_spot(const ScenarioConfig& config, const Neighborhood& n);

/// Mean LCOE over the roster's prosumers from the finance section.
double computed_neighborhood_lcoe(const FinanceConfig& finance, const Neighborhood& n);

std::string sha256_hex_of_file(const std::filesystem::path& path);

}  // namespace lemsim
