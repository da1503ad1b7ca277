#include "lemsim/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lemsim/error.hpp"
#include "lemsim/lcoe.hpp"
#include "lemsim/numeric.hpp"

namespace lemsim {

namespace {

constexpr double kBalanceTolerance = 1e-9;

std::filesystem::path resolve(const ScenarioConfig& cfg, const std::string& source) {
  std::filesystem::path p(source);
  return p.is_absolute() ? p : cfg.base_dir / p;
}

std::vector<RosterEntry> roster_of(const ScenarioConfig& cfg) {
  return cfg.roster ? read_roster_csv(resolve(cfg, *cfg.roster)) : default_roster();
}

std::filesystem::path roster_dir(const ScenarioConfig& cfg) {
  return cfg.roster ? resolve(cfg, *cfg.roster).parent_path() : cfg.base_dir;
}

void log_line(const RunOptions& opt, const std::string& text) {
  if (opt.log) *opt.log << text << '\n';
}

void verify_balances(const ScenarioOutcome& o) {
  const BalanceReport report = check_balances(o.market, o.ledger);
  if (report.worst_relative_error > kBalanceTolerance)
    throw InvariantError(o.label.name() + ": " + report.worst_check + " off by " +
                         format_double(report.worst_relative_error) + " (relative) at t=" +
                         std::to_string(report.worst_t));
}


using json = nlohmann::ordered_json;

json input_hashes(const ScenarioConfig& cfg, const RunOptions& opt) {
  json inputs = json::object();
  if (opt.config_path) inputs["config"] = sha256_hex_of_file(*opt.config_path);
  if (cfg.roster) {
    const std::filesystem::path roster = resolve(cfg, *cfg.roster);
    inputs["roster"] = sha256_hex_of_file(roster);
    json profiles = json::object();
    for (const RosterEntry& e : read_roster_csv(roster))
      for (const std::string* src : {&e.load_source, &e.generation_source})
        if (!src->empty() && !parse_synth_token(*src)) {
          const std::filesystem::path f = std::filesystem::path(*src).is_absolute()
                                              ? std::filesystem::path(*src)
                                              : roster.parent_path() / *src;
          profiles[*src] = sha256_hex_of_file(f);
        }
    inputs["profiles"] = std::move(profiles);
  }
  if (cfg.spot && cfg.has_dynamic() && !parse_synth_token(*cfg.spot))
    inputs["spot"] = sha256_hex_of_file(resolve(cfg, *cfg.spot));
  return inputs;
}

json effective_config(const ScenarioConfig& cfg, const RunResult& r) {
  const TimeSeries& axis = r.outcomes.front().prices;
  json e;
  e["seed"] = cfg.seed;
  e["start"] = format_iso8601_utc(axis.start());
  e["horizon"] = axis.size();
  e["roster"] = cfg.roster.value_or("default");
  e["spot"] = cfg.spot.value_or("");
  json labels = json::array();
  for (const ScenarioLabel& l : cfg.scenarios) labels.push_back(l.name());
  e["scenarios"] = std::move(labels);
  const PriceConstants& p = cfg.prices;
  e["prices"] = {{"p_fixed_upper", p.p_fixed_upper},
                 {"fit", p.fit},
                 {"lcoe", r.lcoe_used},
                 {"p_lower_auction", p.p_lower_auction},
                 {"markup", p.markup},
                 {"markup_kind", std::string(to_string(p.markup_kind))}};
  if (cfg.sweep) {
    const SweepConfig& s = *cfg.sweep;
    e["sweep"] = {{"counts", s.counts},
                  {"tracked_consumer", s.tracked_consumer},
                  {"tracked_prosumer", s.tracked_prosumer},
                  {"pv_capacity_kwp", s.pv_capacity_kwp},
                  {"pv_seed", s.pv_seed}};
  }
  e["write_ledger"] = cfg.write_ledger;
  return e;
}

bool has_all_four(const std::vector<ScenarioOutcome>& outcomes, ThresholdMode mode) {
  for (const ScenarioLabel& l : scenario_labels_for(mode))
    if (std::none_of(outcomes.begin(), outcomes.end(), [&](const ScenarioOutcome& o) { return o.label == l; }))
      return false;
  return true;
}

void write_outputs(const ScenarioConfig& cfg, const RunOptions& opt, RunResult& result) {
  const std::filesystem::path& dir = result.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto add = [&](std::string name) { result.files.push_back(std::move(name)); return dir / result.files.back(); };

  for (const ScenarioOutcome& o : result.outcomes) {
    const std::string name = o.label.name();
    write_duration_csv(add("duration_" + name + ".csv"), duration_curve(o.prices.values()));
    write_daily_avg_csv(add("daily_avg_" + name + ".csv"), daily_monthly_stats(o.prices));
    if (cfg.write_ledger) write_ledger_csv(add("ledger_" + name + ".csv"), o.ledger);
  }
  write_summary_csv(add("summary.csv"), result.outcomes);
  write_selfconsumption_csv(add("selfconsumption.csv"), result.outcomes);
  if (has_all_four(result.outcomes, ThresholdMode::Fixed))
    write_table_csv(add("table_fixed.csv"), result.outcomes, ThresholdMode::Fixed);
  if (has_all_four(result.outcomes, ThresholdMode::Dynamic))
    write_table_csv(add("table_dynamic.csv"), result.outcomes, ThresholdMode::Dynamic);
  if (cfg.sweep) write_sweep_csv(add("sweep.csv"), result.sweep);
  std::sort(result.files.begin(), result.files.end());

  json manifest;
  manifest["config"] = json(cfg.raw);
  manifest["effective"] = effective_config(cfg, result);
  manifest["inputs"] = input_hashes(cfg, opt);
  json outputs = json::object();
  for (const std::string& f : result.files) outputs[f] = sha256_hex_of_file(dir / f);
  manifest["outputs"] = std::move(outputs);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << '\n';
  }
  result.files.push_back("manifest.json");
  std::sort(result.files.begin(), result.files.end());
  for (const std::string& f : result.files) log_line(opt, "wrote " + (dir / f).string());
}

}  // namespace

std::string sha256_hex_of_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

Neighborhood load_neighborhood(const ScenarioConfig& config) {
  RosterContext ctx;
  ctx.base_dir = roster_dir(config);
  ctx.seed = config.seed;
  ctx.synth_horizon = config.horizon;
  return build_neighborhood(roster_of(config), ctx);
}

std::optional<TimeSeries> load_spot(const ScenarioConfig& config, const Neighborhood& n) {
  if (!config.spot || config.spot->empty()) return std::nullopt;
  if (const auto token = parse_synth_token(*config.spot))
    return synth_spot(derive_seed(config.seed, *token), n.horizon(), n.start());
  const std::filesystem::path path = resolve(config, *config.spot);
  TimeSeries spot = load_profile_csv(path, Unit::PriceEurPerMwh);
  if (spot.start() != n.start() || spot.size() < n.horizon())
    throw InputError(path.string() + ": spot series covers " + std::to_string(spot.size()) + " hours from " +
                     format_iso8601_utc(spot.start()) + ", the neighbourhood needs " +
                     std::to_string(n.horizon()) + " from " + format_iso8601_utc(n.start()));
  return spot;
}

double computed_neighborhood_lcoe(const FinanceConfig& finance, const Neighborhood& n) {
  std::vector<double> values;
  for (const Participant& p : n.participants()) {
    if (!p.has_pv()) continue;
    const double investment = capex(finance.costs, p.pv_capacity_kwp());
    const double opex = finance.annual_opex_eur.value_or(kDefaultOpexFraction * investment);
    const double yearly_kwh =
        finance.annual_energy_kwh.value_or(p.generation().sum() * 8760.0 / static_cast<double>(n.horizon()));
    values.push_back(lcoe(investment, FinancialParams::flat(finance.lifetime_years, finance.wacc, opex, yearly_kwh)));
  }
  if (values.empty()) throw InputError("finance.compute_lcoe is set but the roster has no prosumers");
  return neighborhood_lcoe(values);
}

RunResult run_pipeline(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig config = input;
  if (options.seed) config.seed = *options.seed;
  if (options.require_sweep && !config.sweep) throw ValidationError("sweep: section [sweep] is required");
  if (!options.only.empty()) {
    std::vector<ScenarioLabel> kept;
    for (const ScenarioLabel& l : config.scenarios)
      if (std::find(options.only.begin(), options.only.end(), l) != options.only.end()) kept.push_back(l);
    if (kept.empty()) throw ValidationError("--scenario: none of the requested scenarios is configured");
    config.scenarios = std::move(kept);
  }
  if (const auto issues = validate_config(config); !issues.empty()) throw ValidationError(format_issues(issues));

  const Neighborhood n = load_neighborhood(config);
  const std::optional<TimeSeries> spot = config.has_dynamic() ? load_spot(config, n) : std::nullopt;
  PriceConstants prices = config.prices;
  if (config.finance && config.finance->compute_lcoe) {
    prices.lcoe = computed_neighborhood_lcoe(*config.finance, n);
    log_line(options, "computed neighbourhood LCOE: " + format_double(prices.lcoe) + " EUR/MWh");
  }
  for (const ScenarioLabel& l : config.scenarios) {
    if (l.is_base()) continue;
    try {
      thresholds_for(l, prices, spot).validate(n.horizon());
    } catch (const ValidationError& e) {
      throw ValidationError(l.name() + ": " + e.what());
    }
  }

  RunResult result;
  result.lcoe_used = prices.lcoe;
  result.out_dir = options.out_dir ? *options.out_dir : resolve(config, config.output_dir);

  std::vector<std::optional<ScenarioOutcome>> slots(config.scenarios.size());
  parallel_for(slots.size(), options.threads, [&](std::size_t k) {
    slots[k] = run_scenario(n, config.scenarios[k], prices, spot);
    verify_balances(*slots[k]);
  });
  for (auto& s : slots) result.outcomes.push_back(std::move(*s));

  if (config.sweep) {
    const SweepConfig& sc = *config.sweep;
    SweepSpec spec;
    spec.scenarios = config.scenarios;
    spec.scenarios.erase(std::remove_if(spec.scenarios.begin(), spec.scenarios.end(),
                                        [](const ScenarioLabel& l) { return l.is_base(); }),
                         spec.scenarios.end());
    spec.tracked_consumer = sc.tracked_consumer;
    spec.tracked_prosumer = sc.tracked_prosumer;
    spec.added_pv_kwp = sc.pv_capacity_kwp;
    spec.added_pv_per_kwp = synth_pv(derive_seed(config.seed, sc.pv_seed), 1.0, n.horizon(), n.start());
    spec.prosumer_counts = sc.counts;
    if (spec.prosumer_counts.empty())
      for (int c = 1; c < static_cast<int>(n.size()); ++c) spec.prosumer_counts.push_back(c);
    try {
      result.sweep = sensitivity_sweep(n, spec, prices, spot, options.threads);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("sweep: ") + e.what());
    }
  }

  write_outputs(config, options, result);
  return result;
}

RunResult run_config_file(const std::filesystem::path& path, RunOptions options) {
  ParsedConfig parsed = parse_config_file(path);
  if (!parsed.issues.empty()) throw ValidationError(format_issues(parsed.issues));
  if (!options.config_path) options.config_path = path;
  return run_pipeline(parsed.config, options);
}

}  // namespace lemsim
