#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lemsim/error.hpp"
#include "lemsim/lcoe.hpp"
#include "lemsim/numeric.hpp"
#include "lemsim/pipeline.hpp"

namespace {

using namespace lemsim;

enum Exit : int { kOk = 0, kValidation = 1, kInput = 2, kInvariant = 3 };

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> scenarios;
};

struct LcoeArgs {
  std::string config;
  PvCostModel costs;
  double pv_kwp = kDefaultPvKwp;
  std::optional<double> annual_kwh;
  int lifetime = 25;
  double wacc = 0.04;
  std::optional<double> opex;
};

std::string pct(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", *v);
  return buf;
}

void print_summary(const RunResult& r) {
  std::printf("%-20s %14s %16s %12s %10s %10s\n", "scenario", "consumer_cost", "prosumer_revenue", "net_cost",
              "vs FiT", "vs Auction");
  for (const ScenarioOutcome& o : r.outcomes) {
    auto delta = [&](Scheme ref, double NeighborhoodTotals::*field) -> std::string {
      for (const ScenarioOutcome& other : r.outcomes)
        if (other.label == ScenarioLabel{ref, o.label.mode} && !(other.label == o.label))
          return pct(percent_delta(o.summary.*field, other.summary.*field));
      return "";
    };
    std::printf("%-20s %14.2f %16.2f %12.2f %10s %10s\n", o.label.name().c_str(), o.summary.consumer_cost,
                o.summary.prosumer_revenue, o.summary.net_cost,
                delta(Scheme::FiT, &NeighborhoodTotals::net_cost).c_str(),
                delta(Scheme::BaseAuction, &NeighborhoodTotals::net_cost).c_str());
  }
  if (!r.sweep.empty()) std::printf("sweep: %zu points\n", r.sweep.size());
  std::printf("outputs: %s (%zu files)\n", r.out_dir.string().c_str(), r.files.size());
}

int do_run(const RunArgs& args, bool require_sweep, bool quiet) {
  RunOptions opt;
  if (!args.out.empty()) opt.out_dir = args.out;
  opt.seed = args.seed;
  for (const std::string& s : args.scenarios) {
    try {
      opt.only.push_back(ScenarioLabel::parse(s));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(std::string("--scenario: ") + e.what());
    }
  }
  opt.require_sweep = require_sweep;
  opt.threads = threads_from_env();
  if (!quiet) opt.log = &std::cerr;
  const RunResult result = run_config_file(args.config, opt);
  if (!quiet) print_summary(result);
  return kOk;
}

int do_validate(const std::string& config, bool quiet) {
  const std::vector<ConfigIssue> issues = validate_config_file(config);
  if (issues.empty()) {
    if (!quiet) std::cout << config << ": valid\n";
    return kOk;
  }
  std::cerr << format_issues(issues);
  return kValidation;
}

int do_lcoe(const LcoeArgs& a) {
  double value = 0.0;
  if (!a.config.empty()) {
    ParsedConfig parsed = parse_config_file(a.config);
    if (!parsed.issues.empty()) throw ValidationError(format_issues(parsed.issues));
    const FinanceConfig finance = parsed.config.finance.value_or(FinanceConfig{});
    value = computed_neighborhood_lcoe(finance, load_neighborhood(parsed.config));
  } else {
    if (!a.annual_kwh) throw ValidationError("--annual-kwh: required without --config");
    a.costs.validate();
    const double investment = capex(a.costs, a.pv_kwp);
    const double opex = a.opex.value_or(kDefaultOpexFraction * investment);
    value = lcoe(investment, FinancialParams::flat(a.lifetime, a.wacc, opex, *a.annual_kwh));
  }
  std::cout << format_double(value) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local energy market simulator"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress and summary output");

  RunArgs run_args;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", run_args.config, "Scenario config file")->required();
    cmd->add_option("-o,--out", run_args.out, "Output directory (overrides general.output_dir)");
    cmd->add_option("-s,--seed", run_args.seed, "Seed (overrides general.seed)");
    cmd->add_option("--scenario", run_args.scenarios, "Only run this scenario label; repeatable");
    cmd->add_flag("-q,--quiet", quiet, "Suppress progress and summary output");
  };
  CLI::App* run = app.add_subcommand("run", "Run every configured scenario and write outputs");
  add_run_options(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Like run, but the [sweep] section is required");
  add_run_options(sweep);

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "Report every problem in a config file");
  validate->add_option("-c,--config", validate_config, "Scenario config file")->required();
  validate->add_flag("-q,--quiet", quiet, "Print nothing when the config is valid");

  LcoeArgs la;
  CLI::App* lc = app.add_subcommand("lcoe", "Print the levelized cost of electricity in EUR/MWh");
  lc->add_option("-c,--config", la.config, "Use the [finance] section and roster of this config");
  lc->add_option("--pv-kwp", la.pv_kwp, "Installed capacity, kWp");
  lc->add_option("--equipment", la.costs.equipment_per_kwp, "Equipment, EUR/kWp");
  lc->add_option("--direct-labor", la.costs.direct_labor_per_kwp, "Direct labor, EUR/kWp");
  lc->add_option("--indirect-labor", la.costs.indirect_labor_per_kwp, "Indirect labor, EUR/kWp");
  lc->add_option("--permitting", la.costs.permitting_per_kwp, "Permitting, EUR/kWp");
  lc->add_option("--overhead", la.costs.overhead_per_kwp, "Overhead, EUR/kWp");
  lc->add_option("--annual-kwh", la.annual_kwh, "Yearly production, kWh");
  lc->add_option("--lifetime", la.lifetime, "Lifetime, years");
  lc->add_option("--wacc", la.wacc, "Discount rate as a fraction");
  lc->add_option("--opex", la.opex, "Yearly OPEX, EUR (default 1% of CAPEX)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return do_run(run_args, false, quiet);
    if (*sweep) return do_run(run_args, true, quiet);
    if (*validate) return do_validate(validate_config, quiet);
    if (*lc) return do_lcoe(la);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const InvariantError& e) {
    std::cerr << "invariant breach: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInvariant;
  }
  return kOk;
}
