// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and runtime
// limits are pinned below; exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "lemsim/lcoe.hpp"
#include "lemsim/pipeline.hpp"
#include "oracles.hpp"

using namespace lemsim;
namespace fs = std::filesystem;

namespace {

constexpr double kPricingRelTol = 1e-12;
constexpr double kClosedFormRelTol = 1e-12;
constexpr double kConservationRelTol = 1e-9;
constexpr double kActiveShareCentre = 0.50;
constexpr double kActiveShareBand = 0.15;
constexpr double kConvergenceRelTol = 0.05;
constexpr double kMonotoneNoise = 0.005;
constexpr double kLcoeRelTol = 1e-12;

constexpr double kLimitPricingS = 5.0;
constexpr double kLimitClosedFormS = 5.0;
constexpr double kLimitConservationS = 10.0;
constexpr double kLimitScenariosS = 30.0;

constexpr int kPricingDraws = 100'000;
constexpr int kClosedFormInstances = 10'000;
constexpr int kLcoeDraws = 1'000;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s [%s]\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// Same inputs the shipped default config produces, with the dynamic spot series.
struct DefaultYear {
  ScenarioConfig config;
  Neighborhood neighborhood;
  std::optional<TimeSeries> spot;
};

DefaultYear default_year() {
  ParsedConfig parsed = parse_config_file(LEMSIM_DEFAULT_CONFIG);
  if (!parsed.issues.empty()) throw std::runtime_error(format_issues(parsed.issues));
  Neighborhood n = load_neighborhood(parsed.config);
  auto spot = load_spot(parsed.config, n);
  return {parsed.config, std::move(n), std::move(spot)};
}

const ScenarioOutcome& find(const std::vector<ScenarioOutcome>& outcomes, Scheme s, ThresholdMode m) {
  for (const ScenarioOutcome& o : outcomes)
    if (o.label == ScenarioLabel{s, m}) return o;
  throw std::runtime_error("missing scenario");
}

void criterion1() {
  Stopwatch sw;
  oracle::Gen g(101);
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < kPricingDraws; ++k) {
    const double pl = g.uniform(0, 40), ref = pl + g.uniform(0, 40), pu = ref + g.uniform(0, 80);
    const Thresholds th = Thresholds::fixed(pu, ref, pl);
    const int kind = g.integer(0, 3);
    const double r = kind == 0 ? 0.0 : (kind == 1 ? 1.0 + g.uniform(0, 3) : g.uniform(1e-9, 1.0));
    const double got = price_fixed(Sdr::finite(r), th).price;
    bool ok = got >= pl && got <= pu;
    if (r == 0.0) ok = ok && got == pu;
    if (r >= 1.0) ok = ok && got == pl;
    if (r > 0.0 && r < 1.0) {
      const double e = oracle::rel(got, r * ref + (1.0 - r) * pu);
      worst = std::max(worst, e);
      ok = ok && e <= kPricingRelTol;
    }
    bad += !ok;
  }
  const bool infinite_ok = price_fixed(Sdr::saturated_infinite(), Thresholds::fixed(30.46, 8, 5)).price == 5.0;
  const double t = sw.seconds();
  report(1, bad == 0 && infinite_ok && t < kLimitPricingS, "pricing bounds and convex combination",
         fmt("%.0f violations in 1e5 draws, worst rel err %.2g, %.2f s", bad, worst, t));
}

void criterion2() {
  Stopwatch sw;
  oracle::Gen g(202);
  int cost_checks = 0, revenue_checks = 0, bad = 0;
  double worst = 0.0;
  for (int k = 0; k < kClosedFormInstances; ++k) {
    const int n = g.integer(1, 6);
    MarketResult mr;
    for (int i = 0; i < n; ++i) {
      const bool seller = g.coin();
      mr.surpluses.push_back(seller ? g.uniform(0.01, 5000) : 0.0);
      mr.demands.push_back(seller ? 0.0 : g.uniform(0.01, 5000));
    }
    mr.sdr = sdr(mr.surpluses, mr.demands);
    for (int i = 0; i < n; ++i) mr.total_surplus += mr.surpluses[i], mr.total_demand += mr.demands[i];
    const double pl = g.uniform(0, 10), ref = pl + g.uniform(0, 10), pu = ref + g.uniform(0, 50);
    const Thresholds th = Thresholds::fixed(pu, ref, pl);
    const PriceDecision d = price_fixed(mr.sdr, th);
    mr.price = d.price;
    mr.regime = d.regime;
    mr.p_upper = pu;
    mr.export_price = pl;
    const bool partial_or_one = !mr.sdr.is_infinite() && mr.sdr.ratio() > 0.0 && mr.sdr.ratio() <= 1.0;
    for (int i = 0; i < n; ++i) {
      if (partial_or_one) {
        const double a = individual_cost_closed_form(mr, i), b = individual_cost(mr, i);
        const double e = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9});
        worst = std::max(worst, e);
        bad += e > kClosedFormRelTol;
        ++cost_checks;
      }
      if (mr.sdr.is_saturated()) {
        const double a = individual_revenue_closed_form(mr, i), b = individual_revenue(mr, i);
        const double e = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9});
        worst = std::max(worst, e);
        bad += e > kClosedFormRelTol;
        ++revenue_checks;
      }
    }
  }
  const double t = sw.seconds();
  report(2, bad == 0 && cost_checks > 0 && revenue_checks > 0 && t < kLimitClosedFormS,
         "closed-form cost and saturated revenue match pro-rata allocation",
         fmt("%.0f cost and %.0f revenue comparisons, worst rel err %.2g", cost_checks, revenue_checks, worst) +
             fmt(", %.0f violations, %.2f s", bad, t));
}

void criterion3(const DefaultYear& y) {
  Stopwatch sw;
  double worst = 0.0;
  std::string where = "none";
  for (const ScenarioLabel& label : all_scenario_labels()) {
    const ScenarioOutcome o = run_scenario(y.neighborhood, label, y.config.prices, y.spot);
    const BalanceReport r = check_balances(o.market, o.ledger);
    if (r.worst_relative_error > worst) {
      worst = r.worst_relative_error;
      where = label.name() + " " + r.worst_check + " t=" + std::to_string(r.worst_t);
    }
  }
  const double t = sw.seconds();
  const bool sized = y.neighborhood.size() == 10 && y.neighborhood.horizon() == 8760;
  report(3, sized && worst <= kConservationRelTol && t < kLimitConservationS,
         "conservation on a full synthetic year, 10 participants, every hour",
         fmt("worst rel err %.2g, %.2f s", worst, t) + " (" + where + ")");
}

void criterion4(const DefaultYear& y) {
  Stopwatch sw;
  std::vector<ScenarioOutcome> outcomes;
  for (const ScenarioLabel& label : all_scenario_labels())
    outcomes.push_back(run_scenario(y.neighborhood, label, y.config.prices, y.spot));
  const double t = sw.seconds();
  bool all = t < kLimitScenariosS;
  std::string detail;
  for (ThresholdMode mode : {ThresholdMode::Fixed, ThresholdMode::Dynamic}) {
    const auto& bf = find(outcomes, Scheme::BaseFiT, mode).summary;
    const auto& ba = find(outcomes, Scheme::BaseAuction, mode).summary;
    const auto& fit = find(outcomes, Scheme::FiT, mode).summary;
    const auto& lc = find(outcomes, Scheme::Lcoe, mode).summary;
    const bool cost = lc.consumer_cost < fit.consumer_cost && fit.consumer_cost < bf.consumer_cost &&
                      fit.consumer_cost < ba.consumer_cost;
    const bool revenue = fit.prosumer_revenue > bf.prosumer_revenue && bf.prosumer_revenue > lc.prosumer_revenue &&
                         lc.prosumer_revenue > ba.prosumer_revenue;
    const bool net = lc.net_cost > fit.net_cost && lc.net_cost < ba.net_cost;
    all = all && cost && revenue && net;
    detail += std::string(to_string(mode)) + ": cost " + (cost ? "ok" : "BAD") + ", revenue " +
              (revenue ? "ok" : "BAD") + ", net " + (net ? "ok" : "BAD") +
              fmt(" (dFiT cost %+.1f%%, revenue %+.1f%%, net %+.1f%%", *percent_delta(lc.consumer_cost, fit.consumer_cost),
                  *percent_delta(lc.prosumer_revenue, fit.prosumer_revenue), *percent_delta(lc.net_cost, fit.net_cost)) +
              fmt("; dAuction cost %+.1f%%, revenue %+.1f%%, net %+.1f%%); ",
                  *percent_delta(lc.consumer_cost, ba.consumer_cost),
                  *percent_delta(lc.prosumer_revenue, ba.prosumer_revenue), *percent_delta(lc.net_cost, ba.net_cost));
  }
  report(4, all, "scenario orderings and delta signs, fixed and dynamic", detail + fmt("%.2f s", t));
}

void criterion5(const DefaultYear& y) {
  using namespace std::chrono;
  bool ok = true;
  std::string detail;
  for (ThresholdMode mode : {ThresholdMode::Fixed, ThresholdMode::Dynamic}) {
    for (Scheme scheme : {Scheme::FiT, Scheme::Lcoe}) {
      const ScenarioOutcome o = run_scenario(y.neighborhood, {scheme, mode}, y.config.prices, y.spot);
      std::size_t active = 0;
      for (const MarketResult& mr : o.market) active += mr.regime != Regime::Inactive;
      const double share = static_cast<double>(active) / static_cast<double>(o.market.size());
      const auto stats = daily_monthly_stats(o.prices);
      const double jan = stats.find(2019y / January)->mean_of_daily;
      const double jul = stats.find(2019y / July)->mean_of_daily;
      const bool here = std::abs(share - kActiveShareCentre) <= kActiveShareBand && jul < jan;
      ok = ok && here;
      detail += o.label.name() + fmt(" active %.1f%%, Jan %.2f, Jul %.2f; ", 100 * share, jan, jul);
    }
  }
  report(5, ok, "market active 50% +/- 15 pp of hours, July mean below January", detail);
}

void criterion6(const DefaultYear& y) {
  const SweepConfig& sc = y.config.sweep.value();
  SweepSpec spec;
  spec.tracked_consumer = sc.tracked_consumer;
  spec.tracked_prosumer = sc.tracked_prosumer;
  spec.added_pv_kwp = sc.pv_capacity_kwp;
  spec.added_pv_per_kwp =
      synth_pv(derive_seed(y.config.seed, sc.pv_seed), 1.0, y.neighborhood.horizon(), y.neighborhood.start());
  const int last = static_cast<int>(y.neighborhood.size()) - 1;
  for (int c = 1; c <= last; ++c) spec.prosumer_counts.push_back(c);
  for (const ScenarioLabel& l : all_scenario_labels())
    if (!l.is_base()) spec.scenarios.push_back(l);
  const auto points = sensitivity_sweep(y.neighborhood, spec, y.config.prices, y.spot, threads_from_env());
  const Neighborhood full = neighborhood_with_prosumers(y.neighborhood, spec, last);
  const std::size_t tracked = *full.index_of(spec.tracked_prosumer);

  bool ok = true;
  std::string detail;
  for (const ScenarioLabel& l : spec.scenarios) {
    std::vector<SweepPoint> series;
    for (const SweepPoint& p : points)
      if (p.scenario == l) series.push_back(p);
    const Scheme base_scheme = l.scheme == Scheme::FiT ? Scheme::BaseFiT : Scheme::BaseAuction;
    const double base = run_scenario(full, {base_scheme, l.mode}, y.config.prices, y.spot)
                            .ledger.totals(tracked)
                            .revenue;
    const double gap = std::abs(series.back().tracked_prosumer_revenue - base) / base;
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < series.size(); ++k) {
      const double prev = series[k - 1].tracked_consumer_net_cost, cur = series[k].tracked_consumer_net_cost;
      worst_rise = std::max(worst_rise, (cur - prev) / std::abs(prev));
    }
    const bool here = gap <= kConvergenceRelTol && worst_rise <= kMonotoneNoise;
    ok = ok && here;
    detail += l.name() + fmt(" gap %.2f%%, worst consumer rise %+.3f%%; ", 100 * gap, 100 * worst_rise);
  }
  report(6, ok, "sweep: prosumer revenue converges to base, consumer cost non-increasing", detail);
}

void criterion7(const DefaultYear& y) {
  const ScenarioOutcome o = run_scenario(y.neighborhood, {Scheme::Lcoe, ThresholdMode::Fixed}, y.config.prices, y.spot);
  const std::vector<double> curve = duration_curve(o.prices.values());
  const bool monotone = std::is_sorted(curve.rbegin(), curve.rend());
  const std::size_t top = static_cast<std::size_t>(std::count(curve.begin(), curve.end(), 30.46));
  const std::size_t bottom = static_cast<std::size_t>(std::count(curve.begin(), curve.end(), 5.0));
  const bool ok = monotone && curve.front() == 30.46 && curve.back() == 5.0 && top > 1 && bottom > 1;
  report(7, ok, "fixed-LCOE duration curve non-increasing with plateaus at 30.46 and 5",
         fmt("max %.17g, min %.17g", curve.front(), curve.back()) + fmt(", %.0f h at top, %.0f h at bottom", top, bottom));
}

void criterion8() {
  const double eight = lcoe(800.0, FinancialParams::flat(1, 0.0, 0.0, 100'000.0));
  const double zero = lcoe(0.0, FinancialParams::flat(25, 0.04, 0.0, 5000.0));
  const double n25 = lcoe(5500.0, FinancialParams::flat(25, 0.04, 55.0, 5000.0));
  const double n25_oracle =
      oracle::lcoe(5500.0, 25, 0.04, std::vector<double>(25, 55.0), std::vector<double>(25, 5000.0));
  bool ok = std::abs(eight - 8.0) <= kLcoeRelTol * 8.0 && zero == 0.0 && oracle::rel(n25, n25_oracle) <= kLcoeRelTol;

  oracle::Gen g(808);
  int bad = 0;
  for (int k = 0; k < kLcoeDraws; ++k) {
    const int years = g.integer(1, 40);
    const double wacc = g.uniform(0, 0.15), i0 = g.uniform(0, 30000), opex = g.uniform(0, 500);
    const double energy = g.uniform(10, 20000), scale = g.uniform(0.01, 100);
    const double base = lcoe(i0, FinancialParams::flat(years, wacc, opex, energy));
    const double scaled = lcoe(scale * i0, FinancialParams::flat(years, wacc, scale * opex, energy));
    const double more = lcoe(i0, FinancialParams::flat(years, wacc, opex, energy * (1.0 + g.uniform(1e-3, 3))));
    bad += oracle::rel(scaled, scale * base) > kLcoeRelTol || more > base;
  }
  ok = ok && bad == 0;
  report(8, ok, "LCOE examples, homogeneity and antitonicity",
         fmt("single-year %.17g, N=25 %.10g vs oracle %.10g", eight, n25, n25_oracle) +
             fmt(", %.0f property violations in 1e3 draws", bad));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion9() {
  const fs::path root = fs::temp_directory_path() / "lemsim_acceptance";
  fs::remove_all(root);
  RunOptions a;
  a.out_dir = root / "a";
  a.threads = 1;
  RunOptions b;
  b.out_dir = root / "b";
  b.threads = std::max(2u, threads_from_env());
  const RunResult ra = run_config_file(LEMSIM_DEFAULT_CONFIG, a);
  const RunResult rb = run_config_file(LEMSIM_DEFAULT_CONFIG, b);
  std::size_t same = 0;
  for (const std::string& f : ra.files) same += slurp(root / "a" / f) == slurp(root / "b" / f);
  const bool ok = ra.files == rb.files && same == ra.files.size() && !ra.files.empty();
  report(9, ok, "default pipeline reruns are byte-identical",
         fmt("%.0f of %.0f files identical", same, ra.files.size()));
  fs::remove_all(root);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  const DefaultYear year = default_year();
  criterion3(year);
  criterion4(year);
  criterion5(year);
  criterion6(year);
  criterion7(year);
  criterion8();
  criterion9();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
