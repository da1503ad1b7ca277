#include "lemsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "lemsim/error.hpp"
#include "lemsim/numeric.hpp"
#include "lemsim/profiles.hpp"

namespace lemsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string_view item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
}

class Parser {
 public:
  Parser(ScenarioConfig& cfg, std::vector<ConfigIssue>& issues) : cfg_(cfg), issues_(issues) {}

  void apply(const std::string& section, const std::string& key, std::string_view value) {
    const std::string field = section + "." + key;
    cfg_.raw[field] = std::string(value);
    if (section == "general")
      general(field, key, value);
    else if (section == "prices")
      prices(field, key, value);
    else if (section == "finance")
      finance(field, key, value);
    else if (section == "sweep")
      sweep(field, key, value);
    else
      issue(field, "key outside a known section");
  }

  bool mode_given = false;
  ThresholdMode mode = ThresholdMode::Fixed;
  bool both_modes = false;
  bool scenarios_given = false;
  bool markup_frac_given = false;
  bool markup_additive_given = false;

 private:
  void issue(const std::string& field, std::string reason) { issues_.push_back({field, std::move(reason)}); }

  void real(const std::string& field, std::string_view v, double& out) {
    double x = 0.0;
    if (!parse_number(v, x) || !std::isfinite(x))
      issue(field, "expected a finite number, got '" + std::string(v) + "'");
    else
      out = x;
  }

  template <typename Int>
  void integer(const std::string& field, std::string_view v, Int& out) {
    Int x{};
    if (!parse_number(v, x))
      issue(field, "expected an integer, got '" + std::string(v) + "'");
    else
      out = x;
  }

  void boolean(const std::string& field, std::string_view v, bool& out) {
    if (v == "true" || v == "yes" || v == "1")
      out = true;
    else if (v == "false" || v == "no" || v == "0")
      out = false;
    else
      issue(field, "expected true or false, got '" + std::string(v) + "'");
  }

  void general(const std::string& field, const std::string& key, std::string_view v) {
    if (key == "seed") {
      integer(field, v, cfg_.seed);
    } else if (key == "horizon") {
      integer(field, v, cfg_.horizon);
    } else if (key == "output_dir") {
      cfg_.output_dir = std::string(v);
    } else if (key == "roster") {
      cfg_.roster = std::string(v);
    } else if (key == "spot") {
      cfg_.spot = std::string(v);
    } else if (key == "write_ledger") {
      boolean(field, v, cfg_.write_ledger);
    } else if (key == "mode") {
      mode_given = true;
      if (v == "fixed")
        mode = ThresholdMode::Fixed;
      else if (v == "dynamic")
        mode = ThresholdMode::Dynamic;
      else if (v == "both")
        both_modes = true;
      else
        issue(field, "expected fixed, dynamic or both");
    } else if (key == "scenarios") {
      scenarios_given = true;
      cfg_.scenarios.clear();
      for (const std::string& item : split_list(v)) {
        try {
          const ScenarioLabel label = ScenarioLabel::parse(item);
          if (std::find(cfg_.scenarios.begin(), cfg_.scenarios.end(), label) == cfg_.scenarios.end())
            cfg_.scenarios.push_back(label);
        } catch (const std::invalid_argument& e) {
          issue(field, e.what());
        }
      }
    } else {
      issue(field, "unknown key");
    }
  }

  void prices(const std::string& field, const std::string& key, std::string_view v) {
    PriceConstants& p = cfg_.prices;
    if (key == "p_fixed_upper") {
      real(field, v, p.p_fixed_upper);
    } else if (key == "fit") {
      real(field, v, p.fit);
    } else if (key == "lcoe") {
      real(field, v, p.lcoe);
    } else if (key == "p_lower_auction") {
      real(field, v, p.p_lower_auction);
    } else if (key == "markup_frac") {
      markup_frac_given = true;
      real(field, v, p.markup);
      p.markup_kind = MarkupKind::Proportional;
    } else if (key == "markup_additive") {
      markup_additive_given = true;
      real(field, v, p.markup);
      p.markup_kind = MarkupKind::Additive;
    } else {
      issue(field, "unknown key");
    }
  }

  void finance(const std::string& field, const std::string& key, std::string_view v) {
    FinanceConfig& f = cfg_.finance.value();
    if (key == "compute_lcoe") {
      boolean(field, v, f.compute_lcoe);
    } else if (key == "equipment_per_kwp") {
      real(field, v, f.costs.equipment_per_kwp);
    } else if (key == "direct_labor_per_kwp") {
      real(field, v, f.costs.direct_labor_per_kwp);
    } else if (key == "indirect_labor_per_kwp") {
      real(field, v, f.costs.indirect_labor_per_kwp);
    } else if (key == "permitting_per_kwp") {
      real(field, v, f.costs.permitting_per_kwp);
    } else if (key == "overhead_per_kwp") {
      real(field, v, f.costs.overhead_per_kwp);
    } else if (key == "lifetime_years") {
      integer(field, v, f.lifetime_years);
    } else if (key == "wacc") {
      real(field, v, f.wacc);
    } else if (key == "annual_opex_eur") {
      double x = 0.0;
      real(field, v, x);
      f.annual_opex_eur = x;
    } else if (key == "annual_energy_kwh") {
      double x = 0.0;
      real(field, v, x);
      f.annual_energy_kwh = x;
    } else {
      issue(field, "unknown key");
    }
  }

  void sweep(const std::string& field, const std::string& key, std::string_view v) {
    SweepConfig& s = cfg_.sweep.value();
    if (key == "counts") {
      s.counts.clear();
      for (const std::string& item : split_list(v)) {
        const std::size_t dash = item.find('-');
        const std::string_view text(item);
        int lo = 0, hi = 0;
        bool ok = false;
        if (dash == std::string::npos) {
          ok = parse_number(text, lo);
          hi = lo;
        } else {
          ok = parse_number(trim(text.substr(0, dash)), lo) && parse_number(trim(text.substr(dash + 1)), hi);
        }
        if (!ok || hi < lo) {
          issue(field, "expected counts like '1-9' or '1,3,5', got '" + item + "'");
          continue;
        }
        for (int c = lo; c <= hi; ++c) s.counts.push_back(c);
      }
    } else if (key == "tracked_consumer") {
      s.tracked_consumer = std::string(v);
    } else if (key == "tracked_prosumer") {
      s.tracked_prosumer = std::string(v);
    } else if (key == "pv_capacity_kwp") {
      real(field, v, s.pv_capacity_kwp);
    } else if (key == "pv_seed") {
      integer(field, v, s.pv_seed);
    } else {
      issue(field, "unknown key");
    }
  }

  ScenarioConfig& cfg_;
  std::vector<ConfigIssue>& issues_;
};

}  // namespace

bool ScenarioConfig::has_dynamic() const {
  return std::any_of(scenarios.begin(), scenarios.end(),
                     [](const ScenarioLabel& l) { return l.mode == ThresholdMode::Dynamic; });
}

ParsedConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  ParsedConfig parsed;
  parsed.config.base_dir = base_dir;
  Parser parser(parsed.config, parsed.issues);

  const std::vector<std::string> sections{"general", "prices", "finance", "sweep"};
  std::string section = "general";
  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    if (line_no == 1 && raw_line.rfind("\xEF\xBB\xBF", 0) == 0) raw_line.erase(0, 3);
    const std::string_view line = trim(raw_line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        parsed.issues.push_back({where, "unterminated section header"});
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        parsed.issues.push_back({where, "unknown section [" + section + "]"});
      if (section == "finance" && !parsed.config.finance) parsed.config.finance.emplace();
      if (section == "sweep" && !parsed.config.sweep) parsed.config.sweep.emplace();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      parsed.issues.push_back({where, "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      parsed.issues.push_back({where, "missing key"});
      continue;
    }
    if (std::find(sections.begin(), sections.end(), section) == sections.end()) continue;
    parser.apply(section, key, value);
  }

  ScenarioConfig& cfg = parsed.config;
  if (parser.markup_frac_given && parser.markup_additive_given)
    parsed.issues.push_back({"prices.markup_additive", "give either markup_frac or markup_additive, not both"});
  if (!parser.scenarios_given) {
    cfg.scenarios = parser.both_modes ? all_scenario_labels() : scenario_labels_for(parser.mode);
  } else if (parser.mode_given && !parser.both_modes) {
    for (const ScenarioLabel& l : cfg.scenarios)
      if (l.mode != parser.mode)
        parsed.issues.push_back({"general.scenarios", l.name() + " conflicts with general.mode = " +
                                                          std::string(to_string(parser.mode))});
  }
  return parsed;
}

ParsedConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path());
}

std::vector<ConfigIssue> validate_config(const ScenarioConfig& cfg) {
  std::vector<ConfigIssue> issues;
  auto issue = [&](std::string field, std::string reason) { issues.push_back({std::move(field), std::move(reason)}); };
  auto non_negative = [&](const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0) issue(field, "must be finite and >= 0, got " + format_double(v));
  };

  const PriceConstants& p = cfg.prices;
  non_negative("prices.p_fixed_upper", p.p_fixed_upper);
  non_negative("prices.fit", p.fit);
  non_negative("prices.lcoe", p.lcoe);
  non_negative("prices.p_lower_auction", p.p_lower_auction);
  non_negative(p.markup_kind == MarkupKind::Proportional ? "prices.markup_frac" : "prices.markup_additive", p.markup);

  if (cfg.scenarios.empty()) issue("general.scenarios", "no scenario selected");
  if (cfg.horizon < 24) issue("general.horizon", "must be at least 24 hours");
  if (cfg.output_dir.empty()) issue("general.output_dir", "must not be empty");

  const bool compute_lcoe = cfg.finance && cfg.finance->compute_lcoe;
  for (const ScenarioLabel& l : cfg.scenarios) {
    if (l.mode != ThresholdMode::Fixed || l.is_base()) continue;
    if (l.scheme == Scheme::FiT && !(p.fit <= p.p_fixed_upper))
      issue("prices.fit", "stability criterion p_L <= FiT <= p_U violated for " + l.name() + " (" +
                              format_double(p.fit) + " > " + format_double(p.p_fixed_upper) + ")");
    if (l.scheme == Scheme::Lcoe && !compute_lcoe &&
        !(p.p_lower_auction <= p.lcoe && p.lcoe <= p.p_fixed_upper))
      issue("prices.lcoe", "stability criterion p_L <= LCOE <= p_U violated for " + l.name() + " (" +
                               format_double(p.p_lower_auction) + ", " + format_double(p.lcoe) + ", " +
                               format_double(p.p_fixed_upper) + ")");
  }

  auto resolve = [&](const std::string& s) {
    std::filesystem::path path(s);
    return path.is_absolute() ? path : cfg.base_dir / path;
  };
  if (cfg.has_dynamic() && (!cfg.spot || cfg.spot->empty()))
    issue("general.spot", "required when a Dynamic scenario is selected");
  if (cfg.spot && !cfg.spot->empty()) {
    try {
      if (!parse_synth_token(*cfg.spot) && !std::filesystem::is_regular_file(resolve(*cfg.spot)))
        issue("general.spot", "file not found: " + resolve(*cfg.spot).string());
    } catch (const InputError& e) {
      issue("general.spot", e.what());
    }
  }
  if (cfg.roster && !std::filesystem::is_regular_file(resolve(*cfg.roster)))
    issue("general.roster", "file not found: " + resolve(*cfg.roster).string());

  if (cfg.finance) {
    const FinanceConfig& f = *cfg.finance;
    try {
      f.costs.validate();
    } catch (const std::invalid_argument& e) {
      issue("finance", e.what());
    }
    if (f.lifetime_years < 1) issue("finance.lifetime_years", "must be >= 1");
    if (!(f.wacc >= 0.0)) issue("finance.wacc", "must be >= 0");
    if (f.annual_energy_kwh && !(*f.annual_energy_kwh > 0.0)) issue("finance.annual_energy_kwh", "must be > 0");
  }

  if (cfg.sweep) {
    const SweepConfig& s = *cfg.sweep;
    if (s.tracked_consumer == s.tracked_prosumer)
      issue("sweep.tracked_consumer", "must differ from sweep.tracked_prosumer");
    for (int c : s.counts)
      if (c < 1) issue("sweep.counts", "prosumer counts must be >= 1");
    if (!(s.pv_capacity_kwp > 0.0)) issue("sweep.pv_capacity_kwp", "must be > 0");
  }
  return issues;
}

std::vector<ConfigIssue> validate_config_file(const std::filesystem::path& path) {
  ParsedConfig parsed = parse_config_file(path);
  std::vector<ConfigIssue> issues = std::move(parsed.issues);
  const std::vector<ConfigIssue> semantic = validate_config(parsed.config);
  issues.insert(issues.end(), semantic.begin(), semantic.end());
  return issues;
}

std::string format_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const ConfigIssue& i : issues) out += i.field + ": " + i.reason + "\n";
  return out;
}

}  // namespace lemsim
