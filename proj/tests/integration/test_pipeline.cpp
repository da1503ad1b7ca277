#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lemsim/error.hpp"
#include "lemsim/pipeline.hpp"
#include "oracles.hpp"

using namespace lemsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  std::ofstream(dir / "run.ini") << body;
  return dir / "run.ini";
}

RunOptions quiet_to(const fs::path& out) {
  RunOptions o;
  o.out_dir = out;
  o.threads = 2;
  return o;
}

}  // namespace

TEST(Pipeline, MinimalConfigWritesFiveFiles) {
  const auto dir = oracle::scratch_dir("minimal");
  const auto cfg = write_config(dir, "[general]\nscenarios = LCOE-Fixed\nhorizon = 240\n");
  const RunResult r = run_config_file(cfg, quiet_to(dir / "out"));
  EXPECT_EQ(r.files, (std::vector<std::string>{"daily_avg_LCOE-Fixed.csv", "duration_LCOE-Fixed.csv",
                                               "manifest.json", "selfconsumption.csv", "summary.csv"}));
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(dir / "out")) on_disk += e.is_regular_file();
  EXPECT_EQ(on_disk, 5u);
}

TEST(Pipeline, DefaultOutputDirResolvesAgainstConfig) {
  const auto dir = oracle::scratch_dir("outdir");
  const auto cfg = write_config(dir, "[general]\nscenarios = FiT-Fixed\nhorizon = 48\noutput_dir = here\n");
  RunOptions o;
  const RunResult r = run_config_file(cfg, o);
  EXPECT_EQ(r.out_dir, dir / "here");
  EXPECT_TRUE(fs::exists(dir / "here" / "summary.csv"));
}

TEST(Pipeline, DynamicWithoutSpotIsValidationError) {
  const auto dir = oracle::scratch_dir("nospot");
  const auto cfg = write_config(dir, "[general]\nmode = dynamic\nhorizon = 48\n");
  try {
    run_config_file(cfg, quiet_to(dir / "out"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("general.spot"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Pipeline, ByteIdenticalReruns) {
  const auto dir = oracle::scratch_dir("determinism");
  const auto cfg = write_config(dir,
                                "[general]\nmode = both\nspot = synth:200\nhorizon = 720\nwrite_ledger = true\n"
                                "[sweep]\ncounts = 1,3,5\n");
  RunOptions a = quiet_to(dir / "a");
  a.threads = 1;
  RunOptions b = quiet_to(dir / "b");
  b.threads = 4;
  const RunResult ra = run_config_file(cfg, a);
  const RunResult rb = run_config_file(cfg, b);
  ASSERT_EQ(ra.files, rb.files);
  EXPECT_EQ(ra.files.size(), 8u * 3 + 6);  // + summary, selfconsumption, two tables, sweep, manifest
  for (const std::string& f : ra.files) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
}

TEST(Pipeline, SeedOverrideChangesResults) {
  const auto dir = oracle::scratch_dir("seed");
  const auto cfg = write_config(dir, "[general]\nscenarios = FiT-Fixed\nhorizon = 240\n");
  RunOptions a = quiet_to(dir / "a");
  RunOptions b = quiet_to(dir / "b");
  b.seed = 99;
  const RunResult ra = run_config_file(cfg, a);
  const RunResult rb = run_config_file(cfg, b);
  EXPECT_NE(ra.outcomes[0].summary.net_cost, rb.outcomes[0].summary.net_cost);
  EXPECT_NE(slurp(dir / "a/summary.csv"), slurp(dir / "b/summary.csv"));
}

TEST(Pipeline, ScenarioFilter) {
  const auto dir = oracle::scratch_dir("filter");
  const auto cfg = write_config(dir, "[general]\nhorizon = 48\n");
  RunOptions o = quiet_to(dir / "out");
  o.only = {ScenarioLabel::parse("FiT-Fixed")};
  const RunResult r = run_config_file(cfg, o);
  ASSERT_EQ(r.outcomes.size(), 1u);
  EXPECT_EQ(r.outcomes[0].label.name(), "FiT-Fixed");
  o.only = {ScenarioLabel::parse("FiT-Dynamic")};
  EXPECT_THROW(run_config_file(cfg, o), ValidationError);
}

TEST(Pipeline, SweepRequiredForSweepCommand) {
  const auto dir = oracle::scratch_dir("needsweep");
  const auto cfg = write_config(dir, "[general]\nhorizon = 48\n");
  RunOptions o = quiet_to(dir / "out");
  o.require_sweep = true;
  EXPECT_THROW(run_config_file(cfg, o), ValidationError);
}

TEST(Pipeline, ManifestEchoesConfigAndHashesInputs) {
  const auto dir = oracle::scratch_dir("manifest");
  write_profile_csv(dir / "spot.csv", synth_spot(1, 48));
  write_profile_csv(dir / "l1.csv", synth_load(1, 3500, 48));
  write_profile_csv(dir / "g1.csv", synth_pv(1, 5, 48));
  write_roster_csv(dir / "roster.csv", {{"A", 3500, 5, "l1.csv", "g1.csv"}, {"B", 3500, 0, "synth:2", ""}});
  const std::string roster_before = slurp(dir / "roster.csv");
  const auto cfg = write_config(dir, "[general]\nroster = roster.csv\nspot = spot.csv\nscenarios = LCOE-Dynamic\n");
  const RunResult r = run_config_file(cfg, quiet_to(dir / "out"));
  const auto m = nlohmann::json::parse(slurp(dir / "out/manifest.json"));
  EXPECT_EQ(m["config"]["general.roster"], "roster.csv");
  EXPECT_EQ(m["effective"]["horizon"], 48);  // the files fix the axis
  EXPECT_EQ(m["effective"]["start"], "2019-01-01T00:00:00Z");
  EXPECT_EQ(m["inputs"]["config"], sha256_hex_of_file(cfg));
  EXPECT_EQ(m["inputs"]["roster"], sha256_hex_of_file(dir / "roster.csv"));
  EXPECT_EQ(m["inputs"]["spot"], sha256_hex_of_file(dir / "spot.csv"));
  EXPECT_EQ(m["inputs"]["profiles"]["g1.csv"], sha256_hex_of_file(dir / "g1.csv"));
  EXPECT_FALSE(m["inputs"]["profiles"].contains("synth:2"));
  EXPECT_EQ(m["outputs"]["summary.csv"], sha256_hex_of_file(dir / "out/summary.csv"));
  EXPECT_EQ(r.outcomes[0].prices.size(), 48u);
  EXPECT_EQ(slurp(dir / "roster.csv"), roster_before);
}

TEST(Pipeline, Sha256KnownVector) {
  const auto dir = oracle::scratch_dir("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_hex_of_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_THROW(sha256_hex_of_file(dir / "nope"), InputError);
}

TEST(Pipeline, ComputedLcoeReplacesConstant) {
  const auto dir = oracle::scratch_dir("finance");
  const auto cfg = write_config(dir,
                                "[general]\nscenarios = LCOE-Fixed\nhorizon = 8760\n[prices]\np_fixed_upper = 304.6\n"
                                "p_lower_auction = 50\n[finance]\ncompute_lcoe = true\n");
  const RunResult r = run_config_file(cfg, quiet_to(dir / "out"));
  EXPECT_GT(r.lcoe_used, 50.0);
  EXPECT_LT(r.lcoe_used, 150.0);
  const auto m = nlohmann::json::parse(slurp(dir / "out/manifest.json"));
  EXPECT_EQ(m["effective"]["prices"]["lcoe"].get<double>(), r.lcoe_used);

  // With the default upper price the computed value breaks the ordering.
  const auto bad = write_config(dir, "[general]\nscenarios = LCOE-Fixed\nhorizon = 48\n[finance]\ncompute_lcoe = true\n");
  EXPECT_THROW(run_config_file(bad, quiet_to(dir / "out2")), ValidationError);
}

TEST(Pipeline, BadInputsAreInputErrors) {
  const auto dir = oracle::scratch_dir("badinput");
  std::ofstream(dir / "spot.csv") << "timestamp,value\n2019-01-01T00:00Z,abc\n";
  const auto cfg = write_config(dir, "[general]\nspot = spot.csv\nscenarios = FiT-Dynamic\nhorizon = 48\n");
  EXPECT_THROW(run_config_file(cfg, quiet_to(dir / "out")), InputError);
  std::ofstream(dir / "short.csv") << "timestamp,value\n2019-01-01T00:00Z,1\n";
  const auto cfg2 = write_config(dir, "[general]\nspot = short.csv\nscenarios = FiT-Dynamic\nhorizon = 48\n");
  EXPECT_THROW(run_config_file(cfg2, quiet_to(dir / "out")), InputError);
}
