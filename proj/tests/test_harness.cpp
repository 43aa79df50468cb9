#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "vortex/errors.hpp"
#include "vortex/harness.hpp"

using namespace vortex;
using namespace vortex::harness;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vortex_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VORTEX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

SweepConfig small_sweep(int workers) {
  SweepConfig cfg;
  cfg.omegas = {0.15, 0.155, 0.16, 0.165};
  cfg.grid = profiles::RadialGrid(160, 40.0);
  cfg.ledger.spectrum.k_max = 2;
  cfg.ledger.h12_budget = 20000;
  cfg.chains = 2;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST(Config, DefaultsResolveAndValidate) {
  const Json cfg = resolve_config(Json::object());
  EXPECT_EQ(cfg["grid"]["n"], 500);
  EXPECT_EQ(cfg["grid"]["r_max"], 50.0);
  EXPECT_EQ(cfg["profile"]["omega"], 0.15);
  validate_config(cfg);
}

TEST(Config, UnknownKeyNamesItsPath) {
  try {
    resolve_config(parse_config_text(R"({"fgr": {"model2": {"modes": [{"lambda": 0.5, "s": 1}, {"lamda": 0.4}]}}})"));
    FAIL() << "expected ConfigError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_NE(std::string(e.what()).find("fgr.model2.modes[1].lamda"), std::string::npos) << e.what();
  }
}

TEST(Config, TypeMismatchIsRejected) {
  EXPECT_THROW(resolve_config(parse_config_text(R"({"grid": {"n": 1.5}})")), Error);
  EXPECT_THROW(resolve_config(parse_config_text(R"({"profile": {"omega": "fast"}})")), Error);
  EXPECT_THROW(parse_config_text("{ not json"), Error);
}

TEST(Config, SerializationRoundTrips) {
  const Json cfg = resolve_config(parse_config_text(R"({"grid": {"n": 300}, "profile": {"omega": 0.1234567890123}})"));
  const std::string text = serialize_config(cfg);
  const Json again = resolve_config(parse_config_text(text));
  EXPECT_EQ(serialize_config(again), text);
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  EXPECT_EQ(config_hash(cfg).size(), 16u);
  const Json other = resolve_config(parse_config_text(R"({"grid": {"n": 301}})"));
  EXPECT_NE(config_hash(other), config_hash(cfg));
}

TEST(Config, KeyOrderDoesNotChangeHash) {
  const Json a = resolve_config(parse_config_text(R"({"grid": {"n": 300, "r_max": 40}})"));
  const Json b = resolve_config(parse_config_text(R"({"grid": {"r_max": 40, "n": 300}})"));
  EXPECT_EQ(config_hash(a), config_hash(b));
}

TEST(Config, DumpWritesNonFiniteAsNull) {
  Json j = {{"x", std::numeric_limits<double>::quiet_NaN()}, {"y", 0.1}};
  const std::string s = dump_json(j);
  EXPECT_NE(s.find("null"), std::string::npos);
  EXPECT_EQ(parse_config_text(s)["y"].get<double>(), 0.1);
}

TEST(Config, BuildersFollowTheTree) {
  const Json cfg = resolve_config(parse_config_text(R"({"grid": {"n": 321, "r_max": 33}, "potential": {"kind": "gaussian_well", "epsilon": 0.01}})"));
  const auto grid = grid_from_config(cfg);
  EXPECT_EQ(grid.n(), 321u);
  EXPECT_DOUBLE_EQ(grid.r_max(), 33.0);
  const auto m2 = model2_from_config(cfg);
  EXPECT_EQ(m2.modes.size(), 2u);
  EXPECT_EQ(m2.z0.size(), 2u);
  validate(m2);
}

TEST(Sweep, WorkerCountDoesNotChangeOutput) {
  const auto a = run_sweep(small_sweep(1));
  const auto b = run_sweep(small_sweep(4));
  EXPECT_EQ(ledger_csv(a), ledger_csv(b));
  ASSERT_EQ(a.report_json.size(), b.report_json.size());
  for (std::size_t i = 0; i < a.report_json.size(); ++i) EXPECT_EQ(a.report_json[i], b.report_json[i]);
  for (const auto& s : a.status) EXPECT_EQ(s.status, "ok") << s.name << " " << s.message;
}

TEST(Sweep, FailedRowsAreReportedNotThrown) {
  auto cfg = small_sweep(2);
  cfg.omegas = {0.16, 0.25};
  cfg.chains = 2;
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.status[0].status, "ok");
  EXPECT_NE(r.status[1].status, "ok");
  EXPECT_TRUE(r.rows[1].errors.count("profile"));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("exit");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("profile --no-such-flag"), 2);
  EXPECT_EQ(run_cli("profile --set grid.nn=3 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("profile --set grid.n=2.5 --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("profile --omega 0.25 --n 200 --r-max 40 --out " + dir.string()), 3);
}

TEST(Cli, ProfileWritesArtifacts) {
  const fs::path dir = scratch_dir("profile");
  ASSERT_EQ(run_cli("profile --omega 0.16 --n 200 --r-max 40 --out " + dir.string()), 0);
  for (const char* f : {"profile.csv", "profile.json", "profile.config.json", "profile.manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const Json manifest = parse_config_text(read_file(dir / "profile.manifest.json"));
  const Json cfg = parse_config_text(read_file(dir / "profile.config.json"));
  EXPECT_EQ(manifest["config_hash"], config_hash(cfg));
  EXPECT_EQ(cfg["grid"]["n"], 200);
}

TEST(Cli, ConfigFileAndOverridesLayer) {
  const fs::path dir = scratch_dir("layer");
  std::ofstream(dir / "cfg.json") << R"({"grid": {"n": 180, "r_max": 40}, "profile": {"omega": 0.15}})";
  ASSERT_EQ(run_cli("profile --config " + (dir / "cfg.json").string() + " --set profile.omega=0.155 --n 190 --out " + dir.string()), 0);
  const Json cfg = parse_config_text(read_file(dir / "profile.config.json"));
  EXPECT_EQ(cfg["grid"]["n"], 190);
  EXPECT_EQ(cfg["grid"]["r_max"], 40.0);
  EXPECT_EQ(cfg["profile"]["omega"], 0.155);
}

TEST(Cli, SweepThenReport) {
  const fs::path dir = scratch_dir("sweep");
  ASSERT_EQ(run_cli("sweep --omega-min 0.15 --omega-max 0.16 --omega-step 0.005 --n 160 --r-max 40 --k-max 2 --chains 1 "
                    "--set ledger.h12_budget=20000 --out " + dir.string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "ledger.csv"));
  EXPECT_TRUE(fs::exists(dir / "spectrum_000.json"));
  ASSERT_EQ(run_cli("report --dir " + dir.string() + " --out " + dir.string()), 0);
  const Json summary = parse_config_text(read_file(dir / "summary.json"));
  EXPECT_EQ(summary["rows"], 3);
  EXPECT_EQ(summary["failed_rows"], 0);
}

TEST(Cli, GammaPreset) {
  const fs::path dir = scratch_dir("gamma");
  ASSERT_EQ(run_cli("gamma --samples 16 --out " + dir.string()), 0);
  const Json g = parse_config_text(read_file(dir / "gamma.json"));
  EXPECT_GT(g["h13_margin"].get<double>(), 0.0);
  EXPECT_LE(g["max_gamma"].get<double>(), 0.0);
}
