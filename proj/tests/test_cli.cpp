#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "hoflow/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hoflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = hoflow::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> last_csv_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  std::vector<std::string> cells;
  std::istringstream row(last);
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  return cells;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("hoflow_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, SimulateSu2ReportsSingularity) {
  TempDir tmp;
  const auto out = (tmp.path() / "su2.csv").string();
  const auto r = run_cli({"simulate", "--class", "su2", "--init", "7,5,3", "--alpha", "1", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(manifest["terminal"], "singular");
  EXPECT_NEAR(manifest["singularity"]["t_s"].get<double>(), 0.702, 0.035);
  EXPECT_EQ(manifest["singularity"]["degeneracy"], "pointlike");
  EXPECT_TRUE(manifest.contains("timestamp"));
  EXPECT_TRUE(manifest.contains("wall_time_s"));
  const std::string data = slurp(out);
  EXPECT_EQ(data.rfind("t,A,B,C,scal,rc_norm_sq\n", 0), 0u);
}

TEST(Cli, SimulateSolSpecialFinalRow) {
  const auto r = run_cli({"simulate", "--system", "sol-special", "--init", "2,1", "--alpha", "0", "--tmax", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,A,B,scal,rc_norm_sq");
  const auto cells = last_csv_row(r.out);
  ASSERT_GE(cells.size(), 3u);
  EXPECT_DOUBLE_EQ(std::stod(cells[0]), 1.0);
  EXPECT_DOUBLE_EQ(std::stod(cells[1]), 2.0);
  EXPECT_NEAR(std::stod(cells[2]), 17.0, 1e-10);
}

TEST(Cli, ReducedSystemWithoutEmbeddingOmitsCurvature) {
  const auto r = run_cli({"simulate", "--system", "nil-xi", "--init", "1", "--tmax", "0.5", "--samples", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "t,xi\n0,1\n0.25,4\n0.5,7\n");
}

TEST(Cli, InvalidInitNamesComponent) {
  const auto r = run_cli({"simulate", "--class", "su2", "--init", "7,-5,3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("B"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("-5"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run_cli({"simulate", "--class", "bianchi", "--init", "1,1,1"}).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--class", "su2", "--init", "1,1"}).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--class", "su2", "--init", "1,1,1", "--format", "xml"}).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--class", "su2", "--init", "1,1,1", "--samples", "5", "--times", "0,0.1"}).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--class", "su2", "--init", "1,1,1", "--direction", "sideways"}).code, 1);
  EXPECT_EQ(run_cli({"simulate", "--bogus"}).code, 1);
  EXPECT_EQ(run_cli({}).code, 1);
}

TEST(Cli, PhaseGridTooSmall) {
  TempDir tmp;
  const auto r = run_cli({"phase", "--system", "berger", "--alpha", "-1", "--box", "0,3,0,5", "--grid", "1", "--out",
                          tmp.path().string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, PhaseWritesSeedsAndIndex) {
  TempDir tmp;
  const auto r = run_cli({"phase", "--system", "berger", "--alpha", "-1", "--box", "0,3,0,5", "--grid", "3", "--tmax",
                          "100", "--samples", "20", "--out", tmp.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_TRUE(fs::exists(tmp.path() / ("seed_" + std::to_string(i) + "_" + std::to_string(j) + ".csv")));
    }
  }
  const auto index = nlohmann::json::parse(slurp(tmp.path() / "index.json"));
  EXPECT_EQ(index["fixed_points"].size(), 3u);
  EXPECT_EQ(index["seeds"].size(), 9u);
  EXPECT_TRUE(index["basins"].contains("fixed:(1.77778,1.33333)"));
  EXPECT_TRUE(index["basins"].contains("fixed:(0,4)"));
  EXPECT_FALSE(index["critical_curve"]["points"].empty());
}

TEST(Cli, PhaseNeedsTwoVariableSystem) {
  TempDir tmp;
  EXPECT_EQ(run_cli({"phase", "--class", "su2", "--box", "0,1,0,1", "--out", tmp.path().string()}).code, 1);
}

TEST(Cli, FixedPointsJson) {
  const auto r = run_cli({"fixed-points", "--system", "sl2r-special", "--alpha", "1", "--box", "0,6,0,3", "--format",
                          "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("fixed_points"));
  ASSERT_EQ(j["fixed_points"].size(), 1u);
}

TEST(Cli, FixedPointsCsv) {
  const auto r = run_cli({"fixed-points", "--system", "berger", "--alpha", "-1", "--box", "0,3,0,5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 3);
}

TEST(Cli, CurvatureSeries) {
  const auto r = run_cli({"curvature", "--class", "nil", "--init", "7,5,3", "--tmax", "1", "--samples", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("scal"), std::string::npos);
  EXPECT_NE(r.out.find("max_pairwise_gap"), std::string::npos);
}

TEST(Cli, VerifyFixedPointsPasses) {
  const auto r = run_cli({"verify", "--suite", "fixed-points"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& c : j["cases"]) {
    for (const char* k : {"suite", "case", "expected", "got", "tol", "pass"}) EXPECT_TRUE(c.contains(k)) << k;
  }
}

TEST(Cli, VerifySingularityTableReportsFailure) {
  const auto r = run_cli({"verify", "--suite", "singularity-table"});
  EXPECT_EQ(r.code, 3);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(Cli, VerifyUnknownSuite) { EXPECT_EQ(run_cli({"verify", "--suite", "nope"}).code, 1); }

TEST(Cli, ScalingCheck) {
  const auto r = run_cli({"scaling-check", "--class", "su2", "--init", "7,5,3", "--alpha", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["results"].size(), 3u);
  EXPECT_EQ(run_cli({"scaling-check", "--class", "su2", "--init", "7,5,3", "--alpha", "1", "--tmax", "5"}).code, 2);
}

TEST(Cli, ConfigFileAppliedAndOverridden) {
  TempDir tmp;
  const auto cfg = tmp.path() / "run.cfg";
  std::ofstream(cfg) << "system=sol-special\ninit=2,1\nalpha=0\ntmax=1\nsamples=3\n";
  const auto a = run_cli({"simulate", "--config", cfg.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NEAR(std::stod(last_csv_row(a.out)[2]), 17.0, 1e-10);
  const auto b = run_cli({"simulate", "--config", cfg.string(), "--tmax", "2"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NEAR(std::stod(last_csv_row(b.out)[2]), 33.0, 1e-10);
  EXPECT_EQ(run_cli({"simulate", "--config", (tmp.path() / "missing.cfg").string()}).code, 1);
}

TEST(Cli, OutputIsByteIdentical) {
  TempDir tmp;
  const std::vector<std::string> base{"simulate", "--class", "sl2r", "--init", "7,5,3", "--alpha", "1", "--tmax", "1"};
  auto first = base, second = base;
  first.insert(first.end(), {"--out", (tmp.path() / "a.csv").string()});
  second.insert(second.end(), {"--out", (tmp.path() / "b.csv").string()});
  ASSERT_EQ(run_cli(first).code, 0);
  ASSERT_EQ(run_cli(second).code, 0);
  EXPECT_EQ(slurp(tmp.path() / "a.csv"), slurp(tmp.path() / "b.csv"));
  const std::string data = slurp(tmp.path() / "a.csv");
  EXPECT_EQ(data.find('\r'), std::string::npos);

  auto j1 = base, j2 = base;
  j1.insert(j1.end(), {"--format", "json"});
  j2.insert(j2.end(), {"--format", "json"});
  const auto ra = run_cli(j1), rb = run_cli(j2);
  EXPECT_EQ(ra.out, rb.out);
  const auto j = nlohmann::json::parse(ra.out);
  EXPECT_TRUE(j.contains("manifest"));
  EXPECT_FALSE(j["manifest"].contains("timestamp"));
  EXPECT_FALSE(j["manifest"].contains("wall_time_s"));
  EXPECT_EQ(j["trajectory"]["columns"].size(), 6u);
}

TEST(Cli, SeventeenDigitRoundTrip) {
  const auto r = run_cli({"simulate", "--class", "su2", "--init", "7,5,3", "--tmax", "0.1", "--samples", "4"});
  ASSERT_EQ(r.code, 0);
  const auto cells = last_csv_row(r.out);
  const auto traj = hoflow::integrate(hoflow::full_system(hoflow::GeometryClass::SU2, 0.0), hoflow::Triple{7, 5, 3},
                                      hoflow::Direction::forward, 0.1, {}, hoflow::OutputSpec{{}, 4});
  for (int i = 0; i < 3; ++i) EXPECT_EQ(std::stod(cells[1 + i]), traj.final_state[i]);
}

#ifdef HOFLOW_BIN
TEST(CliBinary, ExitCodes) {
  const std::string bin = HOFLOW_BIN;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("simulate --class su2 --init 7,5,3 --alpha 1"), 0);
  EXPECT_EQ(status("simulate --class su2 --init 7,-5,3"), 1);
  EXPECT_EQ(status("verify --suite fixed-points"), 0);
  EXPECT_EQ(status("verify --suite singularity-table"), 3);
  EXPECT_EQ(status("--version"), 0);
}
#endif
