#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ftsp/cli.hpp"
#include "ftsp/curves.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = ftsp::cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ftsp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::string simulate(long n = 120, long grid = 64) {
    const std::string file = path("curves.csv");
    const Outcome o = call({"simulate", "--kind", "far", "--orders", "1", "--kappa", "0.8", "--sigma", "s1", "--dim",
                            "5", "--n", std::to_string(n), "--grid", std::to_string(grid), "--seed", "7", "--out",
                            file});
    EXPECT_EQ(o.code, 0) << o.err;
    return file;
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateShape) {
  const std::string file = path("c.csv");
  const Outcome o = call({"simulate", "--kind", "far", "--orders", "1", "--kappa", "0.8", "--sigma", "s1", "--dim",
                          "21", "--n", "200", "--seed", "7", "--grid", "256", "--out", file});
  ASSERT_EQ(o.code, 0) << o.err;
  const ftsp::FunctionalDataset data = ftsp::read_curves_csv(file);
  EXPECT_EQ(data.size(), 200);
  EXPECT_EQ(data.grid().size(), 256);
}

TEST_F(CliTest, SimulateIsSeedDeterministic) {
  const std::string a = path("a.csv"), b = path("b.csv");
  for (const auto& file : {a, b})
    ASSERT_EQ(call({"simulate", "--kind", "farma", "--n", "30", "--dim", "5", "--grid", "64", "--seed", "3", "--out",
                    file})
                  .code,
              0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, SpecRoundTrip) {
  const std::string spec = path("spec.json"), a = path("a.csv"), b = path("b.csv");
  ASSERT_EQ(call({"simulate", "--kind", "fma", "--operator", "psi1", "--n", "20", "--grid", "32", "--seed", "4",
                  "--spec-out", spec, "--out", a})
                .code,
            0);
  ASSERT_EQ(call({"simulate", "--spec", spec, "--n", "20", "--grid", "32", "--seed", "4", "--out", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, SelectWritesTableAndSummary) {
  const std::string curves = simulate();
  const std::string table = path("table.csv");
  const Outcome o = call({"select", "--input", curves, "--pmax", "3", "--dmax", "4", "--out", table});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.err.find("selected p="), std::string::npos);
  std::istringstream in(slurp(table));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p,d,trace,tail,ffpe,status");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 16);
}

TEST_F(CliTest, ForecastMethods) {
  const std::string curves = simulate();
  for (const std::string method : {"ffpe", "fixed", "bosq", "scalar", "innovations"}) {
    const Outcome o = call({"forecast", "--input", curves, "--method", method, "--p", "1", "--d", "3"});
    ASSERT_EQ(o.code, 0) << method << ": " << o.err;
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j.at("curve").size(), 64u) << method;
  }
  const Outcome two = call({"forecast", "--input", curves, "--method", "fixed", "--horizon", "3"});
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_EQ(nlohmann::json::parse(two.out).at("path_curves").size(), 3u);
  const Outcome bad = call({"forecast", "--input", curves, "--method", "bosq", "--horizon", "2"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.err.rfind("error kind=unsupported", 0), 0u) << bad.err;
}

TEST_F(CliTest, ForecastWithCovariate) {
  const std::string response = path("y.csv"), covariate = path("x.csv");
  ASSERT_EQ(call({"simulate", "--kind", "covariate", "--n", "100", "--grid", "48", "--seed", "2", "--out", response,
                  "--covariate-out", covariate})
                .code,
            0);
  const std::string curve = path("pred.csv");
  const Outcome o = call({"forecast", "--input", response, "--method", "covariate", "--covariate", covariate,
                          "--curve-out", curve});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(ftsp::read_curves_csv(curve).size(), 1);
}

TEST_F(CliTest, BandsReportCoverage) {
  const std::string curves = simulate(200);
  const std::string band = path("band.csv"), fc = path("fc.csv");
  const Outcome o = call({"bands", "--input", curves, "--p", "1", "--d", "3", "--alpha", "0.8", "--out", band,
                          "--forecast-out", fc});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(slurp(band).rfind("t,gamma,lower_offset,upper_offset", 0), 0u);
  std::istringstream in(slurp(fc));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,forecast,lower,upper");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 64);
}

TEST_F(CliTest, IngestThenForecastOnAnalog) {
  const std::string raw = path("pm10.csv"), curves = path("curves.csv");
  ASSERT_EQ(call({"simulate", "--kind", "pm10", "--n", "120", "--seed", "5", "--out", raw}).code, 0);
  const Outcome ing = call({"ingest", "--input", raw, "--rows-per-curve", "48", "--sqrt", "--weekday-column",
                            "weekday", "--out", curves});
  ASSERT_EQ(ing.code, 0) << ing.err;
  const ftsp::FunctionalDataset data = ftsp::read_curves_csv(curves);
  EXPECT_EQ(data.size(), 120);
  EXPECT_EQ(data.grid().size(), 48);
  const Outcome fc = call({"forecast", "--input", curves, "--method", "ffpe", "--pmax", "3", "--dmax", "5"});
  ASSERT_EQ(fc.code, 0) << fc.err;
}

TEST_F(CliTest, BenchmarkDeterministic) {
  const std::string a = path("a.json"), b = path("b.json");
  for (const auto& file : {a, b}) {
    const Outcome o = call({"benchmark", "--preset", "psi1-ratio", "--reps", "4", "--seed", "1", "--out", file});
    ASSERT_EQ(o.code, 0) << o.err;
  }
  auto ja = nlohmann::json::parse(slurp(a)), jb = nlohmann::json::parse(slurp(b));
  EXPECT_EQ(ja.at("replications").size(), 4u);
  EXPECT_EQ(ja.at("replications").dump(), jb.at("replications").dump());
  EXPECT_TRUE(ja.at("aggregates").contains("ratio_median"));
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(call({}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  const Outcome noseed = call({"simulate", "--n", "10"});
  EXPECT_EQ(noseed.code, 2);
  EXPECT_EQ(noseed.err.rfind("error kind=usage", 0), 0u);
  EXPECT_EQ(call({"benchmark", "--preset", "nope", "--seed", "1"}).code, 2);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  const Outcome missing = call({"forecast", "--input", path("absent.csv")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error kind=io", 0), 0u) << missing.err;
  std::ofstream(path("bad.csv")) << "1,2,3\n4,5\n";
  EXPECT_EQ(call({"select", "--input", path("bad.csv")}).code, 1);
}

TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = FTSP_BINARY;
  const std::string quiet = " >" + path("o.txt") + " 2>" + path("e.txt");
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + quiet).c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("--help"), 0);
  EXPECT_EQ(status("simulate --n 5 --grid 16 --dim 2 --seed 1"), 0);
  EXPECT_EQ(status("simulate --n 5"), 2);
  EXPECT_EQ(status("select --input " + path("none.csv")), 1);
  EXPECT_EQ(slurp(path("e.txt")).rfind("error kind=io", 0), 0u);
}

}  // namespace
