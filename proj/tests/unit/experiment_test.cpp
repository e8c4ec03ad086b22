#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ftsp/experiment.hpp"

namespace ftsp {
namespace {

TEST(Summarize, Values) {
  const ErrorSummary s = summarize({1.0, 4.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(s.mse, 2.5);
  EXPECT_DOUBLE_EQ(s.medse, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
}

TEST(Experiment, NoiselessRotationHasZeroError) {
  const Grid grid(32);
  const FourierBasis basis = make_fourier_basis(3, grid);
  const double c = std::cos(M_PI / 5), s = std::sin(M_PI / 5);
  Matrix coeffs = Matrix::Zero(100, 3);
  Eigen::Vector2d state(1.0, 0.2);
  for (Index k = 0; k < 100; ++k) {
    coeffs.row(k).segment(1, 2) = state.transpose();
    state = Eigen::Vector2d(c * state(0) - s * state(1), s * state(0) + c * state(1));
  }
  const auto path = std::filesystem::temp_directory_path() / "ftsp_rotation.csv";
  write_curves_csv(path.string(), synthesize(coeffs, basis));
  ExperimentConfig config;
  config.source = Source::file;
  config.data_file = path.string();
  config.methods = {"fixed-var"};
  config.fixed_p = 1;
  config.fixed_d = 2;
  const RunReport report = run_forecast_experiment(config);
  ASSERT_EQ(report.replications.size(), 1u);
  EXPECT_EQ(report.replications[0].errors[0].size(), 10u);
  EXPECT_LT(report.aggregate().mse, 1e-18);
  std::filesystem::remove(path);
}

TEST(Experiment, RatioReportedPerReplication) {
  ExperimentConfig config = preset_config("psi1-ratio");
  config.reps = 3;
  config.seed = 5;
  const RunReport report = run_forecast_experiment(config);
  ASSERT_EQ(report.replications.size(), 3u);
  for (const auto& rep : report.replications) {
    ASSERT_TRUE(rep.ratio.has_value());
    EXPECT_EQ(rep.targets.size(), 20u);
    EXPECT_NEAR(*rep.ratio, summarize(rep.errors[0]).mse / summarize(rep.errors[1]).mse, 1e-12);
    EXPECT_TRUE(rep.ffpe.has_value());
  }
  const auto j = report.to_json();
  for (const char* key : {"config", "replications", "aggregates", "frequencies", "wall_clock_seconds"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["replications"][0].contains("selected"));
  EXPECT_EQ(j["replications"][0]["errors"].size(), 20u);
}

TEST(Experiment, SameSeedSameRecords) {
  ExperimentConfig config = preset_config("far2-table");
  config.n = 200;
  config.reps = 3;
  config.seed = 11;
  auto a = run_forecast_experiment(config).to_json();
  auto b = run_forecast_experiment(config).to_json();
  a.erase("wall_clock_seconds");
  b.erase("wall_clock_seconds");
  EXPECT_EQ(a.dump(), b.dump());
  config.seed = 12;
  auto c = run_forecast_experiment(config).to_json();
  EXPECT_NE(a["replications"].dump(), c["replications"].dump());
}

TEST(Experiment, SplitsAndErrors) {
  ExperimentConfig config;
  config.operator_name = "psi1";
  config.sigma = "unit";
  config.dim = 3;
  config.grid = 32;
  config.n = 60;
  config.methods = {"fixed-var", "bosq-pve80", "innovations", "scalar"};
  for (Split split : {Split::holdout, Split::rolling, Split::window}) {
    config.split = split;
    const RunReport r = run_forecast_experiment(config);
    EXPECT_EQ(r.replications[0].errors.size(), 4u);
    for (const auto& e : r.replications[0].errors) EXPECT_EQ(e.size(), 6u);
  }
  config.train_fraction = 0.999;
  EXPECT_THROW(run_forecast_experiment(config), Error);
  config.train_fraction = 0.9;
  config.methods = {"nope"};
  EXPECT_THROW(run_forecast_experiment(config), Error);
}

TEST(Experiment, Presets) {
  for (const auto& name : preset_names()) EXPECT_EQ(preset_config(name).preset, name);
  EXPECT_EQ(preset_config("covariate").methods.front(), "covariate");
  EXPECT_THROW(preset_config("unknown"), Error);
}

}  // namespace
}  // namespace ftsp
