#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftsp/forecast.hpp"
#include "ftsp/simgen.hpp"
#include "json.hpp"

namespace ftsp {

enum class Source { far, fma, farma, covariate, file };
enum class Split { holdout, rolling, window };

struct ExperimentConfig {
  std::string preset = "custom";
  Source source = Source::far;
  /// "random" (redrawn every replication), "psi1" or "psi2" (fixed 3 x 3 operators).
  std::string operator_name = "random";
  std::vector<double> kappa{0.8};
  /// "s1", "s2" or "unit".
  std::string sigma = "s1";
  Index dim = 21;
  Index grid = 256;
  Index n = 200;
  double train_fraction = 0.9;
  Split split = Split::holdout;
  /// Evaluated in order; the first is the primary method and the ratio is first / second.
  /// Names: ffpe-var, fixed-var, bosq-pve80, scalar, covariate, innovations.
  std::vector<std::string> methods{"ffpe-var"};
  Index horizon = 1;
  std::uint64_t seed = 0;
  Index reps = 1;
  Index p_max = 3;
  Index d_max = 10;
  /// Order used by fixed-var, scalar and innovations (m = max(p, 1)).
  Index fixed_p = 1;
  Index fixed_d = 3;
  std::string data_file;
  std::string covariate_file;
  bool keep_predictions = false;
};

struct ErrorSummary {
  double mse = 0.0;
  double medse = 0.0;
  double sd = 0.0;
};

ErrorSummary summarize(std::vector<double> errors);

struct Replication {
  Index idx = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> errors;  // per method, squared L2 prediction errors
  Index p = -1;                             // primary method order and dimension
  Index d = -1;
  std::optional<double> ffpe;               // criterion value of the selected cell
  std::optional<double> ratio;
  Matrix predictions;                       // primary method, when kept
  std::vector<Index> targets;               // curve indices predicted
};

struct RunReport {
  ExperimentConfig config;
  std::vector<Replication> replications;
  double wall_clock_seconds = 0.0;

  /// Primary method error summary pooled over replications.
  ErrorSummary aggregate(std::size_t method = 0) const;
  nlohmann::json to_json() const;
};

/// Named experiment shapes: psi1-ratio, psi2-ratio, far2-table, fma-farma, covariate.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

RunReport run_forecast_experiment(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace ftsp
