#include "ftsp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "ftsp/parallel.hpp"

namespace ftsp {

namespace {

std::string_view source_name(Source s) {
  switch (s) {
    case Source::far: return "far";
    case Source::fma: return "fma";
    case Source::farma: return "farma";
    case Source::covariate: return "covariate";
    case Source::file: return "file";
  }
  return "unknown";
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::holdout: return "holdout";
    case Split::rolling: return "rolling";
    case Split::window: return "window";
  }
  return "unknown";
}

Vector resolve_sigma(const std::string& name, Index dim) {
  if (name == "s1") return sigma_scheme(SigmaScheme::s1, dim);
  if (name == "s2") return sigma_scheme(SigmaScheme::s2, dim);
  if (name == "unit") return Vector::Ones(dim);
  fail(ErrorKind::parse, "unknown sigma scheme '" + name + "' (expected s1, s2 or unit)");
}

struct Sample {
  FunctionalDataset data;
  std::optional<FunctionalDataset> covariate;
};

Sample draw_sample(const ExperimentConfig& config, Rng& rng) {
  const Grid grid(config.grid);
  if (config.source == Source::covariate) {
    auto pair = simulate_covariate_pair(config.n, grid, rng);
    return {std::move(pair.response), std::move(pair.covariate)};
  }
  Matrix psi;
  Index dim = config.dim;
  if (config.operator_name == "psi1" || config.operator_name == "psi2") {
    psi = fixed_psi(config.operator_name == "psi1" ? FixedPsi::psi1 : FixedPsi::psi2);
    dim = 3;
  } else {
    require(config.operator_name == "random", ErrorKind::parse,
            "unknown operator '" + config.operator_name + "' (expected random, psi1 or psi2)");
  }
  const Vector sigma = resolve_sigma(config.sigma, dim);
  if (psi.size() == 0) psi = random_operator(dim, sigma, rng);
  ProcessSpec spec;
  switch (config.source) {
    case Source::far: spec = far_spec(psi, config.kappa, sigma); break;
    case Source::fma: spec = fma_spec(psi, sigma); break;
    case Source::farma: spec = farma_spec(psi, sigma); break;
    default: fail(ErrorKind::unsupported, "source cannot be simulated");
  }
  return {simulate(spec, config.n, grid, rng), std::nullopt};
}

Predictor fit_method(const std::string& method, const ExperimentConfig& config, const FunctionalDataset& train,
                     const std::optional<FunctionalDataset>& covariate) {
  if (method == "ffpe-var") return fit_fts(train, AutoOrder{config.p_max, config.d_max});
  if (method == "fixed-var") return fit_fts(train, FixedOrder{config.fixed_p, config.fixed_d});
  if (method == "scalar") return fit_scalar(train, config.fixed_d, config.fixed_p);
  if (method == "innovations")
    return fit_innovations(train, config.fixed_d, std::max<Index>(config.fixed_p, 1));
  if (method == "bosq-pve80") {
    const EigenSystem full = eigensystem(train, std::min(train.size() - 1, train.grid().size()));
    return fit_bosq(train, std::max<Index>(dimension_for_pve(full, 0.8), 1));
  }
  if (method == "covariate") {
    require(covariate.has_value(), ErrorKind::unsupported, "method 'covariate' needs a covariate series");
    return fit_with_covariates(train, {*covariate}, AutoOrder{config.p_max, config.d_max});
  }
  fail(ErrorKind::parse, "unknown method '" + method + "'");
}

struct MethodRun {
  std::vector<double> errors;
  Matrix predictions;
  Index p = -1;
  Index d = -1;
  std::optional<double> ffpe;
};

MethodRun evaluate(const std::string& method, const ExperimentConfig& config, const Sample& sample,
                   Index train, const std::vector<Index>& targets) {
  const FunctionalDataset& data = sample.data;
  const Index h = config.horizon;
  const bool uses_covariate = method == "covariate";
  require(!uses_covariate || h == 1, ErrorKind::unsupported, "covariate forecasts are one step ahead");
  MethodRun run;
  run.predictions.resize(static_cast<Index>(targets.size()), data.grid().size());

  std::optional<Predictor> fitted;
  auto refit = [&](Index first, Index count) {
    std::optional<FunctionalDataset> cov;
    if (sample.covariate) cov = sample.covariate->slice(first, count);
    fitted = fit_method(method, config, data.slice(first, count), cov);
    run.p = fitted->p();
    run.d = fitted->d();
    run.ffpe = fitted->table ? std::optional<double>(fitted->table->best().value) : std::nullopt;
  };
  if (config.split == Split::holdout) refit(0, train);

  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Index k = targets[i];
    const Index origin = k - h + 1;  // curves 0..origin-1 are known
    if (config.split == Split::rolling) refit(0, origin);
    if (config.split == Split::window) refit(origin - train, train);
    const Matrix history = data.values().topRows(origin);
    Vector next;
    if (uses_covariate) {
      const Vector r = fitted->encoder->dim() > 0
                           ? fitted->encoder->encode_row({*sample.covariate}, origin - 1)
                           : Vector::Zero(0);
      next = fitted->predict_scores(history, r);
    } else {
      next = fitted->predict_scores(history, h).row(h - 1).transpose();
    }
    const Vector curve = fitted->to_curves(next.transpose()).row(0).transpose();
    run.predictions.row(static_cast<Index>(i)) = curve.transpose();
    run.errors.push_back((data.values().row(k).transpose() - curve).squaredNorm() /
                         static_cast<double>(data.grid().size()));
  }
  return run;
}

Replication run_replication(const ExperimentConfig& config, Index idx, const Sample* fixed_sample) {
  Replication rep;
  rep.idx = idx;
  rep.seed = replication_seed(config.seed, static_cast<std::uint64_t>(idx));
  Rng rng(rep.seed);
  const Sample sample = fixed_sample ? *fixed_sample : draw_sample(config, rng);
  const Index n = sample.data.size();
  const auto train = static_cast<Index>(std::llround(config.train_fraction * static_cast<double>(n)));
  require(train >= 2 && train + config.horizon - 1 < n, ErrorKind::insufficient_data,
          "training length " + std::to_string(train) + " leaves no evaluation curves among " +
              std::to_string(n));
  for (Index k = train + config.horizon - 1; k < n; ++k) rep.targets.push_back(k);

  std::vector<double> mse;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    MethodRun run = evaluate(config.methods[m], config, sample, train, rep.targets);
    if (m == 0) {
      rep.p = run.p;
      rep.d = run.d;
      rep.ffpe = run.ffpe;
      if (config.keep_predictions) rep.predictions = std::move(run.predictions);
    }
    mse.push_back(std::accumulate(run.errors.begin(), run.errors.end(), 0.0) /
                  static_cast<double>(run.errors.size()));
    rep.errors.push_back(std::move(run.errors));
  }
  if (mse.size() >= 2 && mse[1] > 0.0) rep.ratio = mse[0] / mse[1];
  return rep;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

nlohmann::json summary_json(const ErrorSummary& s) {
  return {{"mse", s.mse}, {"medse", s.medse}, {"sd", s.sd}};
}

}  // namespace

ErrorSummary summarize(std::vector<double> errors) {
  ErrorSummary s;
  if (errors.empty()) return s;
  const double count = static_cast<double>(errors.size());
  s.mse = std::accumulate(errors.begin(), errors.end(), 0.0) / count;
  double ss = 0.0;
  for (double e : errors) ss += (e - s.mse) * (e - s.mse);
  s.sd = errors.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  s.medse = median(std::move(errors));
  return s;
}

ErrorSummary RunReport::aggregate(std::size_t method) const {
  std::vector<double> pooled;
  for (const auto& rep : replications)
    pooled.insert(pooled.end(), rep.errors[method].begin(), rep.errors[method].end());
  return summarize(std::move(pooled));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["preset"] = c.preset;
  j["source"] = source_name(c.source);
  if (c.source == Source::file) {
    j["data_file"] = c.data_file;
    if (!c.covariate_file.empty()) j["covariate_file"] = c.covariate_file;
  } else if (c.source == Source::covariate) {
    j["note"] = "synthetic covariate analog (functional response with lagged functional covariate)";
  } else {
    j["operator"] = c.operator_name;
    j["kappa"] = c.kappa;
    j["sigma"] = c.sigma;
    j["dim"] = c.dim;
  }
  j["grid"] = c.grid;
  j["n"] = c.n;
  j["train_fraction"] = c.train_fraction;
  j["split"] = split_name(c.split);
  j["methods"] = c.methods;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["p_max"] = c.p_max;
  j["d_max"] = c.d_max;
  j["fixed_p"] = c.fixed_p;
  j["fixed_d"] = c.fixed_d;
  return j;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["config"] = ftsp::to_json(config);
  j["replications"] = nlohmann::json::array();
  std::map<std::string, Index> frequencies;
  std::vector<double> ratios;
  double order_sum = 0.0;
  for (const auto& rep : replications) {
    nlohmann::json r;
    r["idx"] = rep.idx;
    r["seed"] = rep.seed;
    r["errors"] = rep.errors.front();
    r["method_errors"] = nlohmann::json::object();
    for (std::size_t m = 0; m < rep.errors.size(); ++m) r["method_errors"][config.methods[m]] = rep.errors[m];
    r["selected"] = {{"p", rep.p}, {"d", rep.d}};
    if (rep.ffpe) r["ffpe"] = *rep.ffpe;
    if (rep.ratio) {
      r["ratio"] = *rep.ratio;
      ratios.push_back(*rep.ratio);
    }
    j["replications"].push_back(std::move(r));
    ++frequencies["p=" + std::to_string(rep.p) + ",d=" + std::to_string(rep.d)];
    order_sum += static_cast<double>(rep.p);
  }
  nlohmann::json agg = summary_json(aggregate(0));
  agg["by_method"] = nlohmann::json::object();
  for (std::size_t m = 0; m < config.methods.size(); ++m)
    agg["by_method"][config.methods[m]] = summary_json(aggregate(m));
  if (!ratios.empty()) {
    agg["ratio_median"] = median(ratios);
    agg["ratio_below_one"] =
        static_cast<double>(std::count_if(ratios.begin(), ratios.end(), [](double r) { return r < 1.0; })) /
        static_cast<double>(ratios.size());
  }
  if (!replications.empty()) agg["mean_order"] = order_sum / static_cast<double>(replications.size());
  j["aggregates"] = std::move(agg);
  j["frequencies"] = frequencies;
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

std::vector<std::string> preset_names() {
  return {"psi1-ratio", "psi2-ratio", "far2-table", "fma-farma", "covariate"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "psi1-ratio" || name == "psi2-ratio") {
    c.operator_name = name == "psi1-ratio" ? "psi1" : "psi2";
    c.kappa = {1.0};
    c.sigma = "unit";
    c.dim = 3;
    c.n = 200;
    c.methods = {"ffpe-var", "scalar"};
    c.reps = 200;
    c.p_max = 3;
    c.d_max = 3;
  } else if (name == "far2-table") {
    c.kappa = {0.4, 0.4};
    c.n = 1000;
    c.methods = {"ffpe-var", "bosq-pve80"};
    c.reps = 100;
    c.d_max = 10;
  } else if (name == "fma-farma") {
    c.source = Source::farma;
    c.n = 1000;
    c.methods = {"ffpe-var", "bosq-pve80"};
    c.reps = 50;
    c.p_max = 10;
    c.d_max = 10;
  } else if (name == "covariate") {
    c.source = Source::covariate;
    c.grid = 48;
    c.n = 200;
    c.methods = {"covariate", "ffpe-var"};
    c.reps = 50;
    c.d_max = 5;
  } else {
    fail(ErrorKind::parse, "unknown preset '" + name + "'");
  }
  return c;
}

RunReport run_forecast_experiment(const ExperimentConfig& config) {
  require(!config.methods.empty(), ErrorKind::parse, "no methods requested");
  require(config.reps >= 1, ErrorKind::out_of_range, "reps must be positive");
  require(config.horizon >= 1, ErrorKind::out_of_range, "horizon must be positive");
  require(config.train_fraction > 0.0 && config.train_fraction < 1.0, ErrorKind::out_of_range,
          "train fraction must lie in (0, 1)");
  const auto start = std::chrono::steady_clock::now();

  RunReport report;
  report.config = config;
  std::optional<Sample> loaded;
  if (config.source == Source::file) {
    require(!config.data_file.empty(), ErrorKind::parse, "file source needs a data file");
    Sample s{read_curves_csv(config.data_file), std::nullopt};
    if (!config.covariate_file.empty()) s.covariate = read_curves_csv(config.covariate_file);
    report.config.n = s.data.size();
    report.config.grid = s.data.grid().size();
    report.config.reps = 1;
    loaded = std::move(s);
  }
  report.replications.resize(static_cast<std::size_t>(report.config.reps));
  parallel_for(report.replications.size(), [&](std::size_t i) {
    report.replications[i] =
        run_replication(report.config, static_cast<Index>(i), loaded ? &*loaded : nullptr);
  });
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace ftsp
