#include "ftsp/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "csv.hpp"
#include "ftsp/bands.hpp"
#include "ftsp/experiment.hpp"
#include "ftsp/ingest.hpp"

namespace ftsp {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  require(file.good(), ErrorKind::io, "cannot write '" + path + "'");
  return file;
}

void write_text(const std::string& path, std::ostream& fallback, const std::string& text) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  auto file = open_output(path);
  file << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : csv::split(text)) {
    const auto v = csv::parse_double(cell);
    require(v.has_value(), ErrorKind::parse, "cannot parse '" + cell + "' in list '" + text + "'");
    out.push_back(*v);
  }
  return out;
}

Matrix read_numeric_matrix(const std::string& path) {
  // Numeric covariates share the curve CSV layout; only the grid is ignored.
  return read_curves_csv(path).values();
}

struct SimulateArgs {
  std::string kind = "far";
  Index orders = 1;
  std::string kappa = "0.8";
  std::string op = "random";
  std::string sigma = "s1";
  Index dim = 21;
  Index n = 200;
  Index grid = 256;
  Index burn_in = 200;
  std::string spec_file;
  std::string spec_out;
  std::string out;
  std::string covariate_out;
  bool header = false;
};

struct IngestArgs {
  std::string input;
  std::string out;
  bool sqrt = false;
  bool no_interpolate = false;
  std::string weekday_column;
  Index rows_per_curve = 0;
  std::string value_column = "value";
};

struct SelectArgs {
  std::string input;
  Index p_max = 5;
  Index d_max = 10;
  std::string out;
};

struct ForecastArgs {
  std::string input;
  std::string method = "ffpe";
  Index p = 1;
  Index d = 3;
  Index p_max = 5;
  Index d_max = 10;
  Index horizon = 1;
  std::vector<std::string> covariates;
  std::vector<std::string> numeric_covariates;
  std::string covariate_fit = "regression";
  std::string out;
  std::string curve_out;
};

struct BandsArgs {
  std::string input;
  Index p = 1;
  Index d = 3;
  Index warmup = 0;
  double alpha = 0.8;
  bool asymmetric = false;
  std::string out;
  std::string forecast_out;
};

struct BenchmarkArgs {
  std::string preset;
  std::string input;
  std::string covariate;
  Index reps = 0;
  Index n = 0;
  std::vector<std::string> methods;
  std::string split;
  Index horizon = 0;
  Index p_max = 0;
  Index d_max = 0;
  std::string out;
  std::string predictions_out;
};

int run_simulate(const SimulateArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  Rng rng(seed);
  const Grid grid(a.grid);
  if (a.kind == "covariate") {
    const auto pair = simulate_covariate_pair(a.n, grid, rng);
    std::ostringstream response, covariate;
    write_curves_csv(response, pair.response, a.header);
    write_curves_csv(covariate, pair.covariate, a.header);
    write_text(a.out, out, response.str());
    require(!a.covariate_out.empty(), ErrorKind::parse, "--kind covariate needs --covariate-out");
    write_text(a.covariate_out, out, covariate.str());
    err << "simulated " << a.n << " response and covariate curves on " << a.grid << " points\n";
    return 0;
  }
  if (a.kind == "pm10") {
    std::ostringstream text;
    write_pm10_analog_csv(text, a.n, rng);
    write_text(a.out, out, text.str());
    err << "simulated " << a.n << " days of synthetic long-format PM10 analog data\n";
    return 0;
  }

  ProcessSpec spec;
  if (!a.spec_file.empty()) {
    std::ifstream in(a.spec_file);
    require(in.good(), ErrorKind::io, "cannot open '" + a.spec_file + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::parse, std::string("spec file: ") + e.what());
    }
    spec = process_spec_from_json(j);
  } else {
    Matrix psi;
    Index dim = a.dim;
    if (a.op == "psi1" || a.op == "psi2") {
      psi = fixed_psi(a.op == "psi1" ? FixedPsi::psi1 : FixedPsi::psi2);
      dim = 3;
    } else {
      require(a.op == "random", ErrorKind::parse, "unknown operator '" + a.op + "'");
    }
    Vector sigma;
    if (a.sigma == "s1")
      sigma = sigma_scheme(SigmaScheme::s1, dim);
    else if (a.sigma == "s2")
      sigma = sigma_scheme(SigmaScheme::s2, dim);
    else if (a.sigma == "unit")
      sigma = Vector::Ones(dim);
    else
      fail(ErrorKind::parse, "unknown sigma scheme '" + a.sigma + "'");
    if (psi.size() == 0) psi = random_operator(dim, sigma, rng);
    if (a.kind == "far") {
      auto kappa = parse_list(a.kappa);
      require(static_cast<Index>(kappa.size()) <= a.orders, ErrorKind::parse,
              "more kappa values than the AR order");
      kappa.resize(static_cast<std::size_t>(a.orders), 0.0);
      spec = far_spec(psi, kappa, sigma);
    } else if (a.kind == "fma") {
      spec = fma_spec(psi, sigma);
    } else if (a.kind == "farma") {
      spec = farma_spec(psi, sigma);
    } else {
      fail(ErrorKind::parse, "unknown process kind '" + a.kind + "'");
    }
    spec.burn_in = a.burn_in;
  }
  if (!a.spec_out.empty()) write_text(a.spec_out, out, to_json(spec).dump(2) + "\n");
  const FunctionalDataset data = simulate(spec, a.n, grid, rng);
  std::ostringstream text;
  write_curves_csv(text, data, a.header);
  write_text(a.out, out, text.str());
  err << "simulated " << data.size() << " curves on " << data.grid().size() << " points\n";
  return 0;
}

int run_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  IngestOptions options;
  options.interpolate_missing = !a.no_interpolate;
  options.transform = a.sqrt ? IngestOptions::Transform::sqrt : IngestOptions::Transform::none;
  if (!a.weekday_column.empty()) options.weekday_column = a.weekday_column;
  options.rows_per_curve = a.rows_per_curve;
  options.value_column = a.value_column;
  const IngestResult result = ingest(a.input, options);
  std::ostringstream text;
  write_curves_csv(text, result.data, true);
  write_text(a.out, out, text.str());
  err << "ingested " << result.data.size() << " curves on " << result.data.grid().size() << " points, "
      << result.missing_cells << " missing cells filled\n";
  return 0;
}

int run_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  const FunctionalDataset data = read_curves_csv(a.input);
  const Index d_max = std::min({a.d_max, data.size() - 1, data.grid().size()});
  const FfpeTable table = select_pd(data, a.p_max, d_max);
  std::ostringstream text;
  write_ffpe_csv(text, table);
  write_text(a.out, out, text.str());
  err << "selected p=" << table.best_p << " d=" << table.best_d << " ffpe=" << csv::format(table.best().value)
      << "\n";
  return 0;
}

int run_forecast(const ForecastArgs& a, std::ostream& out, std::ostream& err) {
  const FunctionalDataset data = read_curves_csv(a.input);
  ForecastResult result;
  const bool has_covariates = !a.covariates.empty() || !a.numeric_covariates.empty();
  require(!has_covariates || a.method == "covariate", ErrorKind::parse,
          "covariate files are only used by --method covariate");
  if (a.horizon != 1)
    require(a.method == "ffpe" || a.method == "fixed", ErrorKind::unsupported,
            "--horizon above 1 is supported by the ffpe and fixed methods only");
  if (a.method == "ffpe") {
    result = predict_fts(data, a.horizon, AutoOrder{a.p_max, a.d_max});
  } else if (a.method == "fixed") {
    result = predict_fts(data, a.horizon, FixedOrder{a.p, a.d});
  } else if (a.method == "bosq") {
    result = bosq_predict(data, a.d);
  } else if (a.method == "scalar") {
    result = scalar_predict(data, a.d, a.p);
  } else if (a.method == "innovations") {
    result = innovations_forecast(data, a.d, a.p);
  } else if (a.method == "covariate") {
    std::vector<CovariateSeries> series;
    for (const auto& path : a.covariates) series.emplace_back(read_curves_csv(path));
    for (const auto& path : a.numeric_covariates) series.emplace_back(read_numeric_matrix(path));
    CovariateOptions options;
    require(a.covariate_fit == "regression" || a.covariate_fit == "population", ErrorKind::parse,
            "--covariate-fit must be regression or population");
    options.fit = a.covariate_fit == "regression" ? CovariateOptions::Fit::regression
                                                  : CovariateOptions::Fit::population;
    result = predict_with_covariates(data, series, AutoOrder{a.p_max, a.d_max}, options);
  } else {
    fail(ErrorKind::parse, "unknown method '" + a.method + "'");
  }
  write_text(a.out, out, to_json(result).dump(2) + "\n");
  if (!a.curve_out.empty()) {
    auto file = open_output(a.curve_out);
    write_curves_csv(file, FunctionalDataset(result.grid, result.curves), true);
  }
  err << "method=" << method_name(result.method) << " p=" << result.p << " d=" << result.d
      << " horizon=" << result.horizon() << "\n";
  return 0;
}

int run_bands(const BandsArgs& a, std::ostream& out, std::ostream& err) {
  const FunctionalDataset data = read_curves_csv(a.input);
  const Index warmup = a.warmup > 0 ? a.warmup : default_warmup(data.size(), a.d, a.p);
  const FunctionalDataset residuals = rolling_residuals(data, a.d, a.p, warmup);
  const PredictionBand band = prediction_band(residuals, a.alpha, !a.asymmetric);
  std::ostringstream text;
  write_band_csv(text, band);
  write_text(a.out, out, text.str());
  if (!a.forecast_out.empty()) {
    const ForecastResult next = predict_fts(data, 1, FixedOrder{a.p, a.d});
    const Vector curve = next.curve();
    const Vector lo = band.lower(curve), hi = band.upper(curve);
    auto file = open_output(a.forecast_out);
    file << "t,forecast,lower,upper\n";
    for (Index t = 0; t < curve.size(); ++t)
      file << csv::format(band.grid.point(t)) << ',' << csv::format(curve(t)) << ',' << csv::format(lo(t))
           << ',' << csv::format(hi(t)) << '\n';
  }
  err << "residuals=" << band.residual_count << " warmup=" << warmup << " xi_lower="
      << csv::format(band.xi_lower) << " xi_upper=" << csv::format(band.xi_upper)
      << " in_sample_coverage=" << csv::format(coverage(band, residuals)) << "\n";
  return 0;
}

int run_benchmark(const BenchmarkArgs& a, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  if (!a.preset.empty()) {
    config = preset_config(a.preset);
  } else {
    require(!a.input.empty(), ErrorKind::parse, "benchmark needs --preset or --input");
    config.preset = "file";
    config.methods = {"ffpe-var", "bosq-pve80"};
  }
  if (!a.input.empty()) {
    config.source = Source::file;
    config.data_file = a.input;
    config.covariate_file = a.covariate;
  }
  config.seed = seed;
  if (a.reps > 0) config.reps = a.reps;
  if (a.n > 0) config.n = a.n;
  if (!a.methods.empty()) config.methods = a.methods;
  if (a.horizon > 0) config.horizon = a.horizon;
  if (a.p_max > 0) config.p_max = a.p_max;
  if (a.d_max > 0) config.d_max = a.d_max;
  if (a.split == "holdout")
    config.split = Split::holdout;
  else if (a.split == "rolling")
    config.split = Split::rolling;
  else if (a.split == "window")
    config.split = Split::window;
  else
    require(a.split.empty(), ErrorKind::parse, "unknown split '" + a.split + "'");
  config.keep_predictions = !a.predictions_out.empty();

  const RunReport report = run_forecast_experiment(config);
  write_text(a.out, out, report.to_json().dump(2) + "\n");
  if (!a.predictions_out.empty()) {
    auto file = open_output(a.predictions_out);
    file << "rep,index";
    const Index t_count = report.config.grid;
    for (Index t = 0; t < t_count; ++t) file << ",t_" << t + 1;
    file << '\n';
    for (const auto& rep : report.replications)
      for (Index i = 0; i < rep.predictions.rows(); ++i) {
        file << rep.idx << ',' << rep.targets[static_cast<std::size_t>(i)];
        for (Index t = 0; t < rep.predictions.cols(); ++t) file << ',' << csv::format(rep.predictions(i, t));
        file << '\n';
      }
  }
  const ErrorSummary s = report.aggregate();
  err << "preset=" << report.config.preset << " reps=" << report.replications.size()
      << " mse=" << csv::format(s.mse) << " medse=" << csv::format(s.medse) << "\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional time series prediction", "ftsp"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate curves from a linear functional process");
  simulate_cmd->add_option("--kind", sim.kind, "far, fma, farma, covariate or pm10")
      ->check(CLI::IsMember({"far", "fma", "farma", "covariate", "pm10"}));
  simulate_cmd->add_option("--orders", sim.orders, "AR order for far")->check(CLI::Range(0, 50));
  simulate_cmd->add_option("--kappa", sim.kappa, "Comma separated AR scale factors");
  simulate_cmd->add_option("--operator", sim.op, "random, psi1 or psi2");
  simulate_cmd->add_option("--sigma", sim.sigma, "s1, s2 or unit");
  simulate_cmd->add_option("--dim", sim.dim, "Basis dimension D")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--n", sim.n, "Number of curves (days for pm10)")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--grid", sim.grid, "Grid points per curve")->check(CLI::Range(2, 1 << 20));
  simulate_cmd->add_option("--burn-in", sim.burn_in, "Discarded warm-up steps")->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--spec", sim.spec_file, "Process spec JSON to simulate instead of flags");
  simulate_cmd->add_option("--spec-out", sim.spec_out, "Write the process spec as JSON");
  simulate_cmd->add_option("--out", sim.out, "Output CSV (stdout when omitted)");
  simulate_cmd->add_option("--covariate-out", sim.covariate_out, "Covariate CSV for --kind covariate");
  simulate_cmd->add_flag("--header", sim.header, "Write a t_1..t_T header row");
  simulate_cmd->add_option("--seed", seed, "Random seed")->required();

  IngestArgs ing;
  auto* ingest_cmd = app.add_subcommand("ingest", "Read raw observations into a curve CSV");
  ingest_cmd->add_option("--input", ing.input, "Raw CSV")->required();
  ingest_cmd->add_option("--out", ing.out, "Curve CSV (stdout when omitted)");
  ingest_cmd->add_flag("--sqrt", ing.sqrt, "Apply a square-root transform");
  ingest_cmd->add_flag("--no-interpolate", ing.no_interpolate, "Treat missing cells as errors");
  ingest_cmd->add_option("--weekday-column", ing.weekday_column, "Subtract per-label mean curves");
  ingest_cmd->add_option("--rows-per-curve", ing.rows_per_curve, "Long format: rows per curve")
      ->check(CLI::NonNegativeNumber);
  ingest_cmd->add_option("--value-column", ing.value_column, "Long format value column");

  SelectArgs sel;
  auto* select_cmd = app.add_subcommand("select", "Tabulate the fFPE criterion and pick (p, d)");
  select_cmd->add_option("--input", sel.input, "Curve CSV")->required();
  select_cmd->add_option("--pmax", sel.p_max, "Largest VAR order")->check(CLI::NonNegativeNumber);
  select_cmd->add_option("--dmax", sel.d_max, "Largest dimension")->check(CLI::PositiveNumber);
  select_cmd->add_option("--out", sel.out, "Table CSV (stdout when omitted)");

  ForecastArgs fc;
  auto* forecast_cmd = app.add_subcommand("forecast", "Predict the next curve");
  forecast_cmd->add_option("--input", fc.input, "Curve CSV")->required();
  forecast_cmd->add_option("--method", fc.method, "ffpe, fixed, bosq, scalar, covariate or innovations")
      ->check(CLI::IsMember({"ffpe", "fixed", "bosq", "scalar", "covariate", "innovations"}));
  forecast_cmd->add_option("--p", fc.p, "VAR order (innovations: window length)")->check(CLI::NonNegativeNumber);
  forecast_cmd->add_option("--d", fc.d, "Dimension")->check(CLI::PositiveNumber);
  forecast_cmd->add_option("--pmax", fc.p_max, "Largest VAR order")->check(CLI::NonNegativeNumber);
  forecast_cmd->add_option("--dmax", fc.d_max, "Largest dimension")->check(CLI::PositiveNumber);
  forecast_cmd->add_option("--horizon", fc.horizon, "Steps ahead")->check(CLI::PositiveNumber);
  forecast_cmd->add_option("--covariate", fc.covariates, "Functional covariate curve CSV (repeatable)");
  forecast_cmd->add_option("--numeric-covariate", fc.numeric_covariates, "Numeric covariate CSV (repeatable)");
  forecast_cmd->add_option("--covariate-fit", fc.covariate_fit, "regression or population");
  forecast_cmd->add_option("--out", fc.out, "Result JSON (stdout when omitted)");
  forecast_cmd->add_option("--curve-out", fc.curve_out, "Predicted curves as CSV");

  BandsArgs bd;
  auto* bands_cmd = app.add_subcommand("bands", "Uniform prediction band from rolling residuals");
  bands_cmd->add_option("--input", bd.input, "Curve CSV")->required();
  bands_cmd->add_option("--p", bd.p, "VAR order")->check(CLI::NonNegativeNumber);
  bands_cmd->add_option("--d", bd.d, "Dimension")->check(CLI::PositiveNumber);
  bands_cmd->add_option("--warmup", bd.warmup, "Warm-up length L (default max(p, 10 d, n / 4))")
      ->check(CLI::NonNegativeNumber);
  bands_cmd->add_option("--alpha", bd.alpha, "Nominal coverage")->check(CLI::Range(0.0, 1.0));
  bands_cmd->add_flag("--asymmetric", bd.asymmetric, "Separate lower and upper scales");
  bands_cmd->add_option("--out", bd.out, "Band CSV (stdout when omitted)");
  bands_cmd->add_option("--forecast-out", bd.forecast_out, "Next-curve forecast with band limits");

  BenchmarkArgs bm;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a replicated forecasting experiment");
  bench_cmd->add_option("--preset", bm.preset, "Experiment preset")->check(CLI::IsMember(preset_names()));
  bench_cmd->add_option("--input", bm.input, "Evaluate on a curve CSV instead of simulated data");
  bench_cmd->add_option("--covariate", bm.covariate, "Functional covariate CSV for --input");
  bench_cmd->add_option("--reps", bm.reps, "Replications")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--n", bm.n, "Series length")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--methods", bm.methods, "Methods, primary first")->delimiter(',');
  bench_cmd->add_option("--split", bm.split, "holdout, rolling or window");
  bench_cmd->add_option("--horizon", bm.horizon, "Steps ahead")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--pmax", bm.p_max, "Largest VAR order")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dmax", bm.d_max, "Largest dimension")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bm.out, "Report JSON (stdout when omitted)");
  bench_cmd->add_option("--predictions-out", bm.predictions_out, "Primary method predictions CSV");
  bench_cmd->add_option("--seed", seed, "Master seed")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error kind=usage: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 2;
  }

  try {
    if (*simulate_cmd) return run_simulate(sim, seed, out, err);
    if (*ingest_cmd) return run_ingest(ing, out, err);
    if (*select_cmd) return run_select(sel, out, err);
    if (*forecast_cmd) return run_forecast(fc, out, err);
    if (*bands_cmd) return run_bands(bd, out, err);
    if (*bench_cmd) return run_benchmark(bm, seed, out, err);
  } catch (const Error& e) {
    err << "error kind=" << kind_name(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error kind=internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace ftsp
