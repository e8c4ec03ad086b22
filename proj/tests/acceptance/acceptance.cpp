#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "ftsp/bands.hpp"
#include "ftsp/experiment.hpp"
#include "ftsp/forecast.hpp"
#include "ftsp/multivar.hpp"
#include "ftsp/parallel.hpp"
#include "ftsp/selection.hpp"
#include "ftsp/simgen.hpp"
#include "test_support.hpp"

using namespace ftsp;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Verdict fpca_identities() {
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng(replication_seed(101, r));
    const FunctionalDataset data = testing::random_curves(200, 21, 256, rng);
    const Index n = data.size();
    const EigenSystem eig = eigensystem(data, 21);
    const Matrix centered = data.values().rowwise() - eig.mean.transpose();
    const double total = centered.squaredNorm() / static_cast<double>(centered.cols()) / static_cast<double>(n);
    worst = std::max(worst, std::abs(eig.spectrum.sum() - total) / total);

    const ScoreMatrix y = scores(data, eig);
    const Matrix gram = y.transpose() * y / static_cast<double>(n);
    Matrix off = gram;
    off.diagonal().setZero();
    worst = std::max(worst, off.cwiseAbs().maxCoeff() / eig.eigenvalues(0));
    worst = std::max(worst, (gram.diagonal() - eig.eigenvalues).cwiseAbs().maxCoeff() / eig.eigenvalues(0));

    for (Index d : {1, 3, 7, 15}) {
      const EigenSystem cut = truncate(eig, d);
      const Matrix rest = data.values() - reconstruct(scores(data, cut), cut).values();
      const double err = rest.squaredNorm() / static_cast<double>(rest.cols()) / static_cast<double>(n);
      worst = std::max(worst, std::abs(err - eig.tail_sum(d)) / total);
    }
  }
  return {worst < 1e-8, fmt("max relative deviation %.3g over 20 datasets", worst)};
}

Verdict equivalence_rate() {
  const std::vector<Index> sizes{100, 200, 400, 800};
  std::vector<double> medians;
  const ProcessSpec spec = far_spec(fixed_psi(FixedPsi::psi1), {1.0}, Vector::Ones(3));
  // Each replication is one path; the sample of size n is its n most recent curves.
  std::vector<std::vector<double>> gaps(sizes.size(), std::vector<double>(100));
  parallel_for(100, [&](std::size_t r) {
    Rng rng(replication_seed(202, r));
    const FunctionalDataset path = simulate(spec, sizes.back(), Grid(64), rng);
    for (std::size_t i = 0; i < sizes.size(); ++i)
      gaps[i][r] = equivalence_gap(path.slice(sizes.back() - sizes[i], sizes[i]), 3).gap;
  });
  for (const auto& g : gaps) medians.push_back(median(g));
  bool ok = medians[3] < 0.15 * medians[0];
  std::string detail = "median gaps";
  for (std::size_t i = 0; i < medians.size(); ++i) {
    detail += fmt(" %.4g", medians[i]);
    if (i > 0) {
      const double f = medians[i] / medians[i - 1];
      ok = ok && f >= 0.3 && f <= 0.8;
    }
  }
  detail += fmt("; gap(800)/gap(100) = %.3f", medians[3] / medians[0]);
  return {ok, detail};
}

Verdict order_selection() {
  struct Setting {
    std::vector<double> kappa;
    Index n;
    Index target;
    int needed;
  };
  const std::vector<Setting> settings{{{0.8, 0.0}, 200, 1, 85}, {{0.4, 0.4}, 1000, 2, 85}, {{0.2, 0.0}, 1000, 1, 80}};
  bool ok = true;
  std::string detail;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const Setting& set = settings[s];
    std::vector<Index> picked(100);
    parallel_for(picked.size(), [&](std::size_t r) {
      Rng rng(replication_seed(303 + s, r));
      const Vector sigma = sigma_scheme(SigmaScheme::s1, 21);
      const Matrix psi = random_operator(21, sigma, rng);
      const FunctionalDataset data = simulate(far_spec(psi, set.kappa, sigma), set.n, Grid(256), rng);
      picked[r] = select_pd(data, 3, 10).best_p;
    });
    const auto hits = std::count(picked.begin(), picked.end(), set.target);
    ok = ok && hits >= set.needed;
    detail += fmt("%g/100 pick p=%g (need %g)", static_cast<double>(hits), static_cast<double>(set.target),
                  set.needed);
    if (s + 1 < settings.size()) detail += "; ";
  }
  return {ok, detail};
}

Verdict ffpe_consistency() {
  struct Setting {
    std::vector<double> kappa;
    std::string sigma;
  };
  const std::vector<Setting> settings{{{0.8, 0.0}, "s1"}, {{0.8, 0.0}, "s2"}, {{0.4, 0.4}, "s1"}, {{0.4, 0.4}, "s2"}};
  bool ok = true;
  std::string detail;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    ExperimentConfig config = preset_config("far2-table");
    config.kappa = settings[s].kappa;
    config.sigma = settings[s].sigma;
    config.methods = {"ffpe-var"};
    config.reps = 100;
    config.seed = 404 + s;
    const RunReport report = run_forecast_experiment(config);
    std::vector<double> mse, crit;
    for (const auto& rep : report.replications) {
      mse.push_back(summarize(rep.errors[0]).mse);
      crit.push_back(*rep.ffpe);
    }
    const double rel = std::abs(mean(mse) - mean(crit)) / mean(crit);
    ok = ok && rel <= 0.10;
    detail += fmt("kappa=(%.1f,%.1f) ", config.kappa[0], config.kappa[1]) + settings[s].sigma +
              fmt(": mse %.4g vs ffpe %.4g (%.1f%%)", mean(mse), mean(crit), 100.0 * rel);
    if (s + 1 < settings.size()) detail += "; ";
  }
  return {ok, detail};
}

Verdict vector_vs_scalar() {
  auto run = [](const std::string& preset) {
    ExperimentConfig config = preset_config(preset);
    config.seed = 505;
    std::vector<double> ratios;
    for (const auto& rep : run_forecast_experiment(config).replications) ratios.push_back(*rep.ratio);
    return ratios;
  };
  const auto r1 = run("psi1-ratio");
  const auto r2 = run("psi2-ratio");
  const double below = static_cast<double>(std::count_if(r1.begin(), r1.end(), [](double r) { return r < 1.0; })) /
                       static_cast<double>(r1.size());
  const double m1 = median(r1), m2 = median(r2);
  const bool ok = m1 < 0.75 && below >= 0.8 && m2 >= 0.9 && m2 <= 1.15;
  return {ok, fmt("psi1 median r %.3f, r<1 in %.0f%%; psi2 median r %.3f", m1, 100.0 * below, m2)};
}

Verdict beyond_far() {
  ExperimentConfig config = preset_config("fma-farma");
  config.seed = 606;
  const RunReport report = run_forecast_experiment(config);
  double order = 0.0;
  int wins = 0;
  for (const auto& rep : report.replications) {
    order += static_cast<double>(rep.p);
    if (summarize(rep.errors[0]).mse < summarize(rep.errors[1]).mse) ++wins;
  }
  order /= static_cast<double>(report.replications.size());
  const double share = static_cast<double>(wins) / static_cast<double>(report.replications.size());
  const bool ok = order >= 3.0 && order <= 7.0 && share >= 0.7;
  return {ok, fmt("mean selected p %.2f, fFPE beats baseline in %.0f%% of %g runs", order, 100.0 * share,
                  static_cast<double>(report.replications.size()))};
}

Verdict truncation_bound() {
  const Matrix psi = fixed_psi(FixedPsi::psi2);
  const Vector sigma = sigma_scheme(SigmaScheme::s1, 3);
  const ProcessSpec spec = far_spec(psi, {1.0}, sigma);
  const auto gamma = population_covariance(spec, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gamma[0]);
  const Vector lambda = es.eigenvalues().reverse();
  const Matrix v = es.eigenvectors().rowwise().reverse();
  const Matrix psi_eig = v.transpose() * psi * v;
  const double sigma2 = sigma.squaredNorm();

  Rng rng(707);
  const Index n = 40000;
  const Matrix y = simulate_coefficients(spec, n, rng);
  bool ok = true;
  std::string detail;
  for (Index d = 1; d <= 3; ++d) {
    const Matrix vd = v.leftCols(d);
    const Matrix g0 = vd.transpose() * gamma[0] * vd;
    const Matrix g1 = vd.transpose() * gamma[1] * vd;
    const Matrix coef = g0.ldlt().solve(g1.transpose()).transpose();
    Vector err(n - 1);
    for (Index k = 1; k < n; ++k) {
      const Vector pred = vd * (coef * (vd.transpose() * y.row(k - 1).transpose()));
      err(k - 1) = (y.row(k).transpose() - pred).squaredNorm();
    }
    const double m = err.mean();
    const double se = std::sqrt((err.array() - m).square().sum() / static_cast<double>(n - 2) /
                                static_cast<double>(n - 1));
    const double bound = sigma2 + bias_bound({psi_eig}, lambda, d);
    ok = ok && m <= bound + 3.0 * se;
    detail += fmt("d=%g: mse %.4f <= %.4f + 3*%.4f", static_cast<double>(d), m, bound, se);
    if (d < 3) detail += "; ";
  }
  return {ok, detail};
}

Verdict innovations_oracle() {
  double worst = 0.0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    Rng rng(replication_seed(808, r));
    const Index d = 1 + static_cast<Index>(r % 3);
    AcvfSequence acvf;
    if (r % 2 == 0) {
      std::vector<Matrix> c;
      for (int j = 0; j < 5; ++j) c.push_back(testing::gaussian(d, d, rng, 1.0 / (1.0 + j)));
      acvf.sample_size = 1000;
      for (Index h = 0; h <= 4; ++h) {
        Matrix g = Matrix::Zero(d, d);
        for (Index j = 0; j + h < 5; ++j) g += c[static_cast<std::size_t>(j + h)] * c[static_cast<std::size_t>(j)].transpose();
        acvf.lags.push_back(g);
      }
    } else {
      acvf = sample_acvf(testing::gaussian(60, d, rng), 4);
    }
    for (Index m = 1; m <= 4; ++m) {
      AcvfSequence head = acvf;
      head.lags.resize(static_cast<std::size_t>(m + 1));
      const Matrix window = testing::gaussian(m, d, rng);
      const Vector a = innovations_predict(innovations(head, m), window);
      const Vector b = testing::direct_projection(head.lags, window);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-8, fmt("max deviation %.3g over 50 instances, m = 1..4", worst)};
}

Verdict band_coverage() {
  const Index reps = 100;
  std::vector<int> covered(reps);
  std::vector<double> in_sample(reps);
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
    Rng rng(replication_seed(909, r));
    const Vector sigma = sigma_scheme(SigmaScheme::s1, 21);
    const Matrix psi = random_operator(21, sigma, rng);
    const FunctionalDataset all = simulate(far_spec(psi, {0.8}, sigma), 401, Grid(256), rng);
    const FunctionalDataset data = all.slice(0, 400);
    const Index d = 3, p = 1;
    const FunctionalDataset res = rolling_residuals(data, d, p, default_warmup(400, d, p));
    const PredictionBand band = prediction_band(res, 0.8);
    in_sample[r] = coverage(band, res);
    const Vector next = predict_fts(data, 1, FixedOrder{p, d}).curve();
    covered[r] = band.covers(Vector(all.values().row(400).transpose() - next)) ? 1 : 0;
  });
  const double out = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / static_cast<double>(reps);
  const double worst_in = *std::min_element(in_sample.begin(), in_sample.end());
  const bool ok = out >= 0.7 && out <= 0.9 && worst_in >= 0.8;
  return {ok, fmt("out-of-sample coverage %.2f, smallest in-sample coverage %.3f", out, worst_in)};
}

Verdict covariate_gain() {
  ExperimentConfig config = preset_config("covariate");
  config.seed = 1010;
  const RunReport report = run_forecast_experiment(config);
  int wins = 0;
  std::vector<double> with, without;
  for (const auto& rep : report.replications) {
    with.push_back(summarize(rep.errors[0]).mse);
    without.push_back(summarize(rep.errors[1]).mse);
    if (with.back() <= without.back()) ++wins;
  }
  const double share = static_cast<double>(wins) / static_cast<double>(report.replications.size());
  return {share >= 0.7, fmt("covariate no worse in %.0f%% of runs; mean mse %.4f vs %.4f", 100.0 * share,
                            mean(with), mean(without))};
}

Verdict determinism() {
  bool ok = true;
  std::string detail;
  for (const auto& name : preset_names()) {
    ExperimentConfig config = preset_config(name);
    config.reps = 3;
    config.seed = 1111;
    const auto a = run_forecast_experiment(config).to_json().at("replications").dump();
    setenv("FTSP_THREADS", "1", 1);
    const auto b = run_forecast_experiment(config).to_json().at("replications").dump();
    unsetenv("FTSP_THREADS");
    const bool same = a == b;
    ok = ok && same;
    detail += name + (same ? " identical" : " DIFFERS");
    if (name != preset_names().back()) detail += "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"fpca identities", fpca_identities},
      {"equivalence rate", equivalence_rate},
      {"order selection", order_selection},
      {"ffpe matches out-of-sample mse", ffpe_consistency},
      {"vector versus scalar", vector_vs_scalar},
      {"farma order and gain", beyond_far},
      {"truncation bias bound", truncation_bound},
      {"innovations oracle", innovations_oracle},
      {"uniform band coverage", band_coverage},
      {"covariate gain", covariate_gain},
      {"benchmark determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("[%s] criterion %zu %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
