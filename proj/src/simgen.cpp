#include "ftsp/simgen.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "ftsp/errors.hpp"

namespace ftsp {

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, Index dim) {
  require(j.is_array() && static_cast<Index>(j.size()) == dim, ErrorKind::parse,
          "operator must have " + std::to_string(dim) + " rows");
  Matrix m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Index>(row.size()) == dim, ErrorKind::parse,
            "operator row " + std::to_string(i) + " must have " + std::to_string(dim) + " entries");
    for (Index k = 0; k < dim; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

}  // namespace

std::string_view kind_name(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::far: return "far";
    case ProcessKind::fma: return "fma";
    case ProcessKind::farma: return "farma";
  }
  return "unknown";
}

void ProcessSpec::validate() const {
  require(dim >= 1, ErrorKind::dimension, "process dimension must be positive");
  require(sigma.size() == dim, ErrorKind::dimension,
          "sigma has " + std::to_string(sigma.size()) + " entries, expected " + std::to_string(dim));
  require((sigma.array() > 0.0).all() && sigma.allFinite(), ErrorKind::out_of_range,
          "sigma entries must be positive");
  require(burn_in >= 0, ErrorKind::out_of_range, "burn-in must be nonnegative");
  for (const auto& op : ar)
    require(op.rows() == dim && op.cols() == dim, ErrorKind::dimension, "AR operator shape mismatch");
  for (const auto& term : ma) {
    require(term.lag >= 1, ErrorKind::out_of_range, "MA lags start at 1");
    require(term.op.rows() == dim && term.op.cols() == dim, ErrorKind::dimension,
            "MA operator shape mismatch");
  }
  if (!ar.empty()) {
    const double radius = companion_spectral_radius(ar);
    require(radius < 1.0, ErrorKind::nonstationary,
            "companion spectral radius " + std::to_string(radius) + " is not below 1");
  }
}

Vector sigma_scheme(SigmaScheme which, Index dim) {
  require(dim >= 1, ErrorKind::dimension, "sigma scheme needs D >= 1");
  Vector out(dim);
  for (Index l = 0; l < dim; ++l) {
    const double ell = static_cast<double>(l + 1);
    out(l) = which == SigmaScheme::s1 ? 1.0 / ell : std::pow(1.2, -ell);
  }
  return out;
}

Matrix fixed_psi(FixedPsi which) {
  Matrix out(3, 3);
  if (which == FixedPsi::psi1)
    out << -0.05, -0.23, 0.76,
            0.80, -0.05, 0.04,
            0.04,  0.76, 0.23;
  else
    out = 0.8 * Matrix::Identity(3, 3);
  return out;
}

double operator_norm(const Matrix& op) {
  if (op.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(op);
  return svd.singularValues()(0);
}

double companion_spectral_radius(const std::vector<Matrix>& ar) {
  if (ar.empty()) return 0.0;
  const Index d = ar.front().rows();
  const Index p = static_cast<Index>(ar.size());
  Matrix companion = Matrix::Zero(p * d, p * d);
  for (Index j = 0; j < p; ++j) companion.block(0, j * d, d, d) = ar[static_cast<std::size_t>(j)];
  if (p > 1) companion.bottomLeftCorner((p - 1) * d, (p - 1) * d).setIdentity();
  Eigen::EigenSolver<Matrix> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix random_operator(Index dim, const Vector& sigma, Rng& rng) {
  require(dim >= 1 && sigma.size() == dim, ErrorKind::dimension, "random operator: sigma length must equal D");
  const Matrix scale = sigma * sigma.transpose();
  for (;;) {
    const Matrix draw = standard_normal(dim, dim, rng).cwiseProduct(scale);
    const double norm = operator_norm(draw);
    if (norm > 0.0) return draw / norm;
  }
}

ProcessSpec far_spec(const Matrix& psi, const std::vector<double>& kappa, const Vector& sigma) {
  ProcessSpec spec;
  spec.kind = ProcessKind::far;
  spec.dim = psi.rows();
  for (double k : kappa) spec.ar.push_back(k * psi);
  spec.sigma = sigma;
  return spec;
}

ProcessSpec fma_spec(const Matrix& psi, const Vector& sigma) {
  ProcessSpec spec;
  spec.kind = ProcessKind::fma;
  spec.dim = psi.rows();
  spec.ma.push_back({2, 0.8 * psi});
  spec.sigma = sigma;
  return spec;
}

ProcessSpec farma_spec(const Matrix& psi, const Vector& sigma) {
  ProcessSpec spec;
  spec.kind = ProcessKind::farma;
  spec.dim = psi.rows();
  spec.ar.push_back(0.1 * psi);
  spec.ma.push_back({1, 0.1 * psi});
  spec.ma.push_back({2, 0.9 * psi});
  spec.sigma = sigma;
  return spec;
}

Matrix simulate_coefficients(const ProcessSpec& spec, Index n, Rng& rng, Matrix* innovations) {
  spec.validate();
  require(n >= 1, ErrorKind::out_of_range, "simulate: n must be positive");
  const Index total = spec.burn_in + n;
  const Index dim = spec.dim;
  Matrix eps = standard_normal(total, dim, rng) * spec.sigma.asDiagonal();
  Matrix y = Matrix::Zero(total, dim);
  for (Index k = 0; k < total; ++k) {
    Vector next = eps.row(k).transpose();
    for (Index j = 1; j <= spec.ar_order() && j <= k; ++j)
      next.noalias() += spec.ar[static_cast<std::size_t>(j - 1)] * y.row(k - j).transpose();
    for (const auto& term : spec.ma)
      if (term.lag <= k) next.noalias() += term.op * eps.row(k - term.lag).transpose();
    y.row(k) = next.transpose();
  }
  if (innovations) *innovations = eps.bottomRows(n);
  return y.bottomRows(n);
}

FunctionalDataset simulate(const ProcessSpec& spec, Index n, const Grid& grid, Rng& rng) {
  const FourierBasis basis = make_fourier_basis(spec.dim, grid);
  return synthesize(simulate_coefficients(spec, n, rng), basis);
}

double bias_bound(const std::vector<Matrix>& ar, const Vector& eigenvalues, Index d) {
  const Index dim = eigenvalues.size();
  require(d >= 0 && d <= dim, ErrorKind::out_of_range,
          "bias bound: d = " + std::to_string(d) + " exceeds D = " + std::to_string(dim));
  double psi_sum = 0.0;
  for (const auto& op : ar) {
    require(op.cols() == dim, ErrorKind::dimension, "bias bound: operator size differs from eigenvalue count");
    psi_sum += std::sqrt(op.rightCols(dim - d).squaredNorm());
  }
  return (1.0 + psi_sum * psi_sum) * eigenvalues.tail(dim - d).sum();
}

std::vector<Matrix> population_covariance(const ProcessSpec& spec, Index max_lag) {
  spec.validate();
  const Index dim = spec.dim;
  const Matrix noise = spec.sigma.cwiseAbs2().asDiagonal();
  Index max_ma = 0;
  for (const auto& term : spec.ma) max_ma = std::max(max_ma, term.lag);

  std::vector<Matrix> weights{Matrix::Identity(dim, dim)};
  constexpr Index kMaxTerms = 20000;
  for (Index j = 1; j < kMaxTerms; ++j) {
    Matrix c = Matrix::Zero(dim, dim);
    for (const auto& term : spec.ma)
      if (term.lag == j) c += term.op;
    for (Index i = 1; i <= std::min(spec.ar_order(), j); ++i)
      c.noalias() += spec.ar[static_cast<std::size_t>(i - 1)] * weights[static_cast<std::size_t>(j - i)];
    weights.push_back(std::move(c));
    if (j > max_ma + max_lag) {
      double recent = 0.0;
      for (Index i = 0; i < std::max<Index>(spec.ar_order(), 1); ++i)
        recent += weights[static_cast<std::size_t>(j - i)].squaredNorm();
      if (recent < 1e-32) break;
    }
  }
  const Index terms = static_cast<Index>(weights.size());
  std::vector<Matrix> out;
  for (Index h = 0; h <= max_lag; ++h) {
    Matrix g = Matrix::Zero(dim, dim);
    for (Index j = 0; j + h < terms; ++j)
      g.noalias() += weights[static_cast<std::size_t>(j + h)] * noise * weights[static_cast<std::size_t>(j)].transpose();
    out.push_back(std::move(g));
  }
  return out;
}

nlohmann::json to_json(const ProcessSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  j["dim"] = spec.dim;
  j["burn_in"] = spec.burn_in;
  j["sigma"] = std::vector<double>(spec.sigma.data(), spec.sigma.data() + spec.sigma.size());
  j["ar"] = nlohmann::json::array();
  for (const auto& op : spec.ar) j["ar"].push_back(matrix_json(op));
  j["ma"] = nlohmann::json::array();
  for (const auto& term : spec.ma) j["ma"].push_back({{"lag", term.lag}, {"op", matrix_json(term.op)}});
  return j;
}

ProcessSpec process_spec_from_json(const nlohmann::json& j) {
  ProcessSpec spec;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "far")
      spec.kind = ProcessKind::far;
    else if (kind == "fma")
      spec.kind = ProcessKind::fma;
    else if (kind == "farma")
      spec.kind = ProcessKind::farma;
    else
      fail(ErrorKind::parse, "unknown process kind '" + kind + "'");
    spec.dim = j.at("dim").get<Index>();
    spec.burn_in = j.value("burn_in", Index{200});
    const auto sigma = j.at("sigma").get<std::vector<double>>();
    spec.sigma = Eigen::Map<const Vector>(sigma.data(), static_cast<Index>(sigma.size()));
    for (const auto& op : j.value("ar", nlohmann::json::array())) spec.ar.push_back(matrix_from_json(op, spec.dim));
    for (const auto& term : j.value("ma", nlohmann::json::array()))
      spec.ma.push_back({term.at("lag").get<Index>(), matrix_from_json(term.at("op"), spec.dim)});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("process spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

CovariatePair simulate_covariate_pair(Index n, const Grid& grid, Rng& rng) {
  constexpr Index kDim = 5;
  constexpr Index kBurn = 200;
  Vector sigma(kDim);
  sigma << 1.0, 0.4, 0.3, 0.2, 0.15;
  const Matrix psi = 0.6 * random_operator(kDim, sigma, rng);
  Matrix load(kDim, 2);
  load << 0.6, 0.3,
          0.2, 0.3,
          0.1, 0.1,
          0.0, 0.1,
          0.0, 0.0;

  std::normal_distribution<double> normal(0.0, 1.0);
  const Index total = kBurn + n;
  Matrix x = Matrix::Zero(total, kDim);
  Matrix y = Matrix::Zero(total, kDim);
  for (Index k = 0; k < total; ++k) {
    Vector xk(kDim);
    for (Index l = 0; l < kDim; ++l) xk(l) = 0.05 * normal(rng);
    Vector yk(kDim);
    for (Index l = 0; l < kDim; ++l) yk(l) = sigma(l) * normal(rng);
    if (k > 0) {
      xk.segment(1, 2) += 0.6 * x.row(k - 1).segment(1, 2).transpose();
      yk += psi * y.row(k - 1).transpose() + load * x.row(k - 1).segment(1, 2).transpose();
    }
    xk(1) += normal(rng);
    xk(2) += normal(rng);
    x.row(k) = xk.transpose();
    y.row(k) = yk.transpose();
  }
  const FourierBasis basis = make_fourier_basis(kDim, grid);
  return {synthesize(y.bottomRows(n), basis), synthesize(x.bottomRows(n), basis)};
}

void write_pm10_analog_csv(std::ostream& out, Index days, Rng& rng) {
  constexpr Index kSlots = 48;
  const Grid grid(kSlots);
  const CovariatePair pair = simulate_covariate_pair(days, grid, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double weekday_level[7] = {0.3, 0.35, 0.35, 0.3, 0.25, -0.4, -0.6};
  out << "day,weekday,slot,value\n";
  char buf[64];
  for (Index k = 0; k < days; ++k) {
    const int weekday = static_cast<int>(k % 7);
    for (Index s = 0; s < kSlots; ++s) {
      const double t = grid.point(s);
      const double root = 6.0 + 1.2 * std::sin(2.0 * M_PI * (t - 0.25)) +
                          weekday_level[weekday] * std::sin(M_PI * t) + 0.5 * pair.response.values()(k, s);
      out << k << ',' << weekday << ',' << s << ',';
      if (unit(rng) >= 0.01) {
        std::snprintf(buf, sizeof buf, "%.17g", std::max(root, 0.5) * std::max(root, 0.5));
        out << buf;
      }
      out << '\n';
    }
  }
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ftsp
