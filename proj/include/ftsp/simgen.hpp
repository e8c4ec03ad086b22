#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string_view>
#include <vector>

#include "ftsp/curves.hpp"
#include "json.hpp"

namespace ftsp {

using Rng = std::mt19937_64;

enum class ProcessKind { far, fma, farma };
enum class SigmaScheme { s1, s2 };
enum class FixedPsi { psi1, psi2 };

std::string_view kind_name(ProcessKind kind);

struct MaTerm {
  Index lag = 1;
  Matrix op;
};

/// Linear process on Fourier coordinates:
/// y_k = sum_j ar[j-1] y_{k-j} + e_k + sum_m ma[m].op e_{k - ma[m].lag},  e_k ~ N(0, diag(sigma^2)).
struct ProcessSpec {
  ProcessKind kind = ProcessKind::far;
  Index dim = 0;
  std::vector<Matrix> ar;
  std::vector<MaTerm> ma;
  Vector sigma;
  Index burn_in = 200;

  Index ar_order() const noexcept { return static_cast<Index>(ar.size()); }
  /// Throws on shape errors, non-positive sigma, or a non-stationary AR part.
  void validate() const;
};

Vector sigma_scheme(SigmaScheme which, Index dim);
Matrix fixed_psi(FixedPsi which);

/// Gaussian matrix with entry sd sigma_l * sigma_l', rescaled to operator norm 1.
Matrix random_operator(Index dim, const Vector& sigma, Rng& rng);

/// Largest singular value.
double operator_norm(const Matrix& op);
/// Spectral radius of the companion matrix of the AR polynomial (0 for an empty list).
double companion_spectral_radius(const std::vector<Matrix>& ar);

ProcessSpec far_spec(const Matrix& psi, const std::vector<double>& kappa, const Vector& sigma);
/// Y_k = e_k + 0.8 Psi e_{k-2}.
ProcessSpec fma_spec(const Matrix& psi, const Vector& sigma);
/// Y_k = 0.1 Psi Y_{k-1} + e_k + 0.1 Psi e_{k-1} + 0.9 Psi e_{k-2}.
ProcessSpec farma_spec(const Matrix& psi, const Vector& sigma);

/// n x D coefficient path after burn-in; optionally returns the matching innovations.
Matrix simulate_coefficients(const ProcessSpec& spec, Index n, Rng& rng, Matrix* innovations = nullptr);
FunctionalDataset simulate(const ProcessSpec& spec, Index n, const Grid& grid, Rng& rng);

/// gamma_d = (1 + (sum_j psi_{j;d})^2) * sum_{l>d} lambda_l.
double bias_bound(const std::vector<Matrix>& ar, const Vector& eigenvalues, Index d);

/// Gamma(0..max_lag) of the coefficient process via its MA(infinity) weights.
std::vector<Matrix> population_covariance(const ProcessSpec& spec, Index max_lag);

nlohmann::json to_json(const ProcessSpec& spec);
ProcessSpec process_spec_from_json(const nlohmann::json& j);

/// Functional response driven by a lagged functional covariate.
struct CovariatePair {
  FunctionalDataset response;
  FunctionalDataset covariate;
};

/// Response: 5 Fourier coordinates, FAR(1) plus B x_{k-1}; covariate: AR(1) on 2 coordinates.
CovariatePair simulate_covariate_pair(Index n, const Grid& grid, Rng& rng);

/// Long-format daily series (day, weekday, slot, value) with 48 slots, weekday effects,
/// strictly positive values and about 1% missing cells.
void write_pm10_analog_csv(std::ostream& out, Index days, Rng& rng);

/// Independent per-replication seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index);

}  // namespace ftsp
