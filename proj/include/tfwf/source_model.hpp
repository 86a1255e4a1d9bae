#pragma once

#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "tfwf/grid.hpp"
#include "tfwf/heat_channel.hpp"
#include "tfwf/io.hpp"
#include "tfwf/weyl.hpp"

namespace tfwf {

/// Nonstationary Gaussian source x = sum_k X_k g_k, X_k ~ N(0, sigma^2 lambda_k)
/// independent, truncated after k_trunc terms.
struct SourceConfig {
  Grid2D grid;
  /// Descending lambda_k (the full list; only the first k_trunc are sampled).
  Eigen::VectorXd lambdas;
  /// g_k sampled on the grid, orthonormal as grid functions; at least k_trunc columns.
  Eigen::MatrixXd g;
  double sigma2 = 1.0;
  Eigen::Index k_trunc = 0;
  std::uint64_t seed = 0;
  /// E(r) the truncation is checked against; 0 means sigma^2 sum lambda_k.
  double reference_energy = 0.0;

  double energy() const;
  double truncated_energy() const;
};

/// Smallest K whose partial sum of lambdas reaches (1 - tail) of the total.
Eigen::Index truncation_order(const Eigen::VectorXd& lambdas, double tail = 1e-4);

/// Heat-channel source on `grid` with analytic eigenvalues and dilated Hermite g_k.
SourceConfig heat_source(const HeatChannelModel& m, const Grid2D& grid, double sigma2, std::uint64_t seed,
                         double tail = 1e-4);

/// Source built from a computed singular system (uses its left vectors g_k).
SourceConfig spectral_source(const SpectralData<double>& spec, double sigma2, std::uint64_t seed,
                             double tail = 1e-4);

/// Throws DomainError unless the first k_trunc terms hold at least 0.9999 E(r).
void validate_source(const SourceConfig& cfg);

struct Realization {
  /// X_0, ..., X_{k_trunc - 1}.
  Eigen::VectorXd coefficients;
  /// x(t_i).
  Eigen::VectorXd samples;
};

/// Draw number `draw` of the source; draws use independent RNG substreams of cfg.seed.
Realization sample_realization(const SourceConfig& cfg, std::uint64_t draw);

/// Wigner-Ville spectrum Phi = (sigma^2 / 2 pi) sigma_{P P^*} from the kernel of P P^*.
template <typename Scalar>
SampledSymbol wvs(const DiscreteOperator<Scalar>& pp_star, double sigma2) {
  auto out = kernel_to_symbol(pp_star);
  out.values *= sigma2 / (2.0 * std::numbers::pi);
  return out;
}

/// Principal term (sigma^2 / 2 pi) |p_r|^2 on the lattice of `like`.
Eigen::MatrixXd principal_term(const WeylSymbol& p, double r, double sigma2, const SampledSymbol& like);

/// Sample autocorrelation (1/N) sum_n x_n x_n^T over draws 0..n_draws-1.
Eigen::MatrixXd empirical_autocorrelation(const SourceConfig& cfg, std::uint64_t n_draws);

/// Average Wigner distribution of draws 0..n_draws-1 (n_draws >= 100).
/// Identical to (1/2 pi) times the discrete Wigner transform of the sample
/// autocorrelation, which is how it is computed.
SampledSymbol empirical_wvs(const SourceConfig& cfg, std::uint64_t n_draws);

/// Columns t, x.
CsvTable realization_csv(const Grid2D& grid, const Eigen::VectorXd& x);

/// Columns t, omega, phi, principal (real parts).
CsvTable wvs_csv(const SampledSymbol& phi, const Eigen::MatrixXd& principal);

}  // namespace tfwf
