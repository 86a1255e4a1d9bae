#include "tfwf/source_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tfwf/errors.hpp"
#include "tfwf/random.hpp"
#include "tfwf/special_functions.hpp"

namespace tfwf {

double SourceConfig::energy() const {
  return reference_energy > 0.0 ? reference_energy : sigma2 * lambdas.sum();
}

double SourceConfig::truncated_energy() const { return sigma2 * lambdas.head(k_trunc).sum(); }

Eigen::Index truncation_order(const Eigen::VectorXd& lambdas, double tail) {
  if (!(tail >= 0.0 && tail < 1.0)) throw DomainError("truncation_order: tail must lie in [0, 1)");
  const double target = (1.0 - tail) * lambdas.sum();
  double partial = 0.0;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    partial += lambdas(k);
    if (partial >= target) return k + 1;
  }
  return lambdas.size();
}

SourceConfig heat_source(const HeatChannelModel& m, const Grid2D& grid, double sigma2, std::uint64_t seed,
                         double tail) {
  if (!(sigma2 >= 0.0)) throw DomainError("heat_source: sigma^2 must be non-negative");
  SourceConfig cfg{grid, eigenvalues(m, 1e-16), Eigen::MatrixXd(), sigma2, 0, seed, sigma2 * eigenvalue_sum(m)};
  // Truncate against the analytic total, not the finite list.
  const double target = (1.0 - tail) * eigenvalue_sum(m);
  double partial = 0.0;
  while (cfg.k_trunc < cfg.lambdas.size() && partial < target) partial += cfg.lambdas(cfg.k_trunc++);

  const HermiteBasis<double> basis(m.gamma, static_cast<int>(cfg.k_trunc) - 1);
  cfg.g.resize(grid.n_t(), cfg.k_trunc);
  for (Eigen::Index i = 0; i < grid.n_t(); ++i) cfg.g.row(i) = basis.all(grid.t(i)).transpose();
  if (sigma2 > 0.0) validate_source(cfg);
  return cfg;
}

SourceConfig spectral_source(const SpectralData<double>& spec, double sigma2, std::uint64_t seed, double tail) {
  if (!spec.has_vectors()) throw DomainError("spectral_source: singular vectors required");
  if (!(sigma2 >= 0.0)) throw DomainError("spectral_source: sigma^2 must be non-negative");
  SourceConfig cfg{spec.grid, spec.lambdas, Eigen::MatrixXd(), sigma2, 0, seed, 0.0};
  cfg.k_trunc = truncation_order(spec.lambdas, tail);
  cfg.g = spec.g.leftCols(cfg.k_trunc);
  return cfg;
}

void validate_source(const SourceConfig& cfg) {
  if (cfg.k_trunc < 0 || cfg.k_trunc > cfg.lambdas.size() || cfg.g.cols() < cfg.k_trunc ||
      cfg.g.rows() != cfg.grid.n_t())
    throw DomainError("source: truncation order or basis shape is inconsistent");
  const double e = cfg.energy();
  if (e > 0.0 && cfg.truncated_energy() < 0.9999 * e) {
    std::ostringstream msg;
    msg << "source: first " << cfg.k_trunc << " terms hold " << cfg.truncated_energy() / e
        << " of E(r); at least 0.9999 required";
    throw DomainError(msg.str());
  }
}

namespace {

Eigen::VectorXd draw_coefficients(const SourceConfig& cfg, std::uint64_t draw) {
  Rng rng(cfg.seed, {0x736f75726365ULL, draw});
  Eigen::VectorXd x(cfg.k_trunc);
  for (Eigen::Index k = 0; k < cfg.k_trunc; ++k) x(k) = std::sqrt(cfg.sigma2 * cfg.lambdas(k)) * rng.normal();
  return x;
}

}  // namespace

Realization sample_realization(const SourceConfig& cfg, std::uint64_t draw) {
  validate_source(cfg);
  Realization out;
  out.coefficients = draw_coefficients(cfg, draw);
  out.samples = cfg.g.leftCols(cfg.k_trunc) * out.coefficients;
  return out;
}

Eigen::MatrixXd principal_term(const WeylSymbol& p, double r, double sigma2, const SampledSymbol& like) {
  return sample_abs_power(p, r, like, 2) * (sigma2 / (2.0 * std::numbers::pi));
}

Eigen::MatrixXd empirical_autocorrelation(const SourceConfig& cfg, std::uint64_t n_draws) {
  validate_source(cfg);
  if (n_draws == 0) throw DomainError("empirical_autocorrelation: need at least one draw");
  // Accumulate in coefficient space; R = G C G^T.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(cfg.k_trunc, cfg.k_trunc);
  for (std::uint64_t n = 0; n < n_draws; ++n) {
    const Eigen::VectorXd x = draw_coefficients(cfg, n);
    c.selfadjointView<Eigen::Lower>().rankUpdate(x);
  }
  c = c.selfadjointView<Eigen::Lower>();
  c /= static_cast<double>(n_draws);
  const auto g = cfg.g.leftCols(cfg.k_trunc);
  return g * c * g.transpose();
}

SampledSymbol empirical_wvs(const SourceConfig& cfg, std::uint64_t n_draws) {
  if (n_draws < 100) throw DomainError("empirical_wvs: at least 100 draws required");
  RealOperator kernel{cfg.grid, empirical_autocorrelation(cfg, n_draws) * cfg.grid.dt()};
  auto out = kernel_to_symbol(kernel);
  out.values /= 2.0 * std::numbers::pi;
  return out;
}

CsvTable realization_csv(const Grid2D& grid, const Eigen::VectorXd& x) {
  if (x.size() != grid.n_t()) throw DomainError("realization_csv: sample count does not match grid");
  CsvTable table({"t", "x"});
  for (Eigen::Index i = 0; i < x.size(); ++i) table.add_row({grid.t(i), x(i)});
  return table;
}

CsvTable wvs_csv(const SampledSymbol& phi, const Eigen::MatrixXd& principal) {
  if (principal.rows() != phi.values.rows() || principal.cols() != phi.values.cols())
    throw DomainError("wvs_csv: principal term does not match the WVS lattice");
  CsvTable table({"t", "omega", "phi", "principal"});
  for (Eigen::Index i = 0; i < phi.values.rows(); ++i)
    for (Eigen::Index k = 0; k < phi.values.cols(); ++k)
      table.add_row({phi.t(i), phi.omega(k), phi.values(i, k).real(), principal(i, k)});
  return table;
}

}  // namespace tfwf
