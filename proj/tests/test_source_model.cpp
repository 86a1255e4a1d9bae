#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "tfwf/errors.hpp"
#include "tfwf/grid.hpp"
#include "tfwf/heat_channel.hpp"
#include "tfwf/source_model.hpp"
#include "tfwf/weyl.hpp"

using namespace tfwf;

namespace {

struct Setup {
  HeatChannelModel m;
  WeylSymbol p;
  Grid2D grid;
};

Setup setup(double gamma, double r) {
  GridOptions opts;
  opts.oversample = 2.0;
  auto p = heat_symbol(gamma);
  auto grid = grid_for_symbol(p, r, opts);
  return {heat_model(gamma, r), p, grid};
}

}  // namespace

TEST_CASE("truncation order") {
  Eigen::VectorXd lam(4);
  lam << 0.5, 0.25, 0.125, 0.125;
  CHECK(truncation_order(lam, 0.5) == 1);
  CHECK(truncation_order(lam, 0.2) == 3);
  CHECK(truncation_order(lam, 0.0) == 4);
  CHECK_THROWS_AS(truncation_order(lam, 1.0), DomainError);
}

TEST_CASE("heat source keeps the energy of the analytic spectrum") {
  const auto s = setup(1.0, 2.0);
  const auto cfg = heat_source(s.m, s.grid, 1.0, 3);
  CHECK(cfg.energy() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cfg.truncated_energy() >= 0.9999 * cfg.energy());
  const Eigen::MatrixXd gram = s.grid.dt() * cfg.g.transpose() * cfg.g;
  CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("projection on g_0 has variance sigma^2 lambda_0") {
  const auto s = setup(1.0, 2.0);
  const double sigma2 = 1.5;
  const auto cfg = heat_source(s.m, s.grid, sigma2, 11);
  const int n = 10000;
  double sum = 0.0;
  double sum2 = 0.0;
  double energy = 0.0;
  for (int d = 0; d < n; ++d) {
    const auto x = sample_realization(cfg, d);
    const double proj = s.grid.dt() * cfg.g.col(0).dot(x.samples);
    sum += proj;
    sum2 += proj * proj;
    energy += x.samples.squaredNorm() * s.grid.dt();
  }
  const double var = sum2 / n - (sum / n) * (sum / n);
  const double expect = sigma2 * eigenvalue(s.m, 0);
  // Relative standard error of a variance estimate is sqrt(2 / n), about 1.4%.
  CHECK(std::abs(var / expect - 1.0) < 0.05);
  CHECK(std::abs(energy / n / (sigma2 * 2.0) - 1.0) < 0.02);
}

TEST_CASE("draws are deterministic and independent of order") {
  const auto s = setup(1.0, 1.0);
  const auto cfg = heat_source(s.m, s.grid, 1.0, 5);
  const auto a = sample_realization(cfg, 7);
  sample_realization(cfg, 3);
  const auto b = sample_realization(cfg, 7);
  CHECK(a.samples == b.samples);
  CHECK(!(sample_realization(cfg, 8).samples == a.samples));
}

TEST_CASE("zero variance source is silent") {
  const auto s = setup(1.0, 1.0);
  const auto cfg = heat_source(s.m, s.grid, 0.0, 5);
  CHECK(sample_realization(cfg, 0).samples.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(heat_source(s.m, s.grid, -1.0, 5), DomainError);
}

TEST_CASE("wigner-ville spectrum carries the source energy") {
  for (double r : {1.0, 2.0, 4.0}) {
    const auto s = setup(1.0, r);
    const auto kernel = symbol_to_real_kernel(s.p, r, s.grid);
    const auto phi = wvs(cogram(kernel), 2.0);
    const double closed = 2.0 * eigenvalue_sum(s.m);
    CHECK(phi.integral().real() == doctest::Approx(closed).epsilon(1e-8));
    CHECK(std::abs(phi.integral().imag()) < 1e-12 * closed);
    // The heat channel's P P^* has a Gaussian symbol, so the spectrum is nonnegative.
    CHECK(phi.values.real().minCoeff() > -1e-10 * phi.values.real().maxCoeff());
    // Principal term integrates to the same energy.
    const Eigen::MatrixXd principal = principal_term(s.p, r, 2.0, phi);
    CHECK(principal.sum() * phi.dt * phi.d_omega == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("wigner-ville spectrum approaches the principal term") {
  double prev = 1e300;
  for (double r : {1.0, 2.0, 4.0}) {
    const auto s = setup(1.0, r);
    const auto phi = wvs(cogram(symbol_to_real_kernel(s.p, r, s.grid)), 1.0);
    const Eigen::MatrixXd principal = principal_term(s.p, r, 1.0, phi);
    const double rel = (phi.values.real() - principal).norm() / principal.norm();
    CHECK(rel < prev);
    prev = rel;
  }
}

TEST_CASE("empirical autocorrelation and spectrum") {
  const auto s = setup(1.0, 2.0);
  const auto cfg = heat_source(s.m, s.grid, 1.0, 21);
  const auto g = cfg.g.leftCols(cfg.k_trunc);
  const Eigen::MatrixXd exact = g * cfg.lambdas.head(cfg.k_trunc).asDiagonal() * g.transpose();
  const Eigen::MatrixXd emp = empirical_autocorrelation(cfg, 10000);
  CHECK((emp - exact).norm() / exact.norm() < 0.05);

  const auto phi = wvs(cogram(symbol_to_real_kernel(s.p, 2.0, s.grid)), 1.0);
  const auto ephi = empirical_wvs(cfg, 10000);
  CHECK((ephi.values - phi.values).norm() / phi.values.norm() < 0.05);
  CHECK_THROWS_AS(empirical_wvs(cfg, 50), DomainError);
}

TEST_CASE("csv exports") {
  const auto s = setup(1.0, 1.0);
  const auto cfg = heat_source(s.m, s.grid, 1.0, 5);
  const auto x = sample_realization(cfg, 0);
  const auto table = realization_csv(s.grid, x.samples);
  CHECK(table.rows() == static_cast<std::size_t>(s.grid.n_t()));
  CHECK(table.header() == std::vector<std::string>{"t", "x"});
  CHECK_THROWS_AS(realization_csv(s.grid, x.samples.head(3)), DomainError);
}
