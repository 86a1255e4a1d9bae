#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "tfwf/errors.hpp"
#include "tfwf/grid.hpp"
#include "tfwf/heat_channel.hpp"
#include "tfwf/symbol.hpp"
#include "tfwf/weyl.hpp"

using namespace tfwf;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Smooth complex symbol with a chirp, so neither the kernel nor the symbol is real.
WeylSymbol chirped_symbol() {
  return WeylSymbol(
      [](double t, double w) {
        const double env = std::exp(-0.5 * (t * t / 1.5 + w * w / 0.8));
        return std::complex<double>(env * std::cos(0.4 * t * w), env * std::sin(0.3 * t + 0.2 * w));
      },
      DecayScale{std::sqrt(1.5), std::sqrt(0.8)});
}

}  // namespace

TEST_CASE("heat kernel agrees with the eigen-expansion") {
  for (double r : {1.0, 2.0}) {
    const auto p = heat_symbol(1.0);
    const auto grid = grid_for_symbol(p, r);
    const auto m = heat_model(1.0, r);
    const auto kernel = symbol_to_real_kernel(p, r, grid);
    const auto oracle = heat_kernel_matrix(m, grid);
    const double scale = oracle.matrix.cwiseAbs().maxCoeff();
    CHECK((kernel.matrix - oracle.matrix).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("zero symbol gives the zero operator") {
  const auto grid = Grid2D::centered(8.0, 128);
  const auto k = symbol_to_kernel(zero_symbol(), 1.0, grid);
  CHECK(max_abs(k.matrix) == 0.0);
}

TEST_CASE("real symbol gives a self-adjoint kernel") {
  const auto p = heat_symbol(0.7);
  const auto grid = grid_for_symbol(p, 2.0);
  const auto k = symbol_to_kernel(p, 2.0, grid);
  CHECK(max_abs(k.matrix - k.matrix.adjoint()) < 1e-14 * max_abs(k.matrix));
  CHECK(is_real(k));
}

TEST_CASE("grid that is too small is rejected") {
  const auto p = heat_symbol(1.0);
  CHECK_THROWS_AS(symbol_to_kernel(p, 4.0, Grid2D::centered(3.0, 64)), GridTooSmall);
}

TEST_CASE("symbol round trip and adjoint rule") {
  const auto p = chirped_symbol();
  const double r = 2.0;
  GridOptions opts;
  opts.oversample = 2.0;
  const auto grid = grid_for_symbol(p, r, opts);
  const auto k = symbol_to_kernel(p, r, grid);
  const auto back = kernel_to_symbol(k);
  const Eigen::MatrixXcd ref = sample_symbol(p, r, back);
  const double rel = std::sqrt((back.values - ref).squaredNorm() / ref.squaredNorm());
  CHECK(rel < 1e-9);

  const auto adj = kernel_to_symbol(adjoint(k));
  CHECK(max_abs(adj.values - back.values.conjugate()) < 1e-13 * max_abs(back.values));
}

TEST_CASE("discrete trace rule is exact") {
  const auto p = chirped_symbol();
  const auto grid = grid_for_symbol(p, 1.0);
  const auto k = symbol_to_kernel(p, 1.0, grid);
  const auto s = kernel_to_symbol(k);
  const std::complex<double> trace = k.matrix.trace();
  const std::complex<double> integral = s.integral() / (2.0 * std::numbers::pi);
  CHECK(std::abs(trace - integral) < 1e-13 * std::abs(trace));
}

TEST_CASE("frequency-flat symbol gives a near-diagonal kernel") {
  // p(t, w) = m(t) exp(-w^2 / (2 s^2)) with a wide s: the kernel is close to
  // m(t) times a narrow Gaussian in the lag, so it concentrates on the diagonal.
  const double s = 20.0;
  const WeylSymbol p([s](double t, double w) { return std::complex<double>(std::exp(-0.5 * t * t) * std::exp(-0.5 * w * w / (s * s))); },
                     DecayScale{1.0, s});
  const auto grid = grid_for_symbol(p, 1.0);
  const auto k = symbol_to_real_kernel(p, 1.0, grid);
  const Eigen::Index n = k.size();
  double diag = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = k.matrix(i, j) * k.matrix(i, j);
      total += v;
      if (std::abs(grid.t(i) - grid.t(j)) < 4.0 / s) diag += v;
    }
  }
  CHECK(diag / total > 0.999);
  // Diagonal value h(t, 0) dt = m(t) * s / sqrt(2 pi) * dt.
  const Eigen::Index mid = n / 2;
  const double expect = std::exp(-0.5 * grid.t(mid) * grid.t(mid)) * s / std::sqrt(2.0 * std::numbers::pi) * grid.dt();
  CHECK(k.matrix(mid, mid) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("heat spectrum matches the analytic eigenvalues") {
  for (double r : {1.0, 2.0}) {
    const auto p = heat_symbol(1.0);
    const auto grid = grid_for_symbol(p, r);
    const auto m = heat_model(1.0, r);
    const auto spec = spectrum(symbol_to_real_kernel(p, r, grid));
    const auto exact = eigenvalues(m, 1e-8);
    REQUIRE(spec.lambdas.size() >= exact.size());
    for (Eigen::Index k = 0; k < exact.size(); ++k) CHECK(spec.lambdas(k) == doctest::Approx(exact(k)).epsilon(1e-9));
    // Singular vectors are orthonormal as grid functions.
    const Eigen::MatrixXd gram = grid.dt() * spec.f.leftCols(5).transpose() * spec.f.leftCols(5);
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("complex operators go through the SVD") {
  const auto p = chirped_symbol();
  const auto grid = grid_for_symbol(p, 1.0);
  const auto k = symbol_to_kernel(p, 1.0, grid);
  const auto spec = spectrum(k);
  const auto vals = spectrum_values(k);
  CHECK(spec.lambdas.head(10).isApprox(vals.head(10), 1e-10));
  // P f_k = sqrt(lambda_k) g_k.
  const Eigen::VectorXcd lhs = k.matrix * spec.f.col(0);
  const Eigen::VectorXcd rhs = std::sqrt(spec.lambdas(0)) * spec.g.col(0);
  CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
  CHECK(spec.trusted > 0);
  CHECK(spec.trusted <= spec.lambdas.size());
}

TEST_CASE("trace identity for the heat channel") {
  for (double r : {1.0, 2.0, 4.0}) {
    const auto p = heat_symbol(1.0);
    const auto grid = grid_for_symbol(p, r);
    const auto check = trace_identity_check(spectrum_values(symbol_to_real_kernel(p, r, grid)), p, r);
    CHECK(check.sum == doctest::Approx(r * r / 2.0).epsilon(1e-10));
    CHECK(check.rel_gap < 1e-10);
  }
}

TEST_CASE("szego gap shrinks with r at b = 2") {
  const auto p = heat_symbol(1.0);
  for (const char* name : {"half_log_plus", "min_one"}) {
    const auto g = szego_function(name);
    double prev = 1e300;
    for (double r : {1.0, 2.0, 4.0, 8.0}) {
      const auto m = heat_model(1.0, r);
      const auto gap = szego_gap(eigenvalues(m), p, r, g, 1.0, 2.0);
      CHECK(gap.gap_per_r2 < prev);
      prev = gap.gap_per_r2;
    }
  }
  CHECK_THROWS(szego_function("nope"));
}

TEST_CASE("szego identity function reproduces the trace") {
  const auto p = heat_symbol(1.0);
  const auto m = heat_model(1.0, 2.0);
  const auto gap = szego_gap(eigenvalues(m), p, 2.0, szego_identity());
  CHECK(gap.lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gap.gap_per_r2 < 1e-10);
}

TEST_CASE("composition residual decays with r") {
  const auto p = heat_symbol(1.0);
  const auto e1 = compose_check(p, 1.0);
  const auto e2 = compose_check(p, 2.0);
  const auto e4 = compose_check(p, 4.0);
  CHECK(e2.max_residual < e1.max_residual);
  CHECK(e4.max_residual < 0.35 * e2.max_residual);
  CHECK(e2.trace_rule_gap < 1e-12);
}

TEST_CASE("operator algebra helpers") {
  const auto grid = Grid2D::centered(4.0, 32);
  RealOperator a{grid, Eigen::MatrixXd::Random(32, 32)};
  RealOperator b{grid, Eigen::MatrixXd::Random(32, 32)};
  CHECK(compose(a, b).matrix.isApprox(a.matrix * b.matrix));
  CHECK(gram(a).matrix.isApprox(a.matrix.transpose() * a.matrix));
  CHECK(cogram(a).matrix.isApprox(a.matrix * a.matrix.transpose()));
  CHECK(power(a, 3).matrix.isApprox(a.matrix * a.matrix * a.matrix));
  CHECK_THROWS(power(a, 0));
  RealOperator c{Grid2D::centered(5.0, 32), a.matrix};
  CHECK_THROWS(compose(a, c));
  CHECK(real_part(to_complex(a)).matrix == a.matrix);
}

TEST_CASE("symbol moments") {
  const auto p = heat_symbol(0.1);
  const auto mom = symbol_moments(p, 2.0);
  CHECK(mom.m1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mom.s11 == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(mom.s22 == doctest::Approx(200.0).epsilon(1e-6));
  CHECK(mom.r_lower_bound >= 1.0 - 1e-6);

  const auto shifted = symbol_moments(p.shifted(0.3, -5.0), 2.0);
  CHECK(shifted.m1 == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(shifted.m2 == doctest::Approx(-10.0).epsilon(1e-6));
}
