#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "tfwf/errors.hpp"
#include "tfwf/random.hpp"
#include "tfwf/special_functions.hpp"

using namespace tfwf;

namespace {

// Reference values from a 30-digit evaluation.
struct LambertCase {
  double x;
  double w;
};

constexpr LambertCase kW0[] = {
    {461.92306047519724484, 4.6076749589597098442}, {1.0, 0.567143290409783873},
    {-0.2, -0.25917110181907376448},                 {1e6, 11.383358086140052622},
    {10.0, 1.7455280027406993831},                   {45.861214550465426395, 2.7970532932106465064},
    {4.25502995799224455, 1.2361224107232317255},
};

constexpr LambertCase kWm1[] = {
    {-0.01, -6.4727751243940046701}, {-0.1, -3.5771520639572971414}, {-0.3, -1.7813370234216276963},
    {-1e-10, -26.295238819246925656},
};

}  // namespace

TEST_CASE("lambert W0 matches reference values") {
  for (const auto& c : kW0) CHECK(lambert_w0(c.x) == doctest::Approx(c.w).epsilon(1e-14));
}

TEST_CASE("lambert W-1 matches reference values") {
  for (const auto& c : kWm1) CHECK(lambert_wm1(c.x) == doctest::Approx(c.w).epsilon(1e-14));
  const double e = std::numbers::e;
  CHECK(lambert_wm1(-1.0 / (10.0 * e)) == doctest::Approx(-4.8897201698674290579).epsilon(1e-14));
  CHECK(lambert_wm1(-1.0 / (2.0 * e)) == doctest::Approx(-2.6783469900166606534).epsilon(1e-14));
  CHECK(lambert_wm1(-1.0 / (100.0 * e)) == doctest::Approx(-7.6383520679938122694).epsilon(1e-14));
}

TEST_CASE("lambert branches meet at the branch point") {
  const double x = -std::exp(-1.0);
  CHECK(lambert_w0(x) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(lambert_wm1(x) == doctest::Approx(-1.0).epsilon(1e-7));
  // sqrt behaviour near the branch point limits accuracy in w, not in the residual.
  const double near = x + 1e-12;
  const double w0 = lambert_w0(near);
  const double wm = lambert_wm1(near);
  CHECK(w0 > wm);
  CHECK(std::abs(w0 * std::exp(w0) - near) < 1e-15);
  CHECK(std::abs(wm * std::exp(wm) - near) < 1e-15);
}

TEST_CASE("lambert residuals on random arguments") {
  Rng rng(7);
  double worst0 = 0.0;
  double worst1 = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x0 = std::pow(10.0, -3.0 + 9.0 * rng.uniform());
    const double w0 = lambert_w0(x0);
    worst0 = std::max(worst0, std::abs(w0 * std::exp(w0) - x0) / x0);

    const double xm = -std::exp(-1.0) * rng.uniform();
    if (xm == 0.0) continue;
    const double wm = lambert_wm1(xm);
    CHECK(wm <= -1.0);
    worst1 = std::max(worst1, std::abs(wm * std::exp(wm) - xm) / std::abs(xm));
  }
  CHECK(worst0 < 1e-14);
  CHECK(worst1 < 1e-13);
}

TEST_CASE("lambert domain errors") {
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
  CHECK_THROWS_AS(lambert_wm1(0.0), DomainError);
  CHECK_THROWS_AS(lambert_wm1(0.1), DomainError);
  CHECK_THROWS_AS(lambert_wm1(-0.5), DomainError);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), DomainError);
}

TEST_CASE("hermite functions are orthonormal through order 40") {
  const int K = 40;
  const HermiteBasis<double> basis(1.0, K);
  // Trapezoid on [-14, 14] is spectrally accurate for these functions.
  const int n = 4001;
  const double a = -14.0;
  const double h = 28.0 / (n - 1);
  Eigen::MatrixXd F(n, K + 1);
  for (int i = 0; i < n; ++i) F.row(i) = basis.all(a + i * h).transpose();
  const Eigen::MatrixXd gram = h * F.transpose() * F;
  const double err = (gram - Eigen::MatrixXd::Identity(K + 1, K + 1)).cwiseAbs().maxCoeff();
  CHECK(err < 1e-12);
}

TEST_CASE("hermite low orders match closed forms") {
  const double pi14 = std::pow(std::numbers::pi, -0.25);
  for (double x : {-2.5, -0.3, 0.0, 1.1, 3.7}) {
    const double g = std::exp(-0.5 * x * x) * pi14;
    CHECK(HermiteBasis<double>::unit(0, x) == doctest::Approx(g).epsilon(1e-14));
    CHECK(HermiteBasis<double>::unit(1, x) == doctest::Approx(std::sqrt(2.0) * x * g).epsilon(1e-14));
    CHECK(HermiteBasis<double>::unit(2, x) == doctest::Approx((2 * x * x - 1) / std::sqrt(2.0) * g).epsilon(1e-13));
  }
}

TEST_CASE("dilated hermite functions keep unit norm and the time spread scales with gamma") {
  for (double gamma : {0.1, 1.0, 3.0}) {
    const HermiteBasis<double> basis(gamma, 5);
    const int n = 6001;
    const double a = -20.0 * gamma;
    const double h = 40.0 * gamma / (n - 1);
    for (int k = 0; k <= 5; ++k) {
      double norm = 0.0;
      double second = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = a + i * h;
        const double v = basis(k, t);
        norm += v * v * h;
        second += t * t * v * v * h;
      }
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      // <t^2> of the k-th Hermite function is (k + 1/2) gamma^2.
      CHECK(second == doctest::Approx((k + 0.5) * gamma * gamma).epsilon(1e-10));
    }
  }
}

TEST_CASE("hermite high order stays finite far out") {
  const HermiteBasis<double> basis(1.0, 200);
  const auto v = basis.all(25.0);
  CHECK(v.allFinite());
  CHECK(std::abs(basis(200, 0.5)) < 1.0);
  CHECK_THROWS_AS(HermiteBasis<double>(0.0, 3), DomainError);
  CHECK_THROWS_AS(basis(201, 0.0), DomainError);
}
