#include "tfwf/heat_channel.hpp"

#include <cmath>
#include <numbers>

#include "tfwf/errors.hpp"
#include "tfwf/special_functions.hpp"

namespace tfwf {

WeylSymbol heat_symbol(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("heat_symbol: gamma must be positive");
  const double g2 = gamma * gamma;
  return WeylSymbol(
      [g2](double t, double w) { return std::complex<double>(std::exp(-0.5 * (t * t / g2 + g2 * w * w)), 0.0); },
      {gamma, 1.0 / gamma});
}

HeatChannelModel heat_model(double gamma, double r) {
  if (!(gamma > 0.0)) throw DomainError("heat_model: gamma must be positive");
  if (!(r >= 1.0)) throw DomainError("heat_model: spreading factor must be >= 1");
  HeatChannelModel m;
  m.gamma = gamma;
  m.r = r;
  const double x = 2.0 * r * r;
  // arccoth(x) = ln((x + 1) / (x - 1)) / 2
  m.delta = std::log((x + 1.0) / (x - 1.0));
  m.rho = (x - 1.0) / (x + 1.0);
  m.c = std::cosh(0.5 * m.delta);
  return m;
}

double eigenvalue(const HeatChannelModel& m, int k) {
  if (k < 0) throw DomainError("eigenvalue: index must be non-negative");
  return m.c2() * std::pow(m.rho, 2.0 * k + 1.0);
}

Eigen::VectorXd eigenvalues(const HeatChannelModel& m, double rel_floor) {
  if (!(rel_floor > 0.0 && rel_floor < 1.0)) throw DomainError("eigenvalues: floor must lie in (0, 1)");
  // rho^{2k} >= rel_floor
  const auto count = static_cast<Eigen::Index>(std::floor(std::log(rel_floor) / (2.0 * std::log(m.rho)))) + 1;
  Eigen::VectorXd out(count);
  for (Eigen::Index k = 0; k < count; ++k) out(k) = eigenvalue(m, static_cast<int>(k));
  return out;
}

double eigenvalue_sum(const HeatChannelModel& m) { return m.c2() * m.rho / (1.0 - m.rho * m.rho); }

ClosedForm closed_form_capacity(double snr, double r) {
  if (!(snr > 0.0)) throw DomainError("closed_form_capacity: SNR must be positive");
  if (!(r > 0.0)) throw DomainError("closed_form_capacity: r must be positive");
  ClosedForm out;
  out.lambert_arg = (4.0 * std::numbers::pi * snr - 1.0) / std::numbers::e;
  out.lambert_value = lambert_w0(out.lambert_arg);
  const double s = out.lambert_value + 1.0;
  out.value_nats = r * r / 8.0 * s * s;
  return out;
}

ClosedForm closed_form_rate(double sdr, double r) {
  if (!(sdr >= 1.0)) throw DomainError("closed_form_rate: SDR must be >= 1");
  if (!(r > 0.0)) throw DomainError("closed_form_rate: r must be positive");
  ClosedForm out;
  out.lambert_arg = -1.0 / (std::numbers::e * sdr);
  out.lambert_value = sdr == 1.0 ? -1.0 : lambert_wm1(out.lambert_arg);
  const double s = out.lambert_value + 1.0;
  out.value_nats = r * r / 8.0 * s * s;
  return out;
}

double EllipseOfConcentration::area_exact() const { return std::numbers::pi * a_exact * b_exact; }

EllipseOfConcentration eoc(double gamma, double r) {
  const auto m = heat_model(gamma, r);
  const double x = 2.0 * r * r;
  // coth(delta) with delta = 2 arccoth(x) is (x^2 + 1) / (2 x).
  const double coth_delta = (x * x + 1.0) / (2.0 * x);
  EllipseOfConcentration out;
  out.a_exact = std::numbers::sqrt2 * m.gamma * std::sqrt(coth_delta);
  out.b_exact = std::numbers::sqrt2 / m.gamma * std::sqrt(coth_delta);
  out.a_approx = std::numbers::sqrt2 * r * m.gamma;
  out.b_approx = std::numbers::sqrt2 * r / m.gamma;
  return out;
}

RealOperator heat_kernel_matrix(const HeatChannelModel& m, const Grid2D& grid) {
  const int orders = static_cast<int>(std::ceil(std::log(1e-17) / std::log(m.rho))) + 1;
  const HermiteBasis<double> basis(m.gamma, orders - 1);
  const Eigen::Index n = grid.n_t();
  Eigen::MatrixXd f(n, orders);
  for (Eigen::Index i = 0; i < n; ++i) f.row(i) = basis.all(grid.t(i)).transpose();
  Eigen::VectorXd weights(orders);
  for (int k = 0; k < orders; ++k) weights(k) = m.c * std::pow(m.rho, k + 0.5);
  RealOperator out{grid, f * weights.asDiagonal() * f.transpose() * grid.dt()};
  return out;
}

}  // namespace tfwf
