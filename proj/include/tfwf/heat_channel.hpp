#pragma once

#include <Eigen/Core>

#include "tfwf/grid.hpp"
#include "tfwf/symbol.hpp"
#include "tfwf/weyl.hpp"

namespace tfwf {

/// Gaussian-symbol LTV filter p(t, w) = exp(-(t^2 / gamma^2 + gamma^2 w^2) / 2)
/// spread by r. P_r = c P_delta, with P_delta diagonal in the dilated Hermite
/// functions with eigenvalues rho^{k + 1/2}.
struct HeatChannelModel {
  double gamma = 1.0;
  double r = 1.0;
  /// 2 arccoth(2 r^2).
  double delta = 0.0;
  /// exp(-delta).
  double rho = 0.0;
  /// cosh(delta / 2).
  double c = 0.0;

  double c2() const { return c * c; }
};

/// Unspread Gaussian symbol with decay scales (gamma, 1/gamma).
WeylSymbol heat_symbol(double gamma);

HeatChannelModel heat_model(double gamma, double r);

/// lambda_k = c^2 rho^{2k+1}, the k-th eigenvalue of P_r^* P_r.
double eigenvalue(const HeatChannelModel& m, int k);

/// lambda_0, lambda_1, ... down to (and excluding) the first lambda_k < rel_floor * lambda_0.
Eigen::VectorXd eigenvalues(const HeatChannelModel& m, double rel_floor = 1e-14);

/// sum_k lambda_k = c^2 rho / (1 - rho^2) = r^2 / 2.
double eigenvalue_sum(const HeatChannelModel& m);

/// Closed-form asymptotic value with the Lambert W evaluation that produced it.
struct ClosedForm {
  double value_nats = 0.0;
  double lambert_arg = 0.0;
  double lambert_value = 0.0;
};

/// C = (r^2 / 8) [W0((4 pi SNR - 1) / e) + 1]^2 for S = 2 pi r^2 theta^2 SNR.
ClosedForm closed_form_capacity(double snr, double r);

/// R = (r^2 / 8) [W_{-1}(-1 / (e SDR)) + 1]^2 for D = E(r) / SDR. Requires SDR >= 1.
ClosedForm closed_form_rate(double sdr, double r);

/// Semi-axes of the ellipse of concentration of P_r.
struct EllipseOfConcentration {
  /// sqrt(2) gamma sqrt(coth delta), sqrt(2) / gamma sqrt(coth delta).
  double a_exact = 0.0;
  double b_exact = 0.0;
  /// Large-r values sqrt(2) r gamma, sqrt(2) r / gamma.
  double a_approx = 0.0;
  double b_approx = 0.0;

  /// pi a_x b_x = 2 pi coth(delta).
  double area_exact() const;
};

EllipseOfConcentration eoc(double gamma, double r);

/// Kernel matrix of P_r on `grid` from the eigen-expansion
/// sum_k c rho^{k+1/2} f_k(t) f_k(t'), truncated once rho^k < 1e-17.
RealOperator heat_kernel_matrix(const HeatChannelModel& m, const Grid2D& grid);

}  // namespace tfwf
