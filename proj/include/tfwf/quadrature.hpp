#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "tfwf/symbol.hpp"

namespace tfwf {

struct QuadratureOptions {
  double rel_tol = 1e-11;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b].
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& opts = {});

/// Tensor trapezoid rule on an n_t x n_w node lattice spanning the box.
/// Exponentially accurate for smooth integrands that vanish at the edges.
double trapezoid_2d(const std::function<double(double, double)>& f, const PhaseSpaceBox& box,
                    Eigen::Index n_t, Eigen::Index n_w);

struct LevelSetOptions {
  /// Equispaced probes per row used to locate level crossings.
  int scan_points = 128;
  QuadratureOptions outer{1e-11, 0.0, 4000};
  QuadratureOptions inner{1e-12, 0.0, 200};
  /// When set, pieces where q <= support_level are skipped (integrand known to vanish).
  bool has_support_level = false;
  double support_level = 0.0;
};

/// Integral of F(q(t, w)) over the box, where F is smooth except where q
/// crosses one of `levels`.
///
/// Rows in t are integrated adaptively; inside each row the w-axis is split at
/// the crossings of q with every level (located by scanning, extremum
/// refinement and bisection) and each smooth piece is integrated with
/// Gauss-Kronrod. This keeps the kinks of (.)^+, ln_+ and min{1, .} off the
/// quadrature nodes.
double level_set_integral(const std::function<double(double, double)>& q, const PhaseSpaceBox& box,
                          std::span<const double> levels, const std::function<double(double)>& F,
                          const LevelSetOptions& opts = {});

}  // namespace tfwf
