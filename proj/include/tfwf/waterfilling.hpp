#pragma once

#include <Eigen/Core>

#include "tfwf/symbol.hpp"

namespace tfwf {

struct WaterfillResult {
  /// sigma^2, the water level.
  double water_level = 0.0;
  /// Number of channels with nu_k^2 < sigma^2.
  Eigen::Index K = 0;
  /// sigma^2 - nu_k^2 on active channels, 0 elsewhere.
  Eigen::VectorXd powers;
  double capacity_nats = 0.0;
};

/// Waterfilling on ascending noise variances nu_k^2 (+inf allowed) with total energy S > 0.
/// A channel whose variance equals the water level gets no power.
WaterfillResult waterfill_discrete(const Eigen::VectorXd& noise_vars, double S);

struct ReverseWaterfillResult {
  /// theta^2, the water table.
  double water_table = 0.0;
  /// Number of components with sigma_k^2 > theta^2.
  Eigen::Index K = 0;
  /// min{theta^2, sigma_k^2}.
  Eigen::VectorXd distortions;
  double rate_nats = 0.0;
  /// D equals the total energy; rate is 0 by convention.
  bool trivial = false;
};

/// Reverse waterfilling on descending signal variances with 0 < D <= sum sigma_k^2.
ReverseWaterfillResult reverse_waterfill_discrete(const Eigen::VectorXd& signal_vars, double D);

/// Result of a time-frequency waterfilling integral.
struct TFIntegralResult {
  /// nu (capacity) or lambda (rate).
  double level = 0.0;
  double value_nats = 0.0;
  /// S or D recomputed at the returned level.
  double achieved_constraint = 0.0;
  /// Area of the waterfilling region {N_r < nu} or {Phi_r > lambda}.
  double region_area = 0.0;
  int iterations = 0;
};

struct TFOptions {
  /// Relative tolerance on the constraint.
  double rel_tol = 1e-12;
  int max_iterations = 200;
};

/// Capacity from the time-frequency waterfilling integrals with noise PSD
/// theta^2: solves integral (nu - N_r)^+ = S for nu, with
/// N_r = (theta^2 / 2 pi) |p_r|^{-2}, then C = (1/2pi) integral over
/// {N_r < nu} of (1/2) ln(nu / N_r).
TFIntegralResult tf_capacity(const WeylSymbol& p, double r, double S, double theta2, const TFOptions& opts = {});

/// Rate-distortion from the reverse waterfilling integrals with source PSD
/// sigma^2: solves integral min{lambda, Phi_r} = D for lambda, with
/// Phi_r = (sigma^2 / 2 pi) |p_r|^2, then R = (1/2pi) integral over
/// {Phi_r > lambda} of (1/2) ln(Phi_r / lambda).
TFIntegralResult tf_rate(const WeylSymbol& p, double r, double D, double sigma2, const TFOptions& opts = {});

}  // namespace tfwf
