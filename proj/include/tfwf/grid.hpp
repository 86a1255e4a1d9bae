#pragma once

#include <Eigen/Core>

#include "tfwf/symbol.hpp"

namespace tfwf {

/// Uniform time grid and its FFT-dual frequency grid.
///
/// t_i = t_center + (i - (n_t - 1) / 2) dt for i < n_t. The frequency grid has
/// n_omega = 2 n_t points spaced d_omega = 2 pi / (n_omega dt), centered on 0,
/// so it spans the full Nyquist band [-pi/dt, pi/dt).
class Grid2D {
 public:
  Grid2D(double t_center, double dt, Eigen::Index n_t);

  /// Grid of n_t points (a power of two) covering [center - half_width, center + half_width].
  static Grid2D centered(double half_width, Eigen::Index n_t, double t_center = 0.0);

  Eigen::Index n_t() const { return n_t_; }
  Eigen::Index n_omega() const { return 2 * n_t_; }
  double dt() const { return dt_; }
  double d_omega() const;
  double t_center() const { return t_center_; }
  double t(Eigen::Index i) const { return t_center_ + (static_cast<double>(i) - 0.5 * static_cast<double>(n_t_ - 1)) * dt_; }
  double t_min() const { return t(0); }
  double t_max() const { return t(n_t_ - 1); }
  /// pi / dt.
  double nyquist() const;
  /// k-th point of the dual grid, (k - n_t) d_omega.
  double omega(Eigen::Index k) const { return (static_cast<double>(k) - static_cast<double>(n_t_)) * d_omega(); }

  Eigen::VectorXd times() const;

  bool operator==(const Grid2D&) const = default;

 private:
  double t_center_;
  double dt_;
  Eigen::Index n_t_;
};

struct GridOptions {
  /// Decay lengths of p_r covered in time and in frequency.
  double coverage = 7.0;
  /// Nyquist band as a multiple of the frequency coverage. Use 2 when the
  /// Weyl symbol will be read back from the kernel (kernel_to_symbol).
  double oversample = 1.0;
  Eigen::Index min_n = 512;
  Eigen::Index max_n = 8192;
  /// Force n_t (0 = automatic). Must be a power of two.
  Eigen::Index n_override = 0;
};

/// Grid sized so that both the time extent and the Nyquist band cover p_r.
Grid2D grid_for_symbol(const WeylSymbol& p, double r, const GridOptions& opts = {});

bool is_power_of_two(Eigen::Index n);
Eigen::Index next_power_of_two(Eigen::Index n);

}  // namespace tfwf
