#include "tfwf/grid.hpp"

#include <cmath>
#include <numbers>

#include "tfwf/errors.hpp"

namespace tfwf {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Grid2D::Grid2D(double t_center, double dt, Eigen::Index n_t) : t_center_(t_center), dt_(dt), n_t_(n_t) {
  if (!is_power_of_two(n_t) || n_t < 2) throw DomainError("Grid2D: n_t must be a power of two >= 2");
  if (!(dt > 0.0)) throw DomainError("Grid2D: dt must be positive");
}

Grid2D Grid2D::centered(double half_width, Eigen::Index n_t, double t_center) {
  if (!(half_width > 0.0)) throw DomainError("Grid2D: half width must be positive");
  return Grid2D(t_center, 2.0 * half_width / static_cast<double>(n_t - 1), n_t);
}

double Grid2D::d_omega() const { return 2.0 * std::numbers::pi / (static_cast<double>(n_omega()) * dt_); }

double Grid2D::nyquist() const { return std::numbers::pi / dt_; }

Eigen::VectorXd Grid2D::times() const {
  Eigen::VectorXd out(n_t_);
  for (Eigen::Index i = 0; i < n_t_; ++i) out(i) = t(i);
  return out;
}

Grid2D grid_for_symbol(const WeylSymbol& p, double r, const GridOptions& opts) {
  if (!(r >= 1.0)) throw DomainError("grid_for_symbol: spreading factor must be >= 1");
  if (std::abs(p.w_center()) > 0.0)
    throw DomainError("grid_for_symbol: frequency-shifted symbols are not supported on the FFT grid");
  const double half_width = opts.coverage * r * p.decay_scale().time;
  const double band = opts.oversample * (opts.coverage * r * p.decay_scale().freq);
  Eigen::Index n = opts.n_override;
  if (n == 0) {
    const double dt_max = std::numbers::pi / band;
    n = next_power_of_two(static_cast<Eigen::Index>(std::ceil(2.0 * half_width / dt_max)) + 1);
    n = std::max(n, opts.min_n);
    if (n > opts.max_n)
      throw GridTooSmall("grid_for_symbol: required n_t exceeds max_n; raise max_n or lower coverage");
  } else if (!is_power_of_two(n)) {
    throw DomainError("grid_for_symbol: n_override must be a power of two");
  }
  return Grid2D::centered(half_width, n, r * p.t_center());
}

}  // namespace tfwf
