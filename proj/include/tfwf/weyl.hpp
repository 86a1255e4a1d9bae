#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfwf/grid.hpp"
#include "tfwf/symbol.hpp"

namespace tfwf {

using cdouble = std::complex<double>;

/// Kernel matrix A_ij = h(t_i, t_j) dt of an integral operator on a grid.
///
/// The dt factor makes matrix products, traces and singular values those of
/// the continuous operator.
template <typename Scalar>
struct DiscreteOperator {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Grid2D grid;
  Matrix matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

using RealOperator = DiscreteOperator<double>;
using ComplexOperator = DiscreteOperator<cdouble>;

template <typename Scalar>
DiscreteOperator<Scalar> adjoint(const DiscreteOperator<Scalar>& op) {
  return {op.grid, op.matrix.adjoint()};
}

/// Operator product a * b (apply b first).
template <typename Scalar>
DiscreteOperator<Scalar> compose(const DiscreteOperator<Scalar>& a, const DiscreteOperator<Scalar>& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("compose: operators live on different grids");
  return {a.grid, a.matrix * b.matrix};
}

/// P^H P (the quasi density operator A(r) when op is P_r).
template <typename Scalar>
DiscreteOperator<Scalar> gram(const DiscreteOperator<Scalar>& op) {
  return {op.grid, op.matrix.adjoint() * op.matrix};
}

/// P P^H.
template <typename Scalar>
DiscreteOperator<Scalar> cogram(const DiscreteOperator<Scalar>& op) {
  return {op.grid, op.matrix * op.matrix.adjoint()};
}

/// op^n for n >= 1.
template <typename Scalar>
DiscreteOperator<Scalar> power(const DiscreteOperator<Scalar>& op, int n) {
  if (n < 1) throw std::invalid_argument("power: exponent must be >= 1");
  DiscreteOperator<Scalar> out = op;
  for (int i = 1; i < n; ++i) out.matrix = out.matrix * op.matrix;
  return out;
}

/// True when max |Im A_ij| <= rel_tol * max |A_ij|.
bool is_real(const ComplexOperator& op, double rel_tol = 1e-12);
RealOperator real_part(const ComplexOperator& op);
ComplexOperator to_complex(const RealOperator& op);

/// Kernel of the operator with Weyl symbol p_r on `grid`.
///
/// h(x, lag) = (1/2pi) sum_k p_r(x, w_k) exp(i lag w_k) dw is evaluated at all
/// 2 n_t - 1 midpoints x = (t_i + t_j)/2 with one length-2n_t FFT each.
/// Throws GridTooSmall if |p_r| on the grid boundary (time ends or the
/// Nyquist band edge) exceeds boundary_tol * max |p_r|.
ComplexOperator symbol_to_kernel(const WeylSymbol& p, double r, const Grid2D& grid,
                                 double boundary_tol = 1e-10);

/// Same, returning the real part; throws if the kernel is not real to 1e-12.
RealOperator symbol_to_real_kernel(const WeylSymbol& p, double r, const Grid2D& grid,
                                   double boundary_tol = 1e-10);

/// Weyl symbol sampled on a time-frequency lattice.
struct SampledSymbol {
  Eigen::VectorXd t;
  Eigen::VectorXd omega;
  /// values(i, k) = sigma(t(i), omega(k)).
  Eigen::MatrixXcd values;
  double dt = 0.0;
  double d_omega = 0.0;

  /// sum values * dt * d_omega (no 1/2pi).
  cdouble integral() const { return values.sum() * dt * d_omega; }
  /// sqrt(sum |values|^2 dt d_omega).
  double l2_norm() const { return std::sqrt(values.squaredNorm() * dt * d_omega); }
};

/// Discrete Wigner transform of a kernel matrix.
///
/// sigma(t_i, xi) = sum_m 2 exp(-2 i xi m dt) A_{i+m, i-m}, evaluated for
/// xi in [-pi/(2 dt), pi/(2 dt)) with spacing pi/(n_t dt) by one length-n_t
/// FFT per time sample. The trace rule sum A_ii = (1/2pi) sum sigma dt dxi and
/// the adjoint rule sigma(A^H) = conj(sigma(A)) hold exactly. Only half the
/// Nyquist band is recovered, so grids built for a round trip need
/// GridOptions::oversample = 2.
template <typename Scalar>
SampledSymbol kernel_to_symbol(const DiscreteOperator<Scalar>& op);

/// |p_r|^power sampled on the lattice of `like`.
Eigen::MatrixXd sample_abs_power(const WeylSymbol& p, double r, const SampledSymbol& like, int power);
/// p_r sampled on the lattice of `like`.
Eigen::MatrixXcd sample_symbol(const WeylSymbol& p, double r, const SampledSymbol& like);

enum class SpectrumMode { values_only, with_vectors };

/// Singular system of a discretized operator P.
///
/// lambdas are the eigenvalues of P^H P (squared singular values), descending.
/// Columns of f and g are the right and left singular vectors scaled by
/// dt^{-1/2}, so they are orthonormal as grid functions. Empty in
/// values_only mode.
template <typename Scalar>
struct SpectralData {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Grid2D grid;
  Eigen::VectorXd lambdas;
  Matrix f;
  Matrix g;
  /// Number of leading eigenvalues above cutoff * lambda_0.
  Eigen::Index trusted = 0;
  double cutoff = 1e-10;

  bool has_vectors() const { return f.cols() > 0; }
  bool is_trusted(Eigen::Index k) const { return k < trusted; }
};

/// Spectrum of op. Self-adjoint matrices go through the symmetric eigensolver
/// (lambda = d^2, g_k = sign(d_k) f_k); anything else through a full SVD.
template <typename Scalar>
SpectralData<Scalar> spectrum(const DiscreteOperator<Scalar>& op, double cutoff = 1e-10,
                              SpectrumMode mode = SpectrumMode::with_vectors);

/// Eigenvalues of P^H P computed from the kernel matrix, descending.
template <typename Scalar>
Eigen::VectorXd spectrum_values(const DiscreteOperator<Scalar>& op);

/// (1/2pi) integral of |p_r|^(2 n) over the plane.
double symbol_energy(const WeylSymbol& p, double r, int n = 1);

struct TraceCheck {
  double sum = 0.0;
  double integral = 0.0;
  double rel_gap = 0.0;
};

/// Compares sum lambda_k with (1/2pi) integral |p_r|^2. rel_gap is 0 when both vanish.
TraceCheck trace_identity_check(const Eigen::VectorXd& lambdas, const WeylSymbol& p, double r);

template <typename Scalar>
TraceCheck trace_identity_check(const SpectralData<Scalar>& spec, const WeylSymbol& p, double r) {
  return trace_identity_check(spec.lambdas, p, r);
}

/// Scalar function g for the Szego functionals, with g(x)/x bounded near 0.
struct SzegoFunction {
  std::string name;
  std::function<double(double)> g;
  /// Points where g is not smooth; the quadrature splits there.
  std::vector<double> kinks;
  /// g vanishes for x <= kinks.front().
  bool zero_below_first_kink = false;
  double domain_lo = 0.0;
  double domain_hi = std::numeric_limits<double>::infinity();
};

SzegoFunction szego_identity();
/// g(x) = 1/2 ln_+(x), with ln_+(x) = max(ln x, 0) and ln_+(0) = 0.
SzegoFunction szego_half_log_plus();
/// g(x) = min{1, x}.
SzegoFunction szego_min_one();
/// Looks a function up by name: "identity", "half_log_plus", "min_one".
SzegoFunction szego_function(const std::string& name);

struct SzegoGap {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap_per_r2 = 0.0;
};

/// lhs = sum a g(b lambda_k), rhs = (1/2pi) integral a g(b |p_r|^2), and
/// |lhs - rhs| / r^2. Throws DomainError when b * lambda leaves g's domain.
SzegoGap szego_gap(const Eigen::VectorXd& lambdas, const WeylSymbol& p, double r, const SzegoFunction& g,
                   double a = 1.0, double b = 1.0);

struct ComposeReport {
  double r = 0.0;
  int n = 1;
  /// max |sigma_{A^n} - |p_r|^{2n}| over the lattice.
  double max_residual = 0.0;
  /// (1/2pi) sum of the residual symbol.
  double residual_integral = 0.0;
  /// tr A^n.
  double trace = 0.0;
  /// (1/2pi) integral |p_r|^{2n} by quadrature.
  double principal_integral = 0.0;
  /// |residual_integral - (trace - principal_integral)|.
  double trace_rule_gap = 0.0;
  Eigen::Index n_t = 0;
};

/// Symbol of A^n(r) = (P_r^H P_r)^n from matrix products, minus the principal
/// symbol |p_r|^{2n}. n must be 1 or 2.
ComposeReport compose_check(const WeylSymbol& p, double r, int n = 1, GridOptions opts = {});

struct MomentSummary {
  double m1 = 0.0;
  double m2 = 0.0;
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;
  /// (2 sqrt(det S))^{-1/2} with S the covariance of the r = 1 density.
  double r_lower_bound = 0.0;
};

/// First and second moments of rho_r = |p_r|^2 / integral |p_r|^2.
/// Throws DomainError on a vanishing symbol or a degenerate covariance.
MomentSummary symbol_moments(const WeylSymbol& p, double r);

}  // namespace tfwf
