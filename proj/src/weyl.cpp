#include "tfwf/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "tfwf/errors.hpp"
#include "tfwf/quadrature.hpp"

namespace tfwf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuadScales = 8.0;
constexpr Eigen::Index kQuadNodes = 512;

}  // namespace

bool is_real(const ComplexOperator& op, double rel_tol) {
  if (op.matrix.size() == 0) return true;
  const double scale = op.matrix.cwiseAbs().maxCoeff();
  return op.matrix.imag().cwiseAbs().maxCoeff() <= rel_tol * scale;
}

RealOperator real_part(const ComplexOperator& op) { return {op.grid, op.matrix.real()}; }

ComplexOperator to_complex(const RealOperator& op) { return {op.grid, op.matrix.cast<cdouble>()}; }

ComplexOperator symbol_to_kernel(const WeylSymbol& p, double r, const Grid2D& grid, double boundary_tol) {
  const Eigen::Index n = grid.n_t();
  const Eigen::Index nw = grid.n_omega();
  const double dt = grid.dt();
  const auto pr = p.spread(r);
  const double scale = grid.d_omega() / kTwoPi * static_cast<double>(nw) * dt;

  ComplexOperator op{grid, Eigen::MatrixXcd::Zero(n, n)};
  Eigen::FFT<double> fft;
  std::vector<cdouble> row(nw), lagged(nw);
  double peak = 0.0;
  double edge = 0.0;

  for (Eigen::Index s = 0; s <= 2 * (n - 1); ++s) {
    const double x = grid.t_center() + (0.5 * static_cast<double>(s) - 0.5 * static_cast<double>(n - 1)) * dt;
    const bool time_edge = (s == 0 || s == 2 * (n - 1));
    for (Eigen::Index k = 0; k < nw; ++k) {
      row[k] = pr(x, grid.omega(k));
      const double a = std::abs(row[k]);
      peak = std::max(peak, a);
      if (time_edge || k == 0 || k == nw - 1) edge = std::max(edge, a);
    }
    fft.inv(lagged, row);
    // Entries with i + j = s; the lag l = i - j has the parity of s.
    const Eigen::Index i_lo = std::max<Eigen::Index>(0, s - (n - 1));
    const Eigen::Index i_hi = std::min<Eigen::Index>(s, n - 1);
    for (Eigen::Index i = i_lo; i <= i_hi; ++i) {
      const Eigen::Index l = 2 * i - s;
      const Eigen::Index idx = ((l % nw) + nw) % nw;
      const double sign = (l % 2 == 0) ? 1.0 : -1.0;
      op.matrix(i, s - i) = sign * scale * lagged[idx];
    }
  }

  if (peak > 0.0 && edge > boundary_tol * peak) {
    std::ostringstream msg;
    msg << "grid too small: |p_r| on the grid boundary is " << edge / peak
        << " of its peak (limit " << boundary_tol << "); enlarge the grid";
    throw GridTooSmall(msg.str());
  }
  return op;
}

RealOperator symbol_to_real_kernel(const WeylSymbol& p, double r, const Grid2D& grid, double boundary_tol) {
  auto op = symbol_to_kernel(p, r, grid, boundary_tol);
  if (!is_real(op)) throw DomainError("symbol_to_real_kernel: kernel has a non-negligible imaginary part");
  return real_part(op);
}

template <typename Scalar>
SampledSymbol kernel_to_symbol(const DiscreteOperator<Scalar>& op) {
  const Eigen::Index n = op.grid.n_t();
  if (op.matrix.rows() != n || op.matrix.cols() != n)
    throw std::invalid_argument("kernel_to_symbol: matrix does not match its grid");
  const double dt = op.grid.dt();
  SampledSymbol out;
  out.dt = dt;
  out.d_omega = std::numbers::pi / (static_cast<double>(n) * dt);
  out.t = op.grid.times();
  out.omega.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) out.omega(k) = (static_cast<double>(k) - 0.5 * static_cast<double>(n)) * out.d_omega;
  out.values.resize(n, n);

  Eigen::FFT<double> fft;
  std::vector<cdouble> c(n), sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(c.begin(), c.end(), cdouble{});
    const Eigen::Index m_max = std::min(i, n - 1 - i);
    for (Eigen::Index m = -m_max; m <= m_max; ++m) {
      const double sign = (m % 2 == 0) ? 2.0 : -2.0;
      c[(m + n) % n] = sign * cdouble(op.matrix(i + m, i - m));
    }
    fft.fwd(sigma, c);
    for (Eigen::Index k = 0; k < n; ++k) out.values(i, k) = sigma[k];
  }
  return out;
}

template SampledSymbol kernel_to_symbol<double>(const DiscreteOperator<double>&);
template SampledSymbol kernel_to_symbol<cdouble>(const DiscreteOperator<cdouble>&);

Eigen::MatrixXd sample_abs_power(const WeylSymbol& p, double r, const SampledSymbol& like, int power) {
  const auto pr = p.spread(r);
  Eigen::MatrixXd out(like.t.size(), like.omega.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = std::pow(std::abs(pr(like.t(i), like.omega(k))), power);
  return out;
}

Eigen::MatrixXcd sample_symbol(const WeylSymbol& p, double r, const SampledSymbol& like) {
  const auto pr = p.spread(r);
  Eigen::MatrixXcd out(like.t.size(), like.omega.size());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index k = 0; k < out.cols(); ++k) out(i, k) = pr(like.t(i), like.omega(k));
  return out;
}

template <typename Scalar>
SpectralData<Scalar> spectrum(const DiscreteOperator<Scalar>& op, double cutoff, SpectrumMode mode) {
  using Matrix = typename SpectralData<Scalar>::Matrix;
  const Matrix& a = op.matrix;
  if (!a.allFinite()) throw ConvergenceError("spectrum: matrix has non-finite entries");
  const Eigen::Index n = a.rows();
  const bool vectors = mode == SpectrumMode::with_vectors;
  const double inv_sqrt_dt = 1.0 / std::sqrt(op.grid.dt());

  SpectralData<Scalar> out{op.grid, Eigen::VectorXd(n), Matrix(), Matrix(), 0, cutoff};
  const double scale = n > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  const bool hermitian = n > 0 && (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;

  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("spectrum: eigensolver failed");
    const Eigen::VectorXd d = es.eigenvalues();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(d(x)) > std::abs(d(y)); });
    if (vectors) {
      out.f.resize(n, n);
      out.g.resize(n, n);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dk = d(order[k]);
      out.lambdas(k) = dk * dk;
      if (vectors) {
        out.f.col(k) = es.eigenvectors().col(order[k]) * inv_sqrt_dt;
        out.g.col(k) = (dk < 0.0 ? -1.0 : 1.0) * out.f.col(k);
      }
    }
  } else {
    Eigen::BDCSVD<Matrix> svd(a, vectors ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0);
    if (svd.info() != Eigen::Success) throw ConvergenceError("spectrum: SVD failed");
    out.lambdas = svd.singularValues().array().square();
    if (vectors) {
      out.f = svd.matrixV() * inv_sqrt_dt;
      out.g = svd.matrixU() * inv_sqrt_dt;
    }
  }

  if (n > 0 && out.lambdas(0) > 0.0)
    out.trusted = (out.lambdas.array() > cutoff * out.lambdas(0)).count();
  return out;
}

template SpectralData<double> spectrum<double>(const DiscreteOperator<double>&, double, SpectrumMode);
template SpectralData<cdouble> spectrum<cdouble>(const DiscreteOperator<cdouble>&, double, SpectrumMode);

template <typename Scalar>
Eigen::VectorXd spectrum_values(const DiscreteOperator<Scalar>& op) {
  return spectrum(op, 0.0, SpectrumMode::values_only).lambdas;
}

template Eigen::VectorXd spectrum_values<double>(const DiscreteOperator<double>&);
template Eigen::VectorXd spectrum_values<cdouble>(const DiscreteOperator<cdouble>&);

double symbol_energy(const WeylSymbol& p, double r, int n) {
  const auto pr = p.spread(r);
  const auto box = pr.support_box(kQuadScales);
  auto f = [&](double t, double w) { return std::pow(pr.abs2(t, w), n); };
  return trapezoid_2d(f, box, kQuadNodes, kQuadNodes) / kTwoPi;
}

TraceCheck trace_identity_check(const Eigen::VectorXd& lambdas, const WeylSymbol& p, double r) {
  TraceCheck out;
  out.sum = lambdas.sum();
  out.integral = symbol_energy(p, r, 1);
  if (out.integral > 0.0)
    out.rel_gap = std::abs(out.sum - out.integral) / out.integral;
  else
    out.rel_gap = out.sum == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return out;
}

SzegoFunction szego_identity() { return {"identity", [](double x) { return x; }, {}, false}; }

SzegoFunction szego_half_log_plus() {
  return {"half_log_plus", [](double x) { return x > 1.0 ? 0.5 * std::log(x) : 0.0; }, {1.0}, true};
}

SzegoFunction szego_min_one() {
  return {"min_one", [](double x) { return std::min(1.0, x); }, {1.0}, false};
}

SzegoFunction szego_function(const std::string& name) {
  if (name == "identity") return szego_identity();
  if (name == "half_log_plus") return szego_half_log_plus();
  if (name == "min_one") return szego_min_one();
  throw DomainError("unknown Szego function '" + name + "' (expected identity, half_log_plus or min_one)");
}

SzegoGap szego_gap(const Eigen::VectorXd& lambdas, const WeylSymbol& p, double r, const SzegoFunction& g,
                   double a, double b) {
  if (!(b > 0.0)) throw DomainError("szego_gap: b must be positive");
  SzegoGap out;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const double x = b * std::max(lambdas(k), 0.0);
    if (x < g.domain_lo || x > g.domain_hi) throw DomainError("szego_gap: b * lambda outside the domain of " + g.name);
    out.lhs += a * g.g(x);
  }

  const auto pr = p.spread(r);
  const double peak = b * sampled_peak_abs2(pr, kQuadScales);
  if (peak > g.domain_hi) throw DomainError("szego_gap: b * |p_r|^2 outside the domain of " + g.name);

  std::vector<double> levels;
  for (double kink : g.kinks) levels.push_back(kink / b);
  LevelSetOptions opts;
  if (g.zero_below_first_kink && !levels.empty()) {
    opts.has_support_level = true;
    opts.support_level = levels.front();
  }
  auto q = [&](double t, double w) { return pr.abs2(t, w); };
  auto F = [&](double v) { return a * g.g(b * v); };
  out.rhs = level_set_integral(q, pr.support_box(kQuadScales), levels, F, opts) / kTwoPi;
  out.gap_per_r2 = std::abs(out.lhs - out.rhs) / (r * r);
  return out;
}

ComposeReport compose_check(const WeylSymbol& p, double r, int n, GridOptions opts) {
  if (n != 1 && n != 2) throw DomainError("compose_check: n must be 1 or 2");
  opts.oversample = std::max(opts.oversample, 2.0);
  const Grid2D grid = grid_for_symbol(p, r, opts);
  const auto kernel = symbol_to_kernel(p, r, grid);

  SampledSymbol sigma;
  double trace = 0.0;
  if (is_real(kernel)) {
    const auto a = power(gram(real_part(kernel)), n);
    sigma = kernel_to_symbol(a);
    trace = a.matrix.trace();
  } else {
    const auto a = power(gram(kernel), n);
    sigma = kernel_to_symbol(a);
    trace = a.matrix.trace().real();
  }

  const Eigen::MatrixXd principal = sample_abs_power(p, r, sigma, 2 * n);
  const Eigen::MatrixXcd residual = sigma.values - principal.cast<cdouble>();

  ComposeReport out;
  out.r = r;
  out.n = n;
  out.n_t = grid.n_t();
  out.max_residual = residual.cwiseAbs().maxCoeff();
  out.residual_integral = residual.sum().real() * sigma.dt * sigma.d_omega / kTwoPi;
  out.trace = trace;
  out.principal_integral = symbol_energy(p, r, n);
  out.trace_rule_gap = std::abs(out.residual_integral - (out.trace - out.principal_integral));
  return out;
}

namespace {

MomentSummary raw_moments(const WeylSymbol& p, double r) {
  const auto pr = p.spread(r);
  const auto box = pr.support_box(kQuadScales);
  const Eigen::Index n = kQuadNodes;
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n, box.t_lo, box.t_hi);
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, box.w_lo, box.w_hi);
  Eigen::VectorXd edge = Eigen::VectorXd::Ones(n);
  edge(0) = edge(n - 1) = 0.5;

  Eigen::MatrixXd rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) rho(i, j) = edge(i) * edge(j) * pr.abs2(t(i), w(j));
  const double mass = rho.sum();
  if (!(mass > 0.0)) throw DomainError("symbol_moments: symbol vanishes");
  rho /= mass;

  MomentSummary out;
  out.m1 = t.dot(rho.rowwise().sum());
  out.m2 = w.dot(rho.colwise().sum().transpose());
  const Eigen::VectorXd tc = t.array() - out.m1;
  const Eigen::VectorXd wc = w.array() - out.m2;
  out.s11 = tc.array().square().matrix().dot(rho.rowwise().sum());
  out.s22 = wc.array().square().matrix().dot(rho.colwise().sum().transpose());
  out.s12 = tc.dot(rho * wc);
  return out;
}

}  // namespace

MomentSummary symbol_moments(const WeylSymbol& p, double r) {
  if (!(r > 0.0)) throw DomainError("symbol_moments: r must be positive");
  MomentSummary out = raw_moments(p, r);
  const MomentSummary base = r == 1.0 ? out : raw_moments(p, 1.0);
  const double det = base.s11 * base.s22 - base.s12 * base.s12;
  if (!(det > 0.0)) throw DomainError("symbol_moments: degenerate covariance (non-positive determinant)");
  out.r_lower_bound = 1.0 / std::sqrt(2.0 * std::sqrt(det));
  return out;
}

}  // namespace tfwf
