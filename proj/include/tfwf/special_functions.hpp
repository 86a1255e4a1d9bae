#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "tfwf/errors.hpp"

namespace tfwf {

namespace detail {

template <typename Real>
Real lambert_residual(Real w, Real x) {
  return w * std::exp(w) - x;
}

// One Halley step for w e^w = x.
template <typename Real>
Real halley_step(Real w, Real x) {
  const Real ew = std::exp(w);
  const Real f = w * ew - x;
  const Real wp1 = w + Real(1);
  const Real denom = ew * wp1 - (w + Real(2)) * f / (Real(2) * wp1);
  return w - f / denom;
}

// Series about the branch point x = -1/e in p = +-sqrt(2(e x + 1)).
template <typename Real>
Real branch_point_series(Real p) {
  return Real(-1) + p - p * p / Real(3) + Real(11) / Real(72) * p * p * p;
}

template <typename Real>
bool residual_ok(Real w, Real x) {
  using std::abs;
  const Real tol = Real(1e-12) * std::max(Real(1), abs(x));
  return abs(lambert_residual(w, x)) <= tol;
}

// Bisection on the monotone map w -> w e^w over [lo, hi].
template <typename Real>
Real lambert_bisect(Real x, Real lo, Real hi) {
  const bool increasing = lambert_residual(hi, x) > lambert_residual(lo, x);
  for (int i = 0; i < 400; ++i) {
    const Real mid = Real(0.5) * (lo + hi);
    if (mid == lo || mid == hi) break;
    const Real f = lambert_residual(mid, x);
    if ((f > 0) == increasing)
      hi = mid;
    else
      lo = mid;
  }
  return Real(0.5) * (lo + hi);
}

}  // namespace detail

/// Principal branch W0 of the Lambert W function on [-1/e, inf).
///
/// Halley iteration from the usual asymptotic seeds; falls back to bisection
/// if 50 iterations do not meet |W e^W - x| <= 1e-12 max(1, |x|).
template <typename Real = double>
Real lambert_w0(Real x) {
  using std::exp;
  using std::log;
  using std::sqrt;
  const Real inv_e = exp(Real(-1));
  if (std::isnan(x)) throw DomainError("lambert_w0: NaN argument");
  if (x < -inv_e - Real(1e-15))
    throw DomainError("lambert_w0: argument below -1/e");
  if (x <= -inv_e) return Real(-1);
  if (x == Real(0)) return Real(0);
  if (std::isinf(x)) return x;

  Real w;
  if (x < Real(-0.32)) {
    w = detail::branch_point_series(sqrt(Real(2) * (std::numbers::e_v<Real> * x + Real(1))));
  } else if (x < Real(3)) {
    const Real l = std::log1p(x);
    w = l * (Real(1) - std::log1p(l) / (Real(2) + l));
  } else {
    const Real l1 = log(x);
    const Real l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 50; ++it) {
    const Real next = detail::halley_step(w, x);
    if (!std::isfinite(next)) break;
    const Real step = next - w;
    w = std::max(next, Real(-1));
    if (std::abs(step) <= Real(4) * std::numeric_limits<Real>::epsilon() * (Real(1) + std::abs(w))) break;
  }
  if (std::isfinite(w) && w >= Real(-1) && detail::residual_ok(w, x)) return w;

  const Real hi = x > std::numbers::e_v<Real> ? log(x) : Real(1);
  return detail::lambert_bisect(x, Real(-1), hi);
}

/// Lower real branch W_{-1} of the Lambert W function on [-1/e, 0); returns values <= -1.
template <typename Real = double>
Real lambert_wm1(Real x) {
  using std::exp;
  using std::log;
  using std::sqrt;
  const Real inv_e = exp(Real(-1));
  if (std::isnan(x)) throw DomainError("lambert_wm1: NaN argument");
  if (x < -inv_e - Real(1e-15) || x >= Real(0))
    throw DomainError("lambert_wm1: argument outside [-1/e, 0)");
  if (x <= -inv_e) return Real(-1);

  Real w;
  if (x < Real(-0.25)) {
    w = detail::branch_point_series(-sqrt(Real(2) * (std::numbers::e_v<Real> * x + Real(1))));
  } else {
    const Real l1 = log(-x);
    const Real l2 = log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  w = std::min(w, Real(-1));

  for (int it = 0; it < 50; ++it) {
    const Real next = detail::halley_step(w, x);
    if (!std::isfinite(next)) break;
    const Real step = next - w;
    w = std::min(next, Real(-1));
    if (std::abs(step) <= Real(4) * std::numeric_limits<Real>::epsilon() * (Real(1) + std::abs(w))) break;
  }
  if (std::isfinite(w) && w <= Real(-1) && detail::residual_ok(w, x)) return w;

  // w e^w decreases from 0- to -1/e on (-inf, -1]; walk left until bracketed.
  Real lo = log(-x) - Real(1);
  while (detail::lambert_residual(lo, x) <= Real(0)) lo *= Real(2);
  return detail::lambert_bisect(x, lo, Real(-1));
}

/// L2-normalized dilated Hermite functions f_k(t) = gamma^{-1/2} H_k(t / gamma).
///
/// Values come from the three-term recurrence on the normalized functions,
///   H_{k+1}(x) = sqrt(2/(k+1)) x H_k(x) - sqrt(k/(k+1)) H_{k-1}(x),
/// carried with a separate log-scale so neither the Gaussian envelope nor the
/// polynomial growth can overflow or underflow prematurely.
template <typename Real = double>
class HermiteBasis {
 public:
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  HermiteBasis(Real gamma, int max_order) : gamma_(gamma), max_order_(max_order) {
    if (!(gamma > Real(0))) throw DomainError("HermiteBasis: gamma must be positive");
    if (max_order < 0) throw DomainError("HermiteBasis: max_order must be non-negative");
  }

  Real gamma() const { return gamma_; }
  int max_order() const { return max_order_; }

  /// f_k(t) for one order.
  Real operator()(int k, Real t) const {
    if (k < 0 || k > max_order_) throw DomainError("HermiteBasis: order out of range");
    return Real(1) / std::sqrt(gamma_) * unit(k, t / gamma_);
  }

  /// f_0(t), ..., f_{K_max}(t) in one recurrence pass.
  Vector all(Real t) const {
    Vector out(max_order_ + 1);
    unit_all(t / gamma_, out);
    out *= Real(1) / std::sqrt(gamma_);
    return out;
  }

  /// Undilated H_k(x).
  static Real unit(int k, Real x) {
    Vector v(k + 1);
    unit_all(x, v);
    return v(k);
  }

 private:
  static void unit_all(Real x, Vector& out) {
    constexpr Real big = Real(1e150);
    const Real log_big = std::log(big);
    Real log_scale = -Real(0.5) * x * x - Real(0.25) * std::log(std::numbers::pi_v<Real>);
    Real prev = Real(0);
    Real cur = Real(1);
    const auto n = out.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      out(k) = cur == Real(0) ? Real(0) : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
      if (k + 1 == n) break;
      const Real kk = static_cast<Real>(k);
      const Real next = std::sqrt(Real(2) / (kk + 1)) * x * cur - std::sqrt(kk / (kk + 1)) * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > big) {
        cur /= big;
        prev /= big;
        log_scale += log_big;
      }
    }
  }

  Real gamma_;
  int max_order_;
};

/// Free-function form of HermiteBasis::operator().
template <typename Real>
Real hermite_fn(const HermiteBasis<Real>& basis, int k, Real t) {
  return basis(k, t);
}

}  // namespace tfwf
