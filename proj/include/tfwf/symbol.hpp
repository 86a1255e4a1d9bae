#pragma once

#include <complex>
#include <functional>

namespace tfwf {

/// Rectangle [t_lo, t_hi] x [w_lo, w_hi] in the time-frequency plane.
struct PhaseSpaceBox {
  double t_lo;
  double t_hi;
  double w_lo;
  double w_hi;

  double area() const { return (t_hi - t_lo) * (w_hi - w_lo); }
};

/// Characteristic decay lengths of a symbol along time and angular frequency.
/// For a Gaussian exp(-t^2 / (2 T0^2)) the time scale is T0.
struct DecayScale {
  double time = 1.0;
  double freq = 1.0;
};

/// Weyl symbol p(t, w) of an LTV filter.
///
/// The callable is assumed Schwartz-class. The decay scale and center size
/// every grid and quadrature box downstream; validate_decay() checks the claim.
class WeylSymbol {
 public:
  using Fn = std::function<std::complex<double>(double, double)>;

  WeylSymbol(Fn eval, DecayScale scale, double t_center = 0.0, double w_center = 0.0);

  std::complex<double> operator()(double t, double w) const { return eval_(t, w); }
  double abs2(double t, double w) const { return std::norm(eval_(t, w)); }

  const DecayScale& decay_scale() const { return scale_; }
  double t_center() const { return t_center_; }
  double w_center() const { return w_center_; }

  /// p_r(t, w) = p(t / r, w / r).
  WeylSymbol spread(double r) const;
  /// alpha * p.
  WeylSymbol scaled(std::complex<double> alpha) const;
  /// p(t - t0, w - w0).
  WeylSymbol shifted(double t0, double w0) const;
  /// conj(p); the symbol of the adjoint operator.
  WeylSymbol conjugate() const;

  /// Box spanning `scales` decay lengths around the center.
  PhaseSpaceBox support_box(double scales) const;

 private:
  Fn eval_;
  DecayScale scale_;
  double t_center_;
  double w_center_;
};

/// Identically zero symbol.
WeylSymbol zero_symbol(DecayScale scale = {});

/// Throws GridTooSmall unless |p| < rel_tol * max|p| on the boundary of the
/// box of `scales` decay lengths.
void validate_decay(const WeylSymbol& p, double scales = 8.0, double rel_tol = 1e-12);

/// max |p|^2, sampled on a grid over the box of `scales` decay lengths.
double sampled_peak_abs2(const WeylSymbol& p, double scales = 8.0, int n = 129);

}  // namespace tfwf
