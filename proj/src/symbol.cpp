#include "tfwf/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "tfwf/errors.hpp"

namespace tfwf {

WeylSymbol::WeylSymbol(Fn eval, DecayScale scale, double t_center, double w_center)
    : eval_(std::move(eval)), scale_(scale), t_center_(t_center), w_center_(w_center) {
  if (!(scale_.time > 0.0) || !(scale_.freq > 0.0))
    throw DomainError("WeylSymbol: decay scales must be positive");
}

WeylSymbol WeylSymbol::spread(double r) const {
  if (!(r > 0.0)) throw DomainError("WeylSymbol::spread: r must be positive");
  auto inner = eval_;
  return WeylSymbol([inner, r](double t, double w) { return inner(t / r, w / r); },
                    {scale_.time * r, scale_.freq * r}, t_center_ * r, w_center_ * r);
}

WeylSymbol WeylSymbol::scaled(std::complex<double> alpha) const {
  auto inner = eval_;
  return WeylSymbol([inner, alpha](double t, double w) { return alpha * inner(t, w); }, scale_,
                    t_center_, w_center_);
}

WeylSymbol WeylSymbol::shifted(double t0, double w0) const {
  auto inner = eval_;
  return WeylSymbol([inner, t0, w0](double t, double w) { return inner(t - t0, w - w0); }, scale_,
                    t_center_ + t0, w_center_ + w0);
}

WeylSymbol WeylSymbol::conjugate() const {
  auto inner = eval_;
  return WeylSymbol([inner](double t, double w) { return std::conj(inner(t, w)); }, scale_,
                    t_center_, w_center_);
}

PhaseSpaceBox WeylSymbol::support_box(double scales) const {
  return {t_center_ - scales * scale_.time, t_center_ + scales * scale_.time,
          w_center_ - scales * scale_.freq, w_center_ + scales * scale_.freq};
}

WeylSymbol zero_symbol(DecayScale scale) {
  return WeylSymbol([](double, double) { return std::complex<double>{}; }, scale);
}

double sampled_peak_abs2(const WeylSymbol& p, double scales, int n) {
  const auto box = p.support_box(scales);
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = box.t_lo + (box.t_hi - box.t_lo) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double w = box.w_lo + (box.w_hi - box.w_lo) * j / (n - 1);
      peak = std::max(peak, p.abs2(t, w));
    }
  }
  return peak;
}

void validate_decay(const WeylSymbol& p, double scales, double rel_tol) {
  const double peak = std::sqrt(sampled_peak_abs2(p, scales));
  if (peak == 0.0) return;
  const auto box = p.support_box(scales);
  constexpr int n = 257;
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double t = box.t_lo + (box.t_hi - box.t_lo) * s;
    const double w = box.w_lo + (box.w_hi - box.w_lo) * s;
    edge = std::max({edge, std::abs(p(t, box.w_lo)), std::abs(p(t, box.w_hi)),
                     std::abs(p(box.t_lo, w)), std::abs(p(box.t_hi, w))});
  }
  if (edge >= rel_tol * peak) {
    std::ostringstream msg;
    msg << "symbol does not decay: |p| = " << edge << " at " << scales
        << " decay lengths (peak " << peak << ")";
    throw GridTooSmall(msg.str());
  }
}

}  // namespace tfwf
