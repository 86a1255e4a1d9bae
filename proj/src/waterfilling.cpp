#include "tfwf/waterfilling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "tfwf/errors.hpp"
#include "tfwf/quadrature.hpp"
#include "tfwf/weyl.hpp"

namespace tfwf {

WaterfillResult waterfill_discrete(const Eigen::VectorXd& noise_vars, double S) {
  if (!(S > 0.0) || !std::isfinite(S)) throw DomainError("waterfill_discrete: S must be positive and finite");
  const Eigen::Index n = noise_vars.size();
  if (n == 0) throw DomainError("waterfill_discrete: no channels");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(noise_vars(k) > 0.0)) throw DomainError("waterfill_discrete: noise variances must be positive");
    if (k > 0 && noise_vars(k) < noise_vars(k - 1))
      throw DomainError("waterfill_discrete: noise variances must be ascending");
  }
  if (std::isinf(noise_vars(0))) throw DomainError("waterfill_discrete: every channel has infinite noise");

  // Grow the active set while the next channel lies strictly below the level.
  Eigen::Index K = 1;
  double partial = noise_vars(0);
  double level = S + partial;
  while (K < n && noise_vars(K) < level) {
    partial += noise_vars(K);
    ++K;
    level = (S + partial) / static_cast<double>(K);
  }

  WaterfillResult out;
  out.water_level = level;
  out.K = K;
  out.powers = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < K; ++k) {
    out.powers(k) = level - noise_vars(k);
    out.capacity_nats += 0.5 * std::log(level / noise_vars(k));
  }
  return out;
}

ReverseWaterfillResult reverse_waterfill_discrete(const Eigen::VectorXd& signal_vars, double D) {
  const Eigen::Index n = signal_vars.size();
  if (n == 0) throw DomainError("reverse_waterfill_discrete: no components");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(signal_vars(k) >= 0.0) || !std::isfinite(signal_vars(k)))
      throw DomainError("reverse_waterfill_discrete: signal variances must be finite and non-negative");
    if (k > 0 && signal_vars(k) > signal_vars(k - 1))
      throw DomainError("reverse_waterfill_discrete: signal variances must be descending");
  }
  const double total = signal_vars.sum();
  if (!(D > 0.0)) throw DomainError("reverse_waterfill_discrete: D must be positive");
  if (D > total * (1.0 + 1e-12)) throw DomainError("reverse_waterfill_discrete: D exceeds the total energy");
  D = std::min(D, total);

  // tail(K) = sum_{k >= K} sigma_k^2
  Eigen::VectorXd tail(n + 1);
  tail(n) = 0.0;
  for (Eigen::Index k = n - 1; k >= 0; --k) tail(k) = tail(k + 1) + signal_vars(k);

  double table = 0.0;
  for (Eigen::Index K = 1; K <= n; ++K) {
    table = (D - tail(K)) / static_cast<double>(K);
    const double next = K < n ? signal_vars(K) : 0.0;
    if (table >= next) break;
  }

  ReverseWaterfillResult out;
  out.water_table = table;
  out.trivial = D >= total;
  out.distortions.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.distortions(k) = std::min(table, signal_vars(k));
    if (signal_vars(k) > table) {
      ++out.K;
      out.rate_nats += 0.5 * std::log(signal_vars(k) / table);
    }
  }
  return out;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBoxScales = 8.0;

/// Level-set integrals of q = |p_r|^2 above a threshold y.
class RegionIntegrals {
 public:
  RegionIntegrals(const WeylSymbol& p, double r)
      : pr_(p.spread(r)), box_(pr_.support_box(kBoxScales)), peak_(sampled_peak_abs2(pr_, kBoxScales)) {}

  double peak() const { return peak_; }

  /// integral over {q > y} of F(q).
  template <typename F>
  double over(double y, F&& f) const {
    LevelSetOptions opts;
    opts.has_support_level = true;
    opts.support_level = y;
    const double levels[] = {y};
    auto q = [this](double t, double w) { return pr_.abs2(t, w); };
    return level_set_integral(q, box_, levels, std::function<double(double)>(std::forward<F>(f)), opts);
  }

  /// integral of q over the plane.
  double total() const {
    auto q = [this](double t, double w) { return pr_.abs2(t, w); };
    return level_set_integral(q, box_, {}, [](double v) { return v; });
  }

  /// The box only captures {q > y} when y is well above the edge values of q.
  void check_level(double y) const {
    if (y < 1e-25 * peak_) {
      std::ostringstream msg;
      msg << "waterfilling region reaches the edge of the " << kBoxScales
          << "-scale quadrature box (level/peak = " << y / peak_ << ")";
      throw GridTooSmall(msg.str());
    }
  }

 private:
  WeylSymbol pr_;
  PhaseSpaceBox box_;
  double peak_;
};

struct Root {
  double x = 0.0;
  int iterations = 0;
};

/// Brent's method for f(x) = 0 on [a, b] with f(a), f(b) of opposite sign.
/// Stops once |f| <= ftol or the bracket shrinks to a few ulps.
template <typename F>
Root brent(F&& f, double a, double b, double fa, double fb, double ftol, int max_iter) {
  if ((fa > 0.0) == (fb > 0.0)) throw ConvergenceError("root bracket does not change sign");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-300;
    const double m = 0.5 * (c - b);
    if (std::abs(fb) <= ftol || std::abs(m) <= tol) return {b, it};
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, pp, qq;
      if (a == c) {
        pp = 2.0 * m * s;
        qq = 1.0 - s;
      } else {
        const double q0 = fa / fc, r0 = fb / fc;
        pp = s * (2.0 * m * q0 * (q0 - r0) - (b - a) * (r0 - 1.0));
        qq = (q0 - 1.0) * (r0 - 1.0) * (s - 1.0);
      }
      if (pp > 0.0)
        qq = -qq;
      else
        pp = -pp;
      if (2.0 * pp < std::min(3.0 * m * qq - std::abs(tol * qq), std::abs(e * qq))) {
        e = d;
        d = pp / qq;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("root finder did not converge");
}

/// Steps u = ln y down from u_start by ln 2 until sign(g(u)) flips.
template <typename G>
std::pair<double, double> step_down(G&& g, double u_start, double g_start, double& u_lo, double& g_lo) {
  double u_hi = u_start, g_hi = g_start;
  double u = u_start;
  for (int i = 0; i < 2000; ++i) {
    u -= std::numbers::ln2;
    const double gu = g(u);
    if ((gu > 0.0) != (g_hi > 0.0)) {
      u_lo = u;
      g_lo = gu;
      return {u_hi, g_hi};
    }
    u_hi = u;
    g_hi = gu;
  }
  throw ConvergenceError("could not bracket the water level");
}

}  // namespace

TFIntegralResult tf_capacity(const WeylSymbol& p, double r, double S, double theta2, const TFOptions& opts) {
  if (!(S > 0.0)) throw DomainError("tf_capacity: S must be positive");
  if (!(theta2 > 0.0)) throw DomainError("tf_capacity: theta^2 must be positive");
  const RegionIntegrals region(p, r);
  if (!(region.peak() > 0.0)) throw DomainError("tf_capacity: symbol vanishes");

  // With y = theta^2 / (2 pi nu): S(y) = (theta^2 / 2pi) integral_{q > y} (1/y - 1/q).
  auto energy = [&](double y) {
    return theta2 / kTwoPi * region.over(y, [y](double v) { return 1.0 / y - 1.0 / v; });
  };
  auto g = [&](double u) { return energy(std::exp(u)) - S; };

  const double u_top = std::log(region.peak());
  double u_lo = 0.0, g_lo = 0.0;
  auto [u_hi, g_hi] = step_down(g, u_top, g(u_top), u_lo, g_lo);
  const Root root = brent(g, u_lo, u_hi, g_lo, g_hi, opts.rel_tol * S, opts.max_iterations);

  const double y = std::exp(root.x);
  region.check_level(y);
  TFIntegralResult out;
  out.level = theta2 / (kTwoPi * y);
  out.value_nats = region.over(y, [y](double v) { return 0.5 * std::log(v / y); }) / kTwoPi;
  out.achieved_constraint = energy(y);
  out.region_area = region.over(y, [](double) { return 1.0; });
  out.iterations = root.iterations;
  return out;
}

TFIntegralResult tf_rate(const WeylSymbol& p, double r, double D, double sigma2, const TFOptions& opts) {
  if (!(sigma2 > 0.0)) throw DomainError("tf_rate: sigma^2 must be positive");
  const RegionIntegrals region(p, r);
  if (!(region.peak() > 0.0)) throw DomainError("tf_rate: symbol vanishes");
  const double energy_total = sigma2 / kTwoPi * region.total();
  if (!(D > 0.0)) throw DomainError("tf_rate: D must be positive");
  if (D > energy_total * (1.0 + 1e-9)) throw DomainError("tf_rate: D exceeds the source energy E(r)");

  TFIntegralResult out;
  if (D >= energy_total * (1.0 - opts.rel_tol)) {
    out.level = sigma2 / kTwoPi * region.peak();
    out.achieved_constraint = energy_total;
    return out;
  }

  // With y = 2 pi lambda / sigma^2: D(y) = E - (sigma^2 / 2pi) integral_{q > y} (q - y).
  auto distortion = [&](double y) {
    return energy_total - sigma2 / kTwoPi * region.over(y, [y](double v) { return v - y; });
  };
  auto g = [&](double u) { return distortion(std::exp(u)) - D; };

  const double u_top = std::log(region.peak());
  double u_lo = 0.0, g_lo = 0.0;
  auto [u_hi, g_hi] = step_down(g, u_top, g(u_top), u_lo, g_lo);
  const Root root = brent(g, u_lo, u_hi, g_lo, g_hi, opts.rel_tol * D, opts.max_iterations);

  const double y = std::exp(root.x);
  region.check_level(y);
  out.level = sigma2 * y / kTwoPi;
  out.value_nats = region.over(y, [y](double v) { return 0.5 * std::log(v / y); }) / kTwoPi;
  out.achieved_constraint = distortion(y);
  out.region_area = region.over(y, [](double) { return 1.0; });
  out.iterations = root.iterations;
  return out;
}

}  // namespace tfwf
