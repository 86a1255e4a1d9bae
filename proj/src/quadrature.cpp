#include "tfwf/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace tfwf {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// QUADPACK qk15 error heuristic.
Panel kronrod_panel(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    resk += kWgk[j] * pair;
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * pair;
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
  resk *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk, err};
}

template <typename Fn>
double bisect_crossing(Fn&& qrow, double level, double lo, double hi) {
  const bool rising = qrow(hi) > qrow(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((qrow(mid) > level) == rising)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for an extremum of qrow on [lo, hi]; sign = +1 for max, -1 for min.
template <typename Fn>
std::pair<double, double> golden_extremum(Fn&& qrow, double lo, double hi, double sign) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = sign * qrow(x1);
  double f2 = sign * qrow(x2);
  for (int i = 0; i < 60 && hi - lo > 1e-15 * (std::abs(lo) + std::abs(hi) + 1e-300); ++i) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = sign * qrow(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = sign * qrow(x2);
    }
  }
  return f1 > f2 ? std::pair{x1, sign * f1} : std::pair{x2, sign * f2};
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& opts) {
  QuadratureResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  Panel first = kronrod_panel(f, a, b);
  out.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int intervals = 1;
  while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) && intervals < opts.max_intervals) {
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) break;
    heap.pop();
    Panel left = kronrod_panel(f, worst.a, mid);
    Panel right = kronrod_panel(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  return out;
}

double trapezoid_2d(const std::function<double(double, double)>& f, const PhaseSpaceBox& box,
                    Eigen::Index n_t, Eigen::Index n_w) {
  const double ht = (box.t_hi - box.t_lo) / static_cast<double>(n_t - 1);
  const double hw = (box.w_hi - box.w_lo) / static_cast<double>(n_w - 1);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n_t; ++i) {
    const double wt = (i == 0 || i == n_t - 1) ? 0.5 : 1.0;
    const double t = box.t_lo + ht * static_cast<double>(i);
    double row = 0.0;
    for (Eigen::Index j = 0; j < n_w; ++j) {
      const double ww = (j == 0 || j == n_w - 1) ? 0.5 : 1.0;
      row += ww * f(t, box.w_lo + hw * static_cast<double>(j));
    }
    sum += wt * row;
  }
  return sum * ht * hw;
}

double level_set_integral(const std::function<double(double, double)>& q, const PhaseSpaceBox& box,
                          std::span<const double> levels, const std::function<double(double)>& F,
                          const LevelSetOptions& opts) {
  const int m = std::max(opts.scan_points, 3);
  std::vector<double> w(m);
  for (int j = 0; j < m; ++j) w[j] = box.w_lo + (box.w_hi - box.w_lo) * j / (m - 1);

  auto row = [&](double t) {
    auto qrow = [&](double x) { return q(t, x); };
    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) v[j] = qrow(w[j]);

    std::vector<double> cuts{box.w_lo, box.w_hi};
    for (double level : levels) {
      for (int j = 0; j + 1 < m; ++j) {
        const double a = v[j] - level;
        const double b = v[j + 1] - level;
        if (a == 0.0)
          cuts.push_back(w[j]);
        else if ((a < 0.0) != (b < 0.0) && b != 0.0)
          cuts.push_back(bisect_crossing(qrow, level, w[j], w[j + 1]));
      }
    }
    // Crossings that fall between two probes around an extremum.
    for (int j = 1; j + 1 < m; ++j) {
      const double hi3 = std::max({v[j - 1], v[j], v[j + 1]});
      const double lo3 = std::min({v[j - 1], v[j], v[j + 1]});
      const bool is_max = v[j] >= v[j - 1] && v[j] >= v[j + 1] && v[j] > lo3;
      const bool is_min = v[j] <= v[j - 1] && v[j] <= v[j + 1] && v[j] < hi3;
      if (is_max && std::any_of(levels.begin(), levels.end(), [&](double l) { return l > hi3; })) {
        const auto [wm, qm] = golden_extremum(qrow, w[j - 1], w[j + 1], 1.0);
        for (double level : levels) {
          if (level > hi3 && qm > level) {
            cuts.push_back(bisect_crossing(qrow, level, w[j - 1], wm));
            cuts.push_back(bisect_crossing(qrow, level, wm, w[j + 1]));
          }
        }
      }
      if (is_min && std::any_of(levels.begin(), levels.end(), [&](double l) { return l < lo3; })) {
        const auto [wm, qm] = golden_extremum(qrow, w[j - 1], w[j + 1], -1.0);
        for (double level : levels) {
          if (level < lo3 && qm < level) {
            cuts.push_back(bisect_crossing(qrow, level, w[j - 1], wm));
            cuts.push_back(bisect_crossing(qrow, level, wm, w[j + 1]));
          }
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      if (opts.has_support_level && qrow(0.5 * (a + b)) <= opts.support_level) continue;
      sum += gauss_kronrod([&](double x) { return F(qrow(x)); }, a, b, opts.inner).value;
    }
    return sum;
  };

  return gauss_kronrod(row, box.t_lo, box.t_hi, opts.outer).value;
}

}  // namespace tfwf
