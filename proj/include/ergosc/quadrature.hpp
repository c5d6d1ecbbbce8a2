#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"

namespace ergosc {

template <class T>
struct Integral {
  T value{};
  double error = 0.0;
};

struct QuadratureOptions {
  double abs_tol = 1e-8;
  std::size_t max_intervals = 1u << 18;
};

namespace detail {

/// One 21-point Kronrod panel with the embedded 10-point Gauss estimate.
template <class F>
auto kronrod21(F& f, double a, double b) {
  using R = std::decay_t<decltype(f(a))>;
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  static const auto& x = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R fc = f(mid);
  R kr = fc * wk[0];
  R gs = R{};
  for (std::size_t i = 1; i < x.size(); ++i) {
    R sum = f(mid + half * x[i]) + f(mid - half * x[i]);
    kr += sum * wk[i];
    if (i % 2 == 1) gs += sum * wg[i / 2];
  }
  using std::abs;
  return Integral<R>{kr * half, static_cast<double>(abs((kr - gs) * half))};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod over [breaks.front(), breaks.back()], splitting
/// the panel with the largest error until the summed estimate meets the tolerance.
/// Breakpoints are kept as panel edges so kinks and jumps never sit inside a panel.
template <class F>
auto integrate_panels(F&& f, std::vector<double> breaks, const QuadratureOptions& opt = {}) {
  using R = std::decay_t<decltype(f(0.0))>;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  Integral<R> out{};
  if (breaks.size() < 2) return out;

  struct Panel {
    double a, b;
    Integral<R> q;
    bool operator<(const Panel& o) const { return q.error < o.q.error; }
  };
  std::priority_queue<Panel> heap;
  std::vector<Panel> done;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p{breaks[i], breaks[i + 1], detail::kronrod21(f, breaks[i], breaks[i + 1])};
    total_err += p.q.error;
    heap.push(p);
  }
  std::size_t count = heap.size();
  while (!heap.empty() && total_err > opt.abs_tol && count < opt.max_intervals) {
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-13 * std::max(1.0, std::abs(mid))) {
      done.push_back(p);
      continue;
    }
    Panel l{p.a, mid, detail::kronrod21(f, p.a, mid)};
    Panel r{mid, p.b, detail::kronrod21(f, mid, p.b)};
    total_err += l.q.error + r.q.error - p.q.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double err = 0.0;
  for (const auto& p : done) {
    out.value += p.q.value;
    err += p.q.error;
  }
  out.error = err;
  return out;
}

/// As integrate_panels, but throws QuadratureFailure when the estimate misses the tolerance.
template <class F>
auto integrate(F&& f, std::vector<double> breaks, const QuadratureOptions& opt = {}) {
  auto r = integrate_panels(std::forward<F>(f), std::move(breaks), opt);
  if (!(r.error <= opt.abs_tol))
    fail(ErrorKind::QuadratureFailure,
         "error estimate " + std::to_string(r.error) + " exceeds tolerance " + std::to_string(opt.abs_tol));
  return r;
}

/// Breakpoints lo, lo+step, ..., hi.
inline std::vector<double> uniform_breaks(double lo, double hi, double max_width) {
  std::vector<double> out{lo};
  if (hi <= lo) return out;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / max_width));
  for (std::size_t i = 1; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  out.push_back(hi);
  return out;
}

/// Si(x) = int_0^x sin(t)/t dt.
inline double sine_integral(double x) {
  if (x < 0) return -sine_integral(-x);
  if (x == 0) return 0.0;
  if (x > 100.0) {
    const double z = 1.0 / (x * x);
    const double f = (1.0 - z * (2.0 - z * (24.0 - z * (720.0 - z * 40320.0)))) / x;
    const double g = (1.0 - z * (6.0 - z * (120.0 - z * (5040.0 - z * 362880.0)))) * z;
    return std::numbers::pi / 2 - f * std::cos(x) - g * std::sin(x);
  }
  auto sinc = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  return integrate_panels(sinc, uniform_breaks(0.0, x, std::numbers::pi / 2), {1e-15, 1u << 14}).value;
}

}  // namespace ergosc
