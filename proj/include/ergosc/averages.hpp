#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "error.hpp"
#include "flow.hpp"
#include "kernels.hpp"
#include "line.hpp"
#include "quadrature.hpp"
#include "sequence.hpp"
#include "systems.hpp"

namespace ergosc {

namespace detail {

inline void check_pair(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g) {
  u.check_domain(f);
  u.check_domain(g);
}

/// sum_{c<P} (U^c f)(U^{-c} g) W(c) for a system with U^P = I.
template <class T>
SpaceFunction folded_orbit_sum(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                               const std::vector<T>& folded) {
  const std::size_t n = u.size();
  SpaceFunction acc(n), F = f, G = g, tmp;
  for (std::size_t c = 0; c < folded.size(); ++c) {
    if (c > 0) {
      u.step_forward(F, tmp);
      F.swap(tmp);
      u.step_backward(G, tmp);
      G.swap(tmp);
    }
    const T w = folded[c];
    if (w == T{}) continue;
    for (std::size_t x = 0; x < n; ++x) acc[x] += F[x] * G[x] * w;
  }
  return acc;
}

/// sum_{n=lo}^{hi} (U^n f)(U^{-n} g) w(n), lo <= 0 <= hi, accumulated as w(0) term first and
/// then the pairs (n, -n) for n = 1, 2, ... so odd weights cancel pairwise.
/// Systems with a short exact period are summed over one period with folded weights;
/// `fold(P)` supplies them (default: summing w over residue classes).
template <class T, class Weight, class Fold>
SpaceFunction orbit_sum(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g, std::int64_t lo,
                        std::int64_t hi, Weight&& w, Fold&& fold) {
  check_pair(u, f, g);
  const std::size_t n = u.size();
  if (hi < lo) return SpaceFunction(n);
  const std::int64_t cap = (hi - lo + 1) / 2;
  if (auto period = cap > 1 ? exact_period(u, cap) : std::nullopt)
    return folded_orbit_sum<T>(u, f, g, fold(*period));

  SpaceFunction acc(n);
  if (lo <= 0 && hi >= 0) {
    const T w0 = w(0);
    for (std::size_t x = 0; x < n; ++x) acc[x] = f[x] * g[x] * w0;
  }
  SpaceFunction Fp = f, Gp = g, Fm = f, Gm = g, tmp;
  const std::int64_t reach = std::max(hi, -lo);
  for (std::int64_t k = 1; k <= reach; ++k) {
    const bool pos = k >= lo && k <= hi, neg = -k >= lo && -k <= hi;
    if (k <= hi) {
      u.step_forward(Fp, tmp);
      Fp.swap(tmp);
      u.step_backward(Gp, tmp);
      Gp.swap(tmp);
    }
    if (-k >= lo) {
      u.step_backward(Fm, tmp);
      Fm.swap(tmp);
      u.step_forward(Gm, tmp);
      Gm.swap(tmp);
    }
    const T wp = pos ? w(k) : T{};
    const T wm = neg ? w(-k) : T{};
    if (pos && neg) {
      for (std::size_t x = 0; x < n; ++x) acc[x] += Fp[x] * Gp[x] * wp + Fm[x] * Gm[x] * wm;
    } else if (pos) {
      for (std::size_t x = 0; x < n; ++x) acc[x] += Fp[x] * Gp[x] * wp;
    } else if (neg) {
      for (std::size_t x = 0; x < n; ++x) acc[x] += Fm[x] * Gm[x] * wm;
    }
  }
  return acc;
}

template <class T, class Weight>
auto residue_fold(std::int64_t lo, std::int64_t hi, Weight w) {
  return [lo, hi, w](std::int64_t period) {
    std::vector<T> out(static_cast<std::size_t>(period), T{});
    auto add = [&](std::int64_t k) {
      if (k >= lo && k <= hi) out[static_cast<std::size_t>(((k % period) + period) % period)] += w(k);
    };
    add(0);
    for (std::int64_t k = 1; k <= std::max(hi, -lo); ++k) {
      add(k);
      add(-k);
    }
    return out;
  };
}

/// sum_{n=0}^{count-1} (U^n f)(U^{-n} g) / norm. The folded form uses count_c / norm
/// per residue, so equal ratios (e.g. count = qP, norm = qP) give bit-identical results.
inline SpaceFunction ergodic_mean(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                  std::int64_t count, double norm) {
  const double w = 1.0 / norm;
  auto fold = [count, norm](std::int64_t period) {
    std::vector<double> out(static_cast<std::size_t>(period));
    for (std::int64_t c = 0; c < period; ++c) {
      const std::int64_t hits = c < count ? (count - 1 - c) / period + 1 : 0;
      out[static_cast<std::size_t>(c)] = static_cast<double>(hits) / norm;
    }
    return out;
  };
  return orbit_sum<double>(u, f, g, 0, count - 1, [w](std::int64_t) { return w; }, fold);
}

inline std::int64_t integer_part(double r) {
  require(r >= 1.0 && std::isfinite(r), ErrorKind::BadParameter, "averaging radius must be a finite real >= 1");
  return static_cast<std::int64_t>(std::floor(r));
}

}  // namespace detail

/// A_r(f,g) = (1/[r]) sum_{n=0}^{[r]-1} (U^n f)(U^{-n} g).
inline SpaceFunction bilinear_ergodic(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g, double r) {
  detail::check_pair(u, f, g);
  const std::int64_t n = detail::integer_part(r);
  return detail::ergodic_mean(u, f, g, n, static_cast<double>(n));
}

/// H_r(f,g) = sum_{0<|n|<=[r]} (U^n f)(U^{-n} g) / n.
inline SpaceFunction bilinear_hilbert(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g, double r) {
  detail::check_pair(u, f, g);
  const std::int64_t n = detail::integer_part(r);
  auto w = [](std::int64_t k) { return k == 0 ? 0.0 : 1.0 / static_cast<double>(k); };
  return detail::orbit_sum<double>(u, f, g, -n, n, w, detail::residue_fold<double>(-n, n, w));
}

/// [2^{j/m}] terms normalized by 2^{j/m} itself.
inline SpaceFunction dyadic_ergodic(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                    std::int64_t j, int m) {
  detail::check_pair(u, f, g);
  require(j >= 0 && m >= 1, ErrorKind::BadParameter, "dyadic average needs j >= 0 and m >= 1");
  const double D = std::exp2(static_cast<double>(j) / m);
  return detail::ergodic_mean(u, f, g, static_cast<std::int64_t>(std::floor(D)), D);
}

/// (S_w(a,b))(n) = sum_k a_{n+k} b_{n-k} w_k.
template <class W>
Sequence weighted_biform_seq(const Sequence& a, const Sequence& b, const BasicSequence<W>& w) {
  if (a.empty() || b.empty() || w.empty()) return {};
  const std::int64_t lo = static_cast<std::int64_t>(std::ceil((a.lo + b.lo) / 2.0));
  const std::int64_t hi = static_cast<std::int64_t>(std::floor((a.hi() + b.hi()) / 2.0));
  return Sequence::generate(lo, hi, [&](std::int64_t n) {
    const std::int64_t k0 = std::max({a.lo - n, n - b.hi(), w.lo});
    const std::int64_t k1 = std::min({a.hi() - n, n - b.lo, w.hi()});
    cplx s{};
    for (std::int64_t k = k0; k <= k1; ++k) s += a[n + k] * b[n - k] * w[k];
    return s;
  });
}

/// Weights already collapsed modulo a period of the system.
template <class T>
struct PeriodicWeights {
  std::int64_t period = 1;
  std::vector<T> values;
};

/// sum_n (U^n f)(U^{-n} g) w(n).
template <class W>
SpaceFunction weighted_biform_space(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                    const BasicSequence<W>& w) {
  detail::check_pair(u, f, g);
  if (w.empty()) return SpaceFunction(u.size());
  const std::int64_t lo = std::min<std::int64_t>(w.lo, 0), hi = std::max<std::int64_t>(w.hi(), 0);
  auto wf = [&w](std::int64_t k) { return w[k]; };
  return detail::orbit_sum<W>(u, f, g, lo, hi, wf, detail::residue_fold<W>(lo, hi, wf));
}

template <class W>
SpaceFunction weighted_biform_space(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                    const PeriodicWeights<W>& w) {
  detail::check_pair(u, f, g);
  auto p = exact_period(u, w.period);
  require(p && w.period % *p == 0, ErrorKind::DomainMismatch, "folded weights need U^period = I");
  require(static_cast<std::int64_t>(w.values.size()) == w.period, ErrorKind::BadParameter, "folded weights length differs from period");
  return detail::folded_orbit_sum<W>(u, f, g, w.values);
}

/// sup_{1<=j<=J} (1/(2j+1)) sum_{|n|<=j} |U^n f| |U^{-n} g|.
inline std::vector<double> maximal_ergodic(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                           std::int64_t J) {
  detail::check_pair(u, f, g);
  require(J >= 1, ErrorKind::BadParameter, "maximal truncation J must be >= 1");
  const std::size_t n = u.size();
  std::vector<double> sum(n), best(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) sum[x] = std::abs(f[x]) * std::abs(g[x]);
  SpaceFunction Fp = f, Gp = g, Fm = f, Gm = g, tmp;
  for (std::int64_t j = 1; j <= J; ++j) {
    u.step_forward(Fp, tmp), Fp.swap(tmp);
    u.step_backward(Gp, tmp), Gp.swap(tmp);
    u.step_backward(Fm, tmp), Fm.swap(tmp);
    u.step_forward(Gm, tmp), Gm.swap(tmp);
    const double inv = 1.0 / static_cast<double>(2 * j + 1);
    for (std::size_t x = 0; x < n; ++x) {
      sum[x] += std::abs(Fp[x]) * std::abs(Gp[x]) + std::abs(Fm[x]) * std::abs(Gm[x]);
      best[x] = std::max(best[x], sum[x] * inv);
    }
  }
  return best;
}

/// sup_{1<=j<=J} |H_j(f,g)|.
inline std::vector<double> maximal_hilbert(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                           std::int64_t J) {
  detail::check_pair(u, f, g);
  require(J >= 1, ErrorKind::BadParameter, "maximal truncation J must be >= 1");
  const std::size_t n = u.size();
  SpaceFunction acc(n);
  std::vector<double> best(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) acc[x] = f[x] * g[x] * 0.0;
  SpaceFunction Fp = f, Gp = g, Fm = f, Gm = g, tmp;
  for (std::int64_t j = 1; j <= J; ++j) {
    u.step_forward(Fp, tmp), Fp.swap(tmp);
    u.step_backward(Gp, tmp), Gp.swap(tmp);
    u.step_backward(Fm, tmp), Fm.swap(tmp);
    u.step_forward(Gm, tmp), Gm.swap(tmp);
    const double inv = 1.0 / static_cast<double>(j), minv = 1.0 / static_cast<double>(-j);
    for (std::size_t x = 0; x < n; ++x) {
      acc[x] += Fp[x] * Gp[x] * inv + Fm[x] * Gm[x] * minv;
      best[x] = std::max(best[x], std::abs(acc[x]));
    }
  }
  return best;
}

/// Values at grid nodes with the summed quadrature error estimate.
struct NodeValues {
  std::vector<cplx> values;
  double max_error = 0.0;
};

/// (S_K(F,G))(x) = int F(x+y) G(x-y) K(y) dy at each x, integrating the symmetrized
/// integrand over y >= 0 so odd/even cancellation happens before quadrature.
inline NodeValues biform_realline(const LineFunction& F, const LineFunction& G, const KernelSpec& k,
                                  const std::vector<double>& xs, const QuadratureOptions& opt = {}) {
  NodeValues out;
  out.values.assign(xs.size(), cplx{});
  if (F.is_zero() || G.is_zero()) return out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double ylo = std::max({F.lo() - x, x - G.hi(), -k.support_radius});
    const double yhi = std::min({F.hi() - x, x - G.lo(), k.support_radius});
    if (!(yhi > ylo)) continue;
    const double Y = std::max(std::abs(ylo), std::abs(yhi));
    std::vector<double> br{0.0, Y};
    auto add = [&](double b) {
      b = std::abs(b);
      if (b > 0.0 && b < Y) br.push_back(b);
    };
    for (double b : F.breaks()) add(b - x);
    for (double b : G.breaks()) add(x - b);
    for (double b : k.breakpoints) add(b);
    add(ylo);
    add(yhi);
    auto h = [&](double y) {
      return F(x + y) * G(x - y) * k.value(y) + F(x - y) * G(x + y) * k.value(-y);
    };
    auto r = integrate(h, br, opt);
    out.values[i] = r.value;
    out.max_error = std::max(out.max_error, r.error);
  }
  return out;
}

namespace detail {

inline std::vector<double> flow_breaks(const FlowFunction& f, const FlowFunction& g, double x, double c, double t0,
                                       double t1, bool both_signs) {
  std::vector<double> br{t0, t1};
  flow_crossings(f, x, c, t0, t1, br);
  flow_crossings(g, x, -c, t0, t1, br);
  if (both_signs) {
    flow_crossings(f, x, -c, t0, t1, br);
    flow_crossings(g, x, c, t0, t1, br);
  }
  return br;
}

/// Adds uniform panels no wider than `width` between consecutive breakpoints.
inline std::vector<double> refine_breaks(std::vector<double> br, double width) {
  std::sort(br.begin(), br.end());
  if (!(width > 0.0) || !std::isfinite(width)) return br;
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    auto seg = uniform_breaks(br[i], br[i + 1], width);
    out.insert(out.end(), seg.begin(), seg.end() - 1);
  }
  out.push_back(br.back());
  return out;
}

}  // namespace detail

/// (1/r) int_0^r f(x + c t) g(x - c t) dt at each node. On the circle the integrand has period
/// 1/|c| in t, so whole periods are integrated once and multiplied.
inline NodeValues cesaro_flow(const TranslationFlow& flow, const FlowFunction& f, const FlowFunction& g, double r,
                              const QuadratureOptions& opt = {}) {
  require(r > 0.0 && std::isfinite(r), ErrorKind::BadParameter, "Cesaro radius must be > 0");
  check_flow_function(flow, f);
  check_flow_function(flow, g);
  NodeValues out;
  out.values.assign(flow.grid.size(), cplx{});
  if (is_zero(f) || is_zero(g)) return out;
  const double c = flow.rate;
  const double freq = detail::flow_frequency(f, c) + detail::flow_frequency(g, c);
  const double width = freq > 0.0 ? 0.5 / freq : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < flow.grid.size(); ++i) {
    const double x = flow.grid.nodes[i];
    auto h = [&](double t) { return evaluate(f, x + c * t) * evaluate(g, x - c * t); };
    auto piece = [&](double a, double b) {
      return integrate(h, detail::refine_breaks(detail::flow_breaks(f, g, x, c, a, b, false), width), opt);
    };
    Integral<cplx> total;
    if (flow.domain == FlowDomain::circle && c != 0.0 && r > 1.0 / std::abs(c)) {
      const double T = 1.0 / std::abs(c);
      const double whole = std::floor(r / T);
      auto one = piece(0.0, T);
      auto rest = r - whole * T > 0.0 ? piece(whole * T, r) : Integral<cplx>{};
      total.value = one.value * whole + rest.value;
      total.error = one.error * whole + rest.error;
    } else {
      total = piece(0.0, r);
    }
    out.values[i] = total.value / r;
    out.max_error = std::max(out.max_error, total.error / r);
  }
  return out;
}

/// int_{eps <= |t| <= sigma} f(x + c t) g(x - c t) / t dt, with the +t and -t halves paired
/// before integration. Panels grow geometrically from eps up to 1, then stay below a
/// quarter period of the integrand.
inline NodeValues hilbert_flow(const TranslationFlow& flow, const FlowFunction& f, const FlowFunction& g, double eps,
                               double sigma, const QuadratureOptions& opt = {}) {
  require(eps > 0.0 && sigma > eps && std::isfinite(sigma), ErrorKind::BadParameter, "need 0 < eps < sigma");
  check_flow_function(flow, f);
  check_flow_function(flow, g);
  NodeValues out;
  out.values.assign(flow.grid.size(), cplx{});
  if (is_zero(f) || is_zero(g)) return out;
  const double c = flow.rate;
  const double freq = detail::flow_frequency(f, c) + detail::flow_frequency(g, c);
  const double width = freq > 0.0 ? 0.25 / freq : 1.0;
  for (std::size_t i = 0; i < flow.grid.size(); ++i) {
    const double x = flow.grid.nodes[i];
    auto h = [&](double t) {
      return (evaluate(f, x + c * t) * evaluate(g, x - c * t) - evaluate(f, x - c * t) * evaluate(g, x + c * t)) / t;
    };
    std::vector<double> br = detail::flow_breaks(f, g, x, c, eps, sigma, true);
    for (double t = 2.0 * eps; t < std::min(1.0, sigma); t *= 2.0) br.push_back(t);
    if (sigma > 1.0 && eps < 1.0) br.push_back(1.0);
    auto r = integrate(h, detail::refine_breaks(std::move(br), width), opt);
    out.values[i] = r.value;
    out.max_error = std::max(out.max_error, r.error);
  }
  return out;
}

}  // namespace ergosc
