#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"
#include "sequence.hpp"

namespace ergosc {

enum class Parity { even, odd, none };

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Smooth real kernel with the metadata the oscillation machinery needs.
struct KernelSpec {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// K(x) = 0 whenever |x| > support_radius; infinity for non-compact kernels.
  double support_radius = 0.0;
  /// Upper bound for sup |K'|.
  double derivative_sup = 0.0;
  Parity parity = Parity::none;
  std::map<std::string, double> parameters;
  /// Points where the closed form changes branch; quadrature keeps them as panel edges.
  std::vector<double> breakpoints;
  /// K(x) = 1/x exactly for |x| >= reciprocal_tail.
  std::optional<double> reciprocal_tail;
  /// Construction fingerprint, recorded next to every fitted constant.
  std::string fingerprint;

  double operator()(double x) const { return value(x); }
  bool compact() const { return std::isfinite(support_radius); }
};

namespace detail {

inline double exp_inv(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
inline double exp_inv_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace detail

/// Smooth step rising from 0 at t <= 0 to 1 at t >= 1, flat to all orders at both ends.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = detail::exp_inv(t), b = detail::exp_inv(1.0 - t);
  return a / (a + b);
}

inline double smoothstep_prime(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = detail::exp_inv(t), b = detail::exp_inv(1.0 - t);
  const double da = detail::exp_inv_prime(t), db = -detail::exp_inv_prime(1.0 - t);
  return (da * b - a * db) / ((a + b) * (a + b));
}

/// sup |fn| over a uniform grid of `per_unit` points per unit length on [lo, hi].
template <class F>
double grid_sup(F&& fn, double lo, double hi, double per_unit = 1e4) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) * per_unit));
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = n == 0 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    s = std::max(s, std::abs(fn(x)));
  }
  return s;
}

inline constexpr double derivative_safety = 1.05;

inline KernelSpec zero_kernel() {
  KernelSpec k;
  k.value = [](double) { return 0.0; };
  k.derivative = [](double) { return 0.0; };
  k.parity = Parity::even;
  k.fingerprint = "zero";
  return k;
}

inline KernelSpec bump_kernel(double width) {
  require(width > 0.0 && std::isfinite(width), ErrorKind::BadParameter, "bump width must be > 0");
  KernelSpec k;
  k.value = [width](double x) {
    const double u = x / width;
    return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
  };
  k.derivative = [width](double x) {
    const double u = x / width;
    if (!(std::abs(u) < 1.0)) return 0.0;
    const double q = 1.0 - u * u;
    return -std::exp(-1.0 / q) * 2.0 * u / (width * q * q);
  };
  k.support_radius = std::ceil(width);
  k.derivative_sup = derivative_safety * grid_sup(k.derivative, -width, width);
  k.parity = Parity::even;
  k.parameters = {{"width", width}};
  k.breakpoints = {-width, width};
  k.fingerprint = "bump(width=" + format_real(width) + ")";
  return k;
}

/// Equal to 1 on [0,1], 0 outside (-1/M, 1+1/M), smoothstep flanks in between.
inline KernelSpec plateau_kernel(int M) {
  require(M >= 2, ErrorKind::BadParameter, "plateau kernel needs M >= 2");
  const double inv = 1.0 / M, mm = M;
  KernelSpec k;
  k.value = [inv, mm](double x) {
    if (x <= -inv || x >= 1.0 + inv) return 0.0;
    if (x >= 0.0 && x <= 1.0) return 1.0;
    return x < 0.0 ? smoothstep((x + inv) * mm) : smoothstep((1.0 + inv - x) * mm);
  };
  k.derivative = [inv, mm](double x) {
    if (x <= -inv || x >= 1.0 + inv || (x >= 0.0 && x <= 1.0)) return 0.0;
    return x < 0.0 ? mm * smoothstep_prime((x + inv) * mm) : -mm * smoothstep_prime((1.0 + inv - x) * mm);
  };
  k.support_radius = std::ceil(1.0 + inv);
  k.derivative_sup = derivative_safety * grid_sup(k.derivative, -inv, 1.0 + inv);
  k.parameters = {{"M", mm}};
  k.breakpoints = {-inv, 0.0, 1.0, 1.0 + inv};
  k.fingerprint = "plateau(M=" + std::to_string(M) + ")";
  return k;
}

/// Odd kernel: 1/x for |x| >= 1, 0 for |x| <= 1 - 1/M, smoothstep(M(|x| - 1 + 1/M))/x between.
inline KernelSpec hilbert_kernel(int M) {
  require(M >= 2, ErrorKind::BadParameter, "hilbert kernel needs M >= 2");
  const double mm = M, inner = 1.0 - 1.0 / M;
  KernelSpec k;
  k.value = [mm, inner](double x) {
    const double r = std::abs(x);
    if (r >= 1.0) return 1.0 / x;
    if (r <= inner) return 0.0;
    return smoothstep(mm * (r - inner)) / x;
  };
  k.derivative = [mm, inner](double x) {
    const double r = std::abs(x);
    if (r >= 1.0) return -1.0 / (x * x);
    if (r <= inner) return 0.0;
    return mm * smoothstep_prime(mm * (r - inner)) / r - smoothstep(mm * (r - inner)) / (r * r);
  };
  k.support_radius = std::numeric_limits<double>::infinity();
  // |K'| <= 1/x^2 <= 1 beyond |x| = 1, so the scan over [-2, 2] sees the global sup.
  k.derivative_sup = derivative_safety * grid_sup(k.derivative, -2.0, 2.0);
  k.parity = Parity::odd;
  k.parameters = {{"M", mm}};
  k.breakpoints = {-1.0, -inner, inner, 1.0};
  k.reciprocal_tail = 1.0;
  k.fingerprint = "hilbert(M=" + std::to_string(M) + ")";
  const double band_sup = grid_sup(k.value, inner, 1.0);
  require(band_sup <= 2.0, ErrorKind::BoundViolated, "transition band exceeds 2 in modulus");
  return k;
}

/// (delta_xi k)(x) = k(x / xi) / xi.
inline KernelSpec dilate(const KernelSpec& k, double xi) {
  require(xi > 0.0 && std::isfinite(xi), ErrorKind::BadParameter, "dilation factor must be > 0");
  if (xi == 1.0) return k;
  KernelSpec out;
  auto base = k.value;
  auto base_d = k.derivative;
  std::optional<double> tail;
  if (k.reciprocal_tail) tail = *k.reciprocal_tail * xi;
  out.value = [base, xi, tail](double x) {
    if (tail && std::abs(x) >= *tail) return 1.0 / x;
    return base(x / xi) / xi;
  };
  out.derivative = [base_d, xi, tail](double x) {
    if (tail && std::abs(x) >= *tail) return -1.0 / (x * x);
    return base_d(x / xi) / (xi * xi);
  };
  out.support_radius = k.support_radius * xi;
  out.derivative_sup = k.derivative_sup / (xi * xi);
  out.parity = k.parity;
  out.parameters = k.parameters;
  out.parameters["xi"] = (k.parameters.count("xi") ? k.parameters.at("xi") : 1.0) * xi;
  for (double b : k.breakpoints) out.breakpoints.push_back(b * xi);
  out.reciprocal_tail = tail;
  out.fingerprint = "dilate(" + k.fingerprint + "," + format_real(xi) + ")";
  return out;
}

/// a - b. Two kernels with reciprocal tails cancel beyond the larger tail radius,
/// so the difference is compactly supported there.
inline KernelSpec kernel_difference(const KernelSpec& a, const KernelSpec& b) {
  KernelSpec out;
  auto va = a.value, vb = b.value, da = a.derivative, db = b.derivative;
  std::optional<double> cut;
  if (a.reciprocal_tail && b.reciprocal_tail) cut = std::max(*a.reciprocal_tail, *b.reciprocal_tail);
  out.value = [va, vb, cut](double x) { return cut && std::abs(x) >= *cut ? 0.0 : va(x) - vb(x); };
  out.derivative = [da, db, cut](double x) { return cut && std::abs(x) >= *cut ? 0.0 : da(x) - db(x); };
  out.support_radius = cut ? *cut : std::max(a.support_radius, b.support_radius);
  out.derivative_sup = a.derivative_sup + b.derivative_sup;
  out.parity = a.parity == b.parity ? a.parity : Parity::none;
  out.breakpoints = a.breakpoints;
  out.breakpoints.insert(out.breakpoints.end(), b.breakpoints.begin(), b.breakpoints.end());
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  out.breakpoints.erase(std::unique(out.breakpoints.begin(), out.breakpoints.end()), out.breakpoints.end());
  out.fingerprint = "diff(" + a.fingerprint + "," + b.fingerprint + ")";
  return out;
}

/// Dyadic-type dilation family K_j = delta_{d^j} K with d = 2^{1/m}.
struct DilationFamily {
  KernelSpec base;
  int m = 1;

  DilationFamily(KernelSpec k, int m_) : base(std::move(k)), m(m_) {
    require(m >= 1, ErrorKind::BadParameter, "dilation family needs m >= 1");
  }

  double ratio() const { return std::exp2(1.0 / m); }
  double scale(std::int64_t j) const { return std::exp2(static_cast<double>(j) / m); }
  KernelSpec member(std::int64_t j) const { return dilate(base, scale(j)); }
};

/// The sampled kernels at scale D = 2^{j/m}: averaging part A(n) = K(n/D)/D and
/// truncated reciprocal H(n) = 1/n on |n| <= D, and their difference.
struct DiscreteFamily {
  DiscreteKernel averaging;
  DiscreteKernel reciprocal;
  DiscreteKernel difference;
  double scale = 1.0;
};

/// `clip` limits the stored window to |n| <= clip, for scales too large to materialize.
inline DiscreteFamily sample_discrete_family(int M, int m, std::int64_t j, std::optional<std::int64_t> clip = {}) {
  require(M >= 2 && m >= 1 && j >= 1, ErrorKind::BadParameter, "discrete family needs M >= 2, m >= 1, j >= 1");
  const KernelSpec k = hilbert_kernel(M);
  DiscreteFamily fam;
  fam.scale = std::exp2(static_cast<double>(j) / m);
  const double D = fam.scale;
  std::int64_t reach;
  if (clip && static_cast<double>(*clip) < D)
    reach = *clip;
  else
    reach = static_cast<std::int64_t>(std::floor(D));
  fam.averaging = DiscreteKernel::generate(-reach, reach, [&](std::int64_t n) {
    return k.value(static_cast<double>(n) / D) / D;
  });
  fam.reciprocal = DiscreteKernel::generate(-reach, reach, [](std::int64_t n) {
    return n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  });
  fam.difference = fam.averaging - fam.reciprocal;
  return fam;
}

/// Weights collapsed modulo a period P: W(c) = sum over n = c mod P of w(n).
template <class T>
std::vector<T> fold_weights(const BasicSequence<T>& w, std::int64_t period) {
  require(period >= 1, ErrorKind::BadParameter, "fold period must be >= 1");
  std::vector<T> out(static_cast<std::size_t>(period), T{});
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::int64_t n = w.lo + static_cast<std::int64_t>(i);
    out[static_cast<std::size_t>(((n % period) + period) % period)] += w.values[i];
  }
  return out;
}

/// The difference kernel D_{j,M,m} folded modulo P without materializing it.
/// Writing D(n) = -sign(n) phi(|n|)/|n| with phi(r) = 1 - S(M(r/D - 1 + 1/M)) on 0 < r <= D,
/// residue sums of phi(r)/r are summed directly up to a split point r_s and the smooth
/// remainder is replaced by its Euler-Maclaurin expansion with step P.
inline std::vector<double> folded_difference_weights(int M, int m, std::int64_t j, std::int64_t period,
                                                     double direct_limit = 4194304.0) {
  require(M >= 2 && m >= 1 && j >= 1 && period >= 1, ErrorKind::BadParameter, "bad folded-family parameters");
  const double D = std::exp2(static_cast<double>(j) / m);
  const double inner = 1.0 - 1.0 / M;
  const double P = static_cast<double>(period);
  auto phi = [&](double r) { return 1.0 - smoothstep(M * (r / D - inner)); };
  std::vector<double> V(static_cast<std::size_t>(period), 0.0);
  const bool direct = D <= std::max(direct_limit, 1000.0 * P * M);
  const double split = direct ? std::floor(D) : std::min(std::floor(inner * D / 2.0), P * 4096.0);
  for (std::int64_t r = 1; static_cast<double>(r) <= split; ++r) {
    const double rr = static_cast<double>(r);
    V[static_cast<std::size_t>(r % period)] += (rr <= inner * D ? 1.0 : phi(rr)) / rr;
  }
  if (!direct) {
    // int_a^1 (1 - S(M(x - a)))/x dx with a = 1 - 1/M; the continuous remainder is
    // (ln(aD / r_s) + band) / P.
    auto integrand = [&](double x) { return (1.0 - smoothstep(M * (x - inner))) / x; };
    const double band = integrate_panels(integrand, {inner, 1.0}, {1e-15, 1u << 14}).value;
    const auto s = static_cast<std::int64_t>(split);
    for (std::int64_t c = 0; c < period; ++c) {
      std::int64_t rs = s - (s % period) + c;
      if (rs <= s) rs += period;
      const double x = static_cast<double>(rs);
      V[static_cast<std::size_t>(c)] += (std::log(inner * D / x) + band) / P + 0.5 / x + P / (12.0 * x * x) -
                                          P * P * P / (120.0 * x * x * x * x);
    }
  }
  std::vector<double> W(static_cast<std::size_t>(period));
  for (std::int64_t c = 0; c < period; ++c)
    W[static_cast<std::size_t>(c)] = V[static_cast<std::size_t>((period - c) % period)] - V[static_cast<std::size_t>(c)];
  return W;
}

struct FourierGrid {
  double y_min = 0.05;
  double y_max = 20.0;
  std::size_t points = 200;
};

struct FourierReport {
  /// [0]: sup |K^(y)| max(1,|y|); [n]: sup |K^^(n)(y)| max(|y|^{n-1}, |y|^{n+1}).
  std::vector<double> sups;
  std::vector<double> refined_sups;
  double max_relative_change = 0.0;
  bool stable = true;
};

namespace detail {

/// n-th derivative of K^ at y, K^(y) = int K(x) e^{-2 pi i x y} dx, over the compact part
/// |x| <= R, plus the closed-form reciprocal tail when present.
inline cplx fourier_derivative(const KernelSpec& k, int order, double y, double tol) {
  const double R = k.reciprocal_tail ? *k.reciprocal_tail : k.support_radius;
  const double two_pi = 2.0 * std::numbers::pi;
  auto integrand = [&](double x) {
    const cplx phase = std::polar(1.0, -two_pi * x * y);
    return k.value(x) * std::pow(cplx{0.0, -two_pi * x}, order) * phase;
  };
  std::vector<double> br = uniform_breaks(-R, R, std::min(0.5, 1.0 / (4.0 * std::abs(y) + 1e-300)));
  for (double b : k.breakpoints)
    if (std::abs(b) < R) br.push_back(b);
  cplx total = R > 0 ? integrate_panels(integrand, br, {tol, 1u << 16}).value : cplx{};
  if (k.reciprocal_tail) {
    // int_{|x|>=R} e^{-2 pi i x y}/x dx = -2i sign(y) (pi/2 - Si(2 pi R |y|)); derivatives by
    // central differences.
    auto tail = [R, two_pi](double yy) {
      const double s = yy > 0 ? 1.0 : (yy < 0 ? -1.0 : 0.0);
      return cplx{0.0, -2.0 * s * (std::numbers::pi / 2 - sine_integral(two_pi * R * std::abs(yy)))};
    };
    const double h = 1e-3 * std::max(1e-2, std::abs(y));
    cplx t{};
    switch (order) {
      case 0: t = tail(y); break;
      case 1: t = (tail(y + h) - tail(y - h)) / (2 * h); break;
      case 2: t = (tail(y + h) - 2.0 * tail(y) + tail(y - h)) / (h * h); break;
      default: t = (tail(y + 2 * h) - 2.0 * tail(y + h) + 2.0 * tail(y - h) - tail(y - 2 * h)) / (2 * h * h * h); break;
    }
    total += t;
  }
  return total;
}

inline std::vector<double> fourier_sups(const KernelSpec& k, int orders, const FourierGrid& g, double tol) {
  std::vector<double> sups(static_cast<std::size_t>(orders) + 1, 0.0);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double t = g.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(g.points - 1);
    const double ay = g.y_min * std::pow(g.y_max / g.y_min, t);
    for (double y : {ay, -ay}) {
      for (int n = 0; n <= orders; ++n) {
        const double weight =
            n == 0 ? std::max(1.0, ay) : std::max(std::pow(ay, n - 1), std::pow(ay, n + 1));
        sups[static_cast<std::size_t>(n)] =
            std::max(sups[static_cast<std::size_t>(n)], std::abs(fourier_derivative(k, n, y, tol)) * weight);
      }
    }
  }
  return sups;
}

}  // namespace detail

/// Smoke check of the Fourier decay hypotheses on a logarithmic frequency grid,
/// repeated on a doubled grid with a tighter quadrature tolerance.
inline FourierReport fourier_condition_check(const KernelSpec& k, int derivative_orders, const FourierGrid& grid = {}) {
  require(derivative_orders >= 0 && derivative_orders <= 3, ErrorKind::BadParameter, "derivative orders must be in [0,3]");
  require(k.compact() || k.reciprocal_tail.has_value(), ErrorKind::BadParameter, "kernel must be integrable away from a reciprocal tail");
  FourierReport rep;
  rep.sups = detail::fourier_sups(k, derivative_orders, grid, 1e-9);
  FourierGrid fine = grid;
  fine.points = 2 * grid.points - 1;
  rep.refined_sups = detail::fourier_sups(k, derivative_orders, fine, 1e-11);
  for (std::size_t n = 0; n < rep.sups.size(); ++n) {
    const double a = rep.sups[n], b = rep.refined_sups[n];
    const double change = std::max(a, b) == 0.0 ? 0.0 : std::abs(a - b) / std::max(a, b);
    rep.max_relative_change = std::max(rep.max_relative_change, change);
    if (!std::isfinite(a) || !std::isfinite(b)) rep.stable = false;
  }
  if (rep.max_relative_change > 0.05) rep.stable = false;
  return rep;
}

}  // namespace ergosc

namespace ergosc {

/// n -> k(n) on the integers inside the support of a compact kernel.
inline DiscreteKernel sample_kernel(const KernelSpec& k) {
  require(k.compact(), ErrorKind::BadParameter, "sampling needs a compactly supported kernel");
  const auto reach = static_cast<std::int64_t>(std::floor(k.support_radius));
  return DiscreteKernel::generate(-reach, reach, [&](std::int64_t n) { return k.value(static_cast<double>(n)); });
}

}  // namespace ergosc
