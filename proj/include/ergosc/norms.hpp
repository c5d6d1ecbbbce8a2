#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "averages.hpp"
#include "error.hpp"
#include "kernels.hpp"
#include "line.hpp"
#include "sequence.hpp"
#include "systems.hpp"

namespace ergosc {

/// lambda(y) = mass{|f| > y} as a right-continuous step function.
struct DistributionFunction {
  /// Distinct nonzero values of |f|, increasing.
  std::vector<double> levels;
  /// masses[i] = mass{|f| >= levels[i]}, non-increasing.
  std::vector<double> masses;

  double operator()(double y) const {
    auto it = std::upper_bound(levels.begin(), levels.end(), y);
    if (it == levels.end()) return 0.0;
    return masses[static_cast<std::size_t>(it - levels.begin())];
  }

  friend bool operator==(const DistributionFunction&, const DistributionFunction&) = default;
};

template <class T>
std::vector<double> magnitudes(const std::vector<T>& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
  return out;
}

/// Masses are accumulated over (|f|, weight) pairs in a canonical order, so any
/// measure-preserving rearrangement of the data yields bit-identical output.
inline DistributionFunction distribution(std::span<const double> mag, std::span<const double> weight) {
  require(mag.size() == weight.size(), ErrorKind::DomainMismatch, "values and weights differ in length");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < mag.size(); ++i)
    if (mag[i] > 0.0) pts.emplace_back(mag[i], weight[i]);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a > b; });
  DistributionFunction d;
  double mass = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mass += pts[i].second;
    if (i + 1 == pts.size() || pts[i + 1].first != pts[i].first) {
      d.levels.push_back(pts[i].first);
      d.masses.push_back(mass);
    }
  }
  std::reverse(d.levels.begin(), d.levels.end());
  std::reverse(d.masses.begin(), d.masses.end());
  return d;
}

template <class T>
DistributionFunction distribution(const std::vector<T>& f, const WeightedSpace& space) {
  require(f.size() == space.size(), ErrorKind::DomainMismatch, "function and space differ in size");
  const auto mag = magnitudes(f);
  return distribution(mag, space.weights());
}

inline DistributionFunction distribution(const Sequence& a) {
  const auto mag = magnitudes(a.values);
  const std::vector<double> w(a.size(), 1.0);
  return distribution(mag, w);
}

inline DistributionFunction distribution(const std::vector<cplx>& f, const Grid& grid) {
  require(f.size() == grid.size(), ErrorKind::DomainMismatch, "function and grid differ in size");
  const auto mag = magnitudes(f);
  return distribution(mag, grid.weights);
}

/// sup_y y lambda(y) = max over distinct values v of v * mass{|f| >= v}.
inline double weak_l1_norm(const DistributionFunction& d) {
  double best = 0.0;
  for (std::size_t i = 0; i < d.levels.size(); ++i) best = std::max(best, d.levels[i] * d.masses[i]);
  return best;
}

inline double weak_l1_norm(std::span<const double> mag, std::span<const double> weight) {
  return weak_l1_norm(distribution(mag, weight));
}

template <class T>
double weak_l1_norm(const std::vector<T>& f, const WeightedSpace& space) {
  return weak_l1_norm(distribution(f, space));
}

inline double weak_l1_norm(const Sequence& a) { return weak_l1_norm(distribution(a)); }

inline double lp_norm(std::span<const double> mag, std::span<const double> weight, double p) {
  require(mag.size() == weight.size(), ErrorKind::DomainMismatch, "values and weights differ in length");
  require(p > 0.0, ErrorKind::BadExponent, "p must be in (0, inf]");
  if (std::isinf(p)) return mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  double s = 0.0;
  for (std::size_t i = 0; i < mag.size(); ++i) s += weight[i] * std::pow(mag[i], p);
  return std::pow(s, 1.0 / p);
}

template <class T>
double lp_norm(const std::vector<T>& f, const WeightedSpace& space, double p) {
  require(f.size() == space.size(), ErrorKind::DomainMismatch, "function and space differ in size");
  const auto mag = magnitudes(f);
  return lp_norm(mag, space.weights(), p);
}

inline double lp_norm(const Sequence& a, double p) {
  const auto mag = magnitudes(a.values);
  const std::vector<double> w(a.size(), 1.0);
  return lp_norm(mag, w, p);
}

inline double lp_norm(const std::vector<cplx>& f, const Grid& grid, double p) {
  require(f.size() == grid.size(), ErrorKind::DomainMismatch, "function and grid differ in size");
  const auto mag = magnitudes(f);
  return lp_norm(mag, grid.weights, p);
}

/// p3 with 1/p3 = 1/p1 + 1/p2, after checking 1 < p1, p2 < inf and 1/p3 < 3/2.
inline double holder_exponent(double p1, double p2) {
  require(p1 > 1.0 && std::isfinite(p1), ErrorKind::BadExponent, "p1 must lie in (1, inf)");
  require(p2 > 1.0 && std::isfinite(p2), ErrorKind::BadExponent, "p2 must lie in (1, inf)");
  const double inv = 1.0 / p1 + 1.0 / p2;
  require(inv < 1.5, ErrorKind::BadExponent, "1/p1 + 1/p2 = " + format_real(inv) + " is not below 3/2");
  return 1.0 / inv;
}

enum class OscVariant {
  /// sup over u_r <= n < u_{r+1} of |f_n - f_{u_{r+1}}|
  left_closed,
  /// sup over u_r < n <= u_{r+1} of |f_n - f_{u_r}|
  right_closed,
};

inline std::string_view to_string(OscVariant v) { return v == OscVariant::left_closed ? "left" : "right"; }

/// f_first, f_{first+1}, ... on a common measure.
template <class T = cplx>
struct IndexedFamily {
  std::int64_t first = 0;
  std::vector<std::vector<T>> members;
  std::vector<double> weights;

  std::int64_t last() const { return first + static_cast<std::int64_t>(members.size()) - 1; }
  const std::vector<T>& at(std::int64_t n) const { return members[static_cast<std::size_t>(n - first)]; }
  std::size_t points() const { return weights.size(); }
};

struct OscillationReport {
  std::vector<std::int64_t> breakpoints;
  double value = 0.0;
  double norm_product = 1.0;
  std::size_t R = 0;
  double fitted_constant = 0.0;
  OscVariant variant = OscVariant::left_closed;
  std::string fingerprint;
};

inline void check_breakpoints(const std::vector<std::int64_t>& u) {
  require(u.size() >= 2, ErrorKind::BadParameter, "oscillation needs at least two breakpoints");
  for (std::size_t i = 1; i < u.size(); ++i)
    require(u[i] > u[i - 1], ErrorKind::BadParameter, "breakpoints must be strictly increasing");
}

/// Pointwise (sum_r sup_block |f_n - f_ref|^2)^{1/2}.
template <class T>
std::vector<double> square_function(const IndexedFamily<T>& fam, const std::vector<std::int64_t>& u, OscVariant variant) {
  check_breakpoints(u);
  require(u.front() >= fam.first && u.back() <= fam.last(), ErrorKind::IndexOutOfRange,
          "family does not cover indices " + std::to_string(u.front()) + ".." + std::to_string(u.back()));
  const std::size_t npts = fam.points();
  std::vector<double> sq(npts, 0.0), block(npts);
  for (std::size_t r = 0; r + 1 < u.size(); ++r) {
    std::fill(block.begin(), block.end(), 0.0);
    const bool left = variant == OscVariant::left_closed;
    const auto& ref = fam.at(left ? u[r + 1] : u[r]);
    const std::int64_t n0 = left ? u[r] : u[r] + 1, n1 = left ? u[r + 1] - 1 : u[r + 1];
    for (std::int64_t n = n0; n <= n1; ++n) {
      const auto& fn = fam.at(n);
      require(fn.size() == npts, ErrorKind::DomainMismatch, "family member has the wrong size");
      for (std::size_t x = 0; x < npts; ++x) block[x] = std::max(block[x], std::abs(fn[x] - ref[x]));
    }
    for (std::size_t x = 0; x < npts; ++x) sq[x] += block[x] * block[x];
  }
  for (auto& v : sq) v = std::sqrt(v);
  return sq;
}

template <class T>
OscillationReport oscillation(const IndexedFamily<T>& fam, const std::vector<std::int64_t>& u, OscVariant variant,
                              double norm_product = 1.0) {
  OscillationReport rep;
  const auto sq = square_function(fam, u, variant);
  rep.breakpoints = u;
  rep.R = u.size();
  rep.variant = variant;
  rep.value = weak_l1_norm(sq, fam.weights);
  rep.norm_product = norm_product;
  rep.fitted_constant = norm_product > 0.0 ? rep.value / (norm_product * std::pow(static_cast<double>(rep.R), 0.25)) : 0.0;
  return rep;
}

/// Least-squares slope of log(value / norm_product) against log R.
inline double exponent_fit(const std::vector<std::pair<double, double>>& points, double norm_product = 1.0) {
  require(norm_product > 0.0, ErrorKind::DegenerateFit, "norm product must be positive");
  std::vector<double> xs, ys;
  for (const auto& [R, v] : points) {
    require(R > 0.0 && v > 0.0 && std::isfinite(v), ErrorKind::DegenerateFit, "fit needs positive finite values");
    xs.push_back(std::log(R));
    ys.push_back(std::log(v / norm_product));
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  require(distinct.size() >= 3, ErrorKind::DegenerateFit, "fit needs at least three distinct R values");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

/// Oscillation of x -> int F(x+y) G(x-y) (delta_{d^k} K)(y) dy over the breakpoints, on an x grid.
inline OscillationReport oscillation_realline(const LineFunction& F, const LineFunction& G, const KernelSpec& k, int m,
                                              const std::vector<std::int64_t>& u, const Grid& xgrid,
                                              OscVariant variant = OscVariant::left_closed,
                                              const QuadratureOptions& opt = {}) {
  check_breakpoints(u);
  DilationFamily fam(k, m);
  IndexedFamily<cplx> values;
  values.first = u.front();
  values.weights = xgrid.weights;
  for (std::int64_t j = u.front(); j <= u.back(); ++j)
    values.members.push_back(biform_realline(F, G, fam.member(j), xgrid.nodes, opt).values);
  const double np = line_lp_norm(F, 2.0) * line_lp_norm(G, 2.0);
  auto rep = oscillation(values, u, variant, np);
  rep.fingerprint = k.fingerprint + ";m=" + std::to_string(m);
  return rep;
}

}  // namespace ergosc
