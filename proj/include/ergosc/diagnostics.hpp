#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "averages.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "norms.hpp"
#include "systems.hpp"

namespace ergosc {

enum class AverageKind { ergodic, hilbert, dyadic, flow_cesaro, flow_hilbert };

inline std::string_view to_string(AverageKind k) {
  switch (k) {
    case AverageKind::ergodic: return "ergodic";
    case AverageKind::hilbert: return "hilbert";
    case AverageKind::dyadic: return "dyadic";
    case AverageKind::flow_cesaro: return "flow-cesaro";
    case AverageKind::flow_hilbert: return "flow-hilbert";
  }
  return "?";
}

struct ConvergenceProbe {
  AverageKind kind = AverageKind::ergodic;
  std::vector<double> ladder;
  /// ||value(k_{i+1}) - value(k_i)||_inf
  std::vector<double> sup_deviation;
  /// the same difference in L^{p3}
  std::vector<double> lp_deviation;
  /// ||value(k_i) - oracle||_inf when an oracle was supplied
  std::vector<double> oracle_deviation;
};

inline void check_ladder(const std::vector<double>& ladder) {
  require(ladder.size() >= 3, ErrorKind::BadParameter, "ladder needs at least three points");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    require(ladder[i] > ladder[i - 1], ErrorKind::BadParameter, "ladder must be strictly increasing");
}

inline double sup_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

/// Evaluates the chosen space average along the ladder (radius r for ergodic/hilbert,
/// exponent j for dyadic with the given m).
inline ConvergenceProbe cauchy_probe(AverageKind kind, const FactoredIsometry& u, const SpaceFunction& f,
                                     const SpaceFunction& g, const std::vector<double>& ladder, double p3 = 1.0,
                                     const std::optional<SpaceFunction>& oracle = std::nullopt, int m = 1) {
  u.check_domain(f);
  u.check_domain(g);
  check_ladder(ladder);
  ConvergenceProbe probe;
  probe.kind = kind;
  probe.ladder = ladder;
  SpaceFunction prev;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    SpaceFunction v;
    switch (kind) {
      case AverageKind::ergodic: v = bilinear_ergodic(u, f, g, ladder[i]); break;
      case AverageKind::hilbert: v = bilinear_hilbert(u, f, g, ladder[i]); break;
      case AverageKind::dyadic: v = dyadic_ergodic(u, f, g, static_cast<std::int64_t>(ladder[i]), m); break;
      default: fail(ErrorKind::BadParameter, "flow averages are probed with flow_limit_probe");
    }
    if (i > 0) {
      probe.sup_deviation.push_back(sup_distance(v, prev));
      SpaceFunction diff(v.size());
      for (std::size_t x = 0; x < v.size(); ++x) diff[x] = v[x] - prev[x];
      probe.lp_deviation.push_back(lp_norm(diff, u.space(), p3));
    }
    if (oracle) probe.oracle_deviation.push_back(sup_distance(v, *oracle));
    prev = std::move(v);
  }
  return probe;
}

struct BridgeReport {
  /// max over k of (max_x |A_k - A~_j|) / bound(k); zero-bound cases count via the raw gap
  double worst_ratio = 0.0;
  double worst_gap = 0.0;
  std::int64_t worst_k = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

/// The j with 2^{j/m} <= k < 2^{(j+1)/m}.
inline std::int64_t bridge_index(std::int64_t k, int m) {
  auto j = static_cast<std::int64_t>(std::floor(m * std::log2(static_cast<double>(k))));
  while (std::exp2(static_cast<double>(j) / m) > static_cast<double>(k)) --j;
  while (std::exp2(static_cast<double>(j + 1) / m) <= static_cast<double>(k)) ++j;
  return j;
}

/// 2(k - 2^{j/m})/k + (2^{j/m} - [2^{j/m}])/k.
inline double bridge_bound(std::int64_t k, int m) {
  const double D = std::exp2(static_cast<double>(bridge_index(k, m)) / m);
  const double kk = static_cast<double>(k);
  return 2.0 * (kk - D) / kk + (D - std::floor(D)) / kk;
}

/// Compares A_k with the dyadic average below it for k = 1..k_max. Throws BoundViolated
/// (after the full scan) when some k exceeds the bound by more than `tol`.
inline BridgeReport bridge_check(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g, int m,
                                 std::int64_t k_max, double tol = 1e-12) {
  u.check_domain(f);
  u.check_domain(g);
  require(m >= 1 && k_max >= 1, ErrorKind::BadParameter, "bridge check needs m >= 1 and k_max >= 1");
  const auto& w = u.space().weights();
  require(std::abs(lp_norm(magnitudes(f), w, std::numeric_limits<double>::infinity()) - 1.0) <= 1e-12 &&
              std::abs(lp_norm(magnitudes(g), w, std::numeric_limits<double>::infinity()) - 1.0) <= 1e-12,
          ErrorKind::BadParameter, "bridge check needs sup norms equal to 1");
  BridgeReport rep;
  for (std::int64_t k = 1; k <= k_max; ++k) {
    const auto a = bilinear_ergodic(u, f, g, static_cast<double>(k));
    const auto d = dyadic_ergodic(u, f, g, bridge_index(k, m), m);
    const double gap = sup_distance(a, d);
    const double bound = bridge_bound(k, m);
    ++rep.checked;
    if (gap > bound + tol) ++rep.violations;
    const double ratio = bound > 0.0 ? gap / bound : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (ratio > rep.worst_ratio || (k == 1 && rep.worst_k == 0)) {
      rep.worst_ratio = ratio;
      rep.worst_gap = gap;
      rep.worst_k = k;
    }
  }
  if (rep.violations)
    fail(ErrorKind::BoundViolated, std::to_string(rep.violations) + " bridge bound violations, worst k = " +
                                       std::to_string(rep.worst_k));
  return rep;
}

enum class FlowSide { to_infinity, to_zero };

/// lim_{r -> inf} of the Cesaro flow average on the circle: sum_k a_k b_k e^{4 pi i k x}.
inline std::vector<cplx> cesaro_limit_infinity(const TrigPolynomial& f, const TrigPolynomial& g, const Grid& grid) {
  TrigPolynomial diag;
  for (const auto& [k, a] : f.coeffs)
    if (auto it = g.coeffs.find(k); it != g.coeffs.end()) diag.coeffs[2 * k] += a * it->second;
  return sample(diag, grid);
}

/// lim_{r -> 0}: f g.
inline std::vector<cplx> cesaro_limit_zero(const TrigPolynomial& f, const TrigPolynomial& g, const Grid& grid) {
  std::vector<cplx> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.nodes[i]) * g(grid.nodes[i]);
  return out;
}

/// Principal value of int f(x + c t) g(x - c t) dt / t: sum a_k b_l e^{2 pi i (k+l) x} i pi sign((k-l) c).
inline std::vector<cplx> hilbert_flow_limit(const TrigPolynomial& f, const TrigPolynomial& g, double c, const Grid& grid) {
  TrigPolynomial pv;
  for (const auto& [k, a] : f.coeffs)
    for (const auto& [l, b] : g.coeffs) {
      const double s = (k - l) * c;
      if (s != 0.0) pv.coeffs[k + l] += a * b * cplx{0.0, std::numbers::pi * (s > 0 ? 1.0 : -1.0)};
    }
  return sample(pv, grid);
}

struct FlowProbeReport {
  FlowSide side = FlowSide::to_infinity;
  std::vector<double> ladder;
  std::vector<double> deviation;
  std::vector<cplx> oracle;
  double final_deviation = 0.0;
  /// max(||E_0||_1, ||E_inf||_1) / (||f||_2 ||g||_2) on the grid
  double holder_ratio = 0.0;
};

inline FlowProbeReport flow_limit_probe(const TranslationFlow& flow, const FlowFunction& f, const FlowFunction& g,
                                        FlowSide side, const std::vector<double>& ladder,
                                        const QuadratureOptions& opt = {1e-10}) {
  const auto* tf = std::get_if<TrigPolynomial>(&f);
  const auto* tg = std::get_if<TrigPolynomial>(&g);
  require(tf && tg && flow.domain == FlowDomain::circle, ErrorKind::BadParameter,
          "flow limit probe needs trig polynomials on the circle");
  require(flow.rate != 0.0, ErrorKind::BadParameter, "flow limit probe needs a moving flow");
  require(!ladder.empty(), ErrorKind::BadParameter, "empty ladder");
  FlowProbeReport rep;
  rep.side = side;
  rep.ladder = ladder;
  const auto e0 = cesaro_limit_zero(*tf, *tg, flow.grid);
  const auto einf = cesaro_limit_infinity(*tf, *tg, flow.grid);
  rep.oracle = side == FlowSide::to_zero ? e0 : einf;
  for (double r : ladder) rep.deviation.push_back(sup_distance(cesaro_flow(flow, f, g, r, opt).values, rep.oracle));
  rep.final_deviation = rep.deviation.back();
  const double np = lp_norm(sample(f, flow.grid), flow.grid, 2.0) * lp_norm(sample(g, flow.grid), flow.grid, 2.0);
  if (np > 0.0)
    rep.holder_ratio = std::max(lp_norm(e0, flow.grid, 1.0), lp_norm(einf, flow.grid, 1.0)) / np;
  return rep;
}

}  // namespace ergosc
