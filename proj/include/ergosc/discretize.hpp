#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "averages.hpp"
#include "error.hpp"
#include "kernels.hpp"
#include "line.hpp"
#include "norms.hpp"
#include "sequence.hpp"

namespace ergosc {

/// Shapes supported on I = [-1/4, 1/4].
enum class Shape {
  box,       ///< indicator of I
  triangle,  ///< 2(1/4 - |u|)
  parabola,  ///< (1/4 - |u|)^2
};

inline double shape_value(Shape s, double u) {
  const double r = 0.25 - std::abs(u);
  if (r < 0.0) return 0.0;
  switch (s) {
    case Shape::box: return 1.0;
    case Shape::triangle: return 2.0 * r;
    case Shape::parabola: return r * r;
  }
  return 0.0;
}

/// Closed-form L^p norms of the shapes.
inline double shape_lp_norm(Shape s, double p) {
  require(p > 0.0, ErrorKind::BadExponent, "p must be in (0, inf]");
  switch (s) {
    case Shape::box:
      // |I| = 1/2
      return std::isinf(p) ? 1.0 : std::pow(0.5, 1.0 / p);
    case Shape::triangle:
      // 2 int_0^{1/4} (2r)^p dr = 2 * 2^p (1/4)^{p+1} / (p+1); p = 1 gives 1/8
      return std::isinf(p) ? 0.5 : std::pow(2.0 * std::pow(2.0, p) * std::pow(0.25, p + 1.0) / (p + 1.0), 1.0 / p);
    case Shape::parabola:
      // 2 int_0^{1/4} r^{2p} dr = 2 (1/4)^{2p+1} / (2p+1); p = 1 gives 1/96
      return std::isinf(p) ? 1.0 / 16.0 : std::pow(2.0 * std::pow(0.25, 2.0 * p + 1.0) / (2.0 * p + 1.0), 1.0 / p);
  }
  return 0.0;
}

/// x -> sum_n a_n shape(x - n). The pieces n + I are disjoint, so only the nearest n contributes.
template <class T>
LineFunction embed(const BasicSequence<T>& a, Shape s) {
  if (a.empty()) return {};
  std::vector<double> br;
  for (std::int64_t n = a.lo; n <= a.hi(); ++n) {
    const double c = static_cast<double>(n);
    br.insert(br.end(), {c - 0.25, c, c + 0.25});
  }
  return LineFunction(std::move(br), [a, s](double x) {
    const double n = std::round(x);
    return cplx(a[static_cast<std::int64_t>(n)]) * shape_value(s, x - n);
  });
}

/// Pointwise evaluation of the embedding without building a LineFunction.
template <class T>
cplx embed_at(const BasicSequence<T>& a, Shape s, double x) {
  const double n = std::round(x);
  return cplx(a[static_cast<std::int64_t>(n)]) * shape_value(s, x - n);
}

struct LambdaSequence {
  std::size_t block = 0;
  DiscreteKernel values;
  std::string provenance;
};

inline constexpr double lambda_grid_step = 1.0 / 512.0;

/// Lambda_n = sup over the family and x in [n - 1/4, n + 1/4] of |F_j'(x)|, by grid scan
/// with the derivative safety factor, for n in [-reach, reach].
inline DiscreteKernel derivative_sup_sequence(const std::vector<KernelSpec>& family, std::int64_t reach) {
  return DiscreteKernel::generate(-reach, reach, [&](std::int64_t n) {
    double s = 0.0;
    const int steps = static_cast<int>(std::lround(0.5 / lambda_grid_step));
    for (int i = 0; i <= steps; ++i) {
      const double x = static_cast<double>(n) - 0.25 + i * lambda_grid_step;
      for (const auto& k : family) s = std::max(s, std::abs(k.derivative(x)));
    }
    return derivative_safety * s;
  });
}

/// The family F_{j,r} = K_j - K_{u_{r+1}}, u_r <= j < u_{r+1}, of block r (1-based).
inline std::vector<KernelSpec> block_differences(const KernelSpec& k, int m, const std::vector<std::int64_t>& u, std::size_t r) {
  require(r >= 1 && r + 1 <= u.size(), ErrorKind::IndexOutOfRange, "block index out of range");
  DilationFamily fam(k, m);
  const KernelSpec top = fam.member(u[r]);
  std::vector<KernelSpec> out;
  for (std::int64_t j = u[r - 1]; j < u[r]; ++j) out.push_back(kernel_difference(fam.member(j), top));
  return out;
}

inline LambdaSequence lambda_sequence(const KernelSpec& k, int m, const std::vector<std::int64_t>& u, std::size_t r) {
  require(k.compact(), ErrorKind::BadParameter, "Lambda sequence needs a compactly supported kernel");
  check_breakpoints(u);
  LambdaSequence out;
  out.block = r;
  out.provenance = k.fingerprint + ";m=" + std::to_string(m) + ";r=" + std::to_string(r);
  const auto fam = block_differences(k, m, u, r);
  // Beyond alpha * d^{u_{r+1}} every member and its derivative vanish.
  const double edge = k.support_radius * std::exp2(static_cast<double>(u[r]) / m) + 0.25;
  out.values = derivative_sup_sequence(fam, static_cast<std::int64_t>(std::floor(edge)));
  return out;
}

/// Explicit constant C in ||Lambda^{(r)}||_1 <= C alpha beta (d^{-u_r} + u_{r+1} d^{-u_{r+1}}).
inline double lambda_l1_constant(int m) {
  const double d = std::exp2(1.0 / m);
  return 2.0 * d * d / (d - 1.0) + 2.0 * d + 2.0 + 1.5;
}

inline double lambda_l1_scale(const KernelSpec& k, int m, std::int64_t ur, std::int64_t ur1) {
  const double d = std::exp2(1.0 / m);
  return k.support_radius * k.derivative_sup * (std::pow(d, -static_cast<double>(ur)) + static_cast<double>(ur1) * std::pow(d, -static_cast<double>(ur1)));
}

/// Probe points: `per_unit` evenly spaced points per unit length plus n +- 1/8 at each integer.
inline std::vector<double> lemma3_probes(std::int64_t lo, std::int64_t hi, int per_unit = 8) {
  std::vector<double> xs;
  for (std::int64_t n = lo; n <= hi; ++n) {
    const double c = static_cast<double>(n);
    for (int i = 0; i < per_unit; ++i) xs.push_back(c - 0.5 + (i + 0.5) / per_unit);
    xs.push_back(c - 0.125);
    xs.push_back(c + 0.125);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

struct Lemma3Report {
  double max_violation = 0.0;
  double max_lhs = 0.0;
  double worst_x = 0.0;
  std::size_t probes = 0;
  double quadrature_error = 0.0;
};

/// Both sides of  P_{phi0}(S^{(N)}(a,b)) <= S^{(N)}(Pa,Pb) + P_{phi1}(S_Lambda(|a|,|b|))
/// at the probe points, where S^{(N)} is the sup over the family of the discrete
/// (resp. continuous) bilinear forms and P is the box embedding.
inline Lemma3Report lemma3_check(const std::vector<KernelSpec>& family, const Sequence& a, const Sequence& b,
                                 const std::vector<double>& probes, const QuadratureOptions& opt = {1e-9}) {
  Lemma3Report rep;
  rep.probes = probes.size();
  if (a.empty() || b.empty() || family.empty()) return rep;
  double reach = 0.0;
  for (const auto& k : family) {
    require(k.compact(), ErrorKind::BadParameter, "lemma check needs compact kernels");
    reach = std::max(reach, k.support_radius);
  }
  const auto kreach = static_cast<std::int64_t>(std::ceil(reach)) + 1;

  // Discrete side: sup_j |sum_k a_{n+k} b_{n-k} F_j(k)|.
  BasicSequence<double> discrete_sup;
  for (const auto& k : family) {
    const auto w = DiscreteKernel::generate(-kreach, kreach, [&](std::int64_t n) { return k.value(static_cast<double>(n)); });
    const auto s = weighted_biform_seq(a, b, w);
    if (discrete_sup.empty()) discrete_sup = BasicSequence<double>(s.lo, std::vector<double>(s.size(), 0.0));
    for (std::size_t i = 0; i < s.size(); ++i) discrete_sup.values[i] = std::max(discrete_sup.values[i], std::abs(s.values[i]));
  }

  // Error term: S_Lambda(|a|, |b|) with Lambda from the family's derivative sups.
  const auto lambda = derivative_sup_sequence(family, kreach);
  Sequence abs_a = a, abs_b = b;
  for (auto& v : abs_a.values) v = std::abs(v);
  for (auto& v : abs_b.values) v = std::abs(v);
  const auto error_seq = weighted_biform_seq(abs_a, abs_b, lambda);

  const LineFunction Pa = embed(a, Shape::box), Pb = embed(b, Shape::box);
  std::vector<double> sup_cont(probes.size(), 0.0);
  for (const auto& k : family) {
    const auto v = biform_realline(Pa, Pb, k, probes, opt);
    rep.quadrature_error = std::max(rep.quadrature_error, v.max_error);
    for (std::size_t i = 0; i < probes.size(); ++i) sup_cont[i] = std::max(sup_cont[i], std::abs(v.values[i]));
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double x = probes[i];
    const double lhs = std::abs(embed_at(discrete_sup, Shape::triangle, x));
    const double rhs = sup_cont[i] + std::abs(embed_at(error_seq, Shape::parabola, x));
    rep.max_lhs = std::max(rep.max_lhs, lhs);
    if (lhs - rhs > rep.max_violation) {
      rep.max_violation = lhs - rhs;
      rep.worst_x = x;
    }
  }
  return rep;
}

}  // namespace ergosc
