#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "averages.hpp"
#include "error.hpp"
#include "norms.hpp"
#include "sequence.hpp"
#include "systems.hpp"

namespace ergosc {

/// max_x |Phi_k((U^{n1} F)(U^{n2} G)) - conj(h_k)^2 (U^{k+n1} F)(U^{k+n2} G)|.
inline double conjugation_identity_check(const FactoredIsometry& u, const SpaceFunction& F, const SpaceFunction& G,
                                         std::int64_t n1, std::int64_t n2, std::int64_t k) {
  u.check_domain(F);
  u.check_domain(G);
  const auto pk = isometry_power(u, k);
  const auto a = apply_power(isometry_power(u, n1), F);
  const auto b = apply_power(isometry_power(u, n2), G);
  SpaceFunction prod(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) prod[x] = a[x] * b[x];
  const auto lhs = automorphism(pk, prod);
  const auto c = apply_power(isometry_power(u, k + n1), F);
  const auto d = apply_power(isometry_power(u, k + n2), G);
  double dev = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    const cplx hinv = std::conj(pk.multiplier[x]);
    dev = std::max(dev, std::abs(lhs[x] - hinv * hinv * c[x] * d[x]));
  }
  return dev;
}

/// T_j(f,g) = sum_n (U^n f)(U^{-n} g) s_j(n) for j in [u_1, u_R].
template <class Family>
IndexedFamily<cplx> space_forms(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                Family&& weights, const std::vector<std::int64_t>& breakpoints) {
  check_breakpoints(breakpoints);
  IndexedFamily<cplx> fam;
  fam.first = breakpoints.front();
  fam.weights = u.space().weights();
  for (std::int64_t j = breakpoints.front(); j <= breakpoints.back(); ++j)
    fam.members.push_back(weighted_biform_space(u, f, g, weights(j)));
  return fam;
}

/// Delta = (sum_r sup_{u_r <= j < u_{r+1}} |T_j - T_{u_{r+1}}|^2)^{1/2} pointwise on the space.
template <class Family>
std::vector<double> delta_statistic(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                    Family&& weights, const std::vector<std::int64_t>& breakpoints) {
  u.check_domain(f);
  u.check_domain(g);
  return square_function(space_forms(u, f, g, weights, breakpoints), breakpoints, OscVariant::left_closed);
}

/// The Z-side analogue: sequences Q_j = S_{s_j}(a,b) aligned on a common window.
template <class Family>
IndexedFamily<cplx> sequence_forms(const Sequence& a, const Sequence& b, Family&& weights,
                                   const std::vector<std::int64_t>& breakpoints) {
  check_breakpoints(breakpoints);
  std::vector<Sequence> seqs;
  std::int64_t lo = 0, hi = -1;
  bool any = false;
  for (std::int64_t j = breakpoints.front(); j <= breakpoints.back(); ++j) {
    seqs.push_back(weighted_biform_seq(a, b, weights(j)));
    const auto& s = seqs.back();
    if (s.empty()) continue;
    lo = any ? std::min(lo, s.lo) : s.lo;
    hi = any ? std::max(hi, s.hi()) : s.hi();
    any = true;
  }
  IndexedFamily<cplx> fam;
  fam.first = breakpoints.front();
  for (const auto& s : seqs) fam.members.push_back(s.window(lo, hi).values);
  fam.weights.assign(any ? static_cast<std::size_t>(hi - lo + 1) : 0, 1.0);
  return fam;
}

/// osc / (R^{1/4} ||a||_2 ||b||_2) for one Z-side trial.
template <class Family>
double sequence_ratio(const Sequence& a, const Sequence& b, Family&& weights, const std::vector<std::int64_t>& breakpoints) {
  const double np = lp_norm(a, 2.0) * lp_norm(b, 2.0);
  if (np == 0.0) return 0.0;
  const auto rep = oscillation(sequence_forms(a, b, weights, breakpoints), breakpoints, OscVariant::left_closed, np);
  return rep.fitted_constant;
}

struct TransferReport {
  double space_value = 0.0;
  double bound = 0.0;
  double zeta = 0.0;
  double norm_product = 0.0;
  std::size_t R = 0;
  double slack = 0.1;
  bool violated = false;
};

/// Both sides of ||Delta||_{L^{1,inf}} <= zeta R^{1/4} ||f||_2 ||g||_2 (1 + slack).
template <class Family>
TransferReport evaluate_transference(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                       Family&& weights, const std::vector<std::int64_t>& breakpoints, double zeta,
                                       double slack = 0.1) {
  TransferReport rep;
  rep.zeta = zeta;
  rep.slack = slack;
  rep.R = breakpoints.size();
  rep.norm_product = lp_norm(f, u.space(), 2.0) * lp_norm(g, u.space(), 2.0);
  const auto delta = delta_statistic(u, f, g, weights, breakpoints);
  rep.space_value = weak_l1_norm(delta, u.space());
  rep.bound = zeta * std::pow(static_cast<double>(rep.R), 0.25) * rep.norm_product * (1.0 + slack);
  rep.violated = rep.space_value > rep.bound;
  return rep;
}

/// As evaluate_transference, throwing BoundViolated when the transferred side exceeds the bound.
template <class Family>
TransferReport transference_experiment(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                       Family&& weights, const std::vector<std::int64_t>& breakpoints, double zeta,
                                       double slack = 0.1) {
  auto rep = evaluate_transference(u, f, g, weights, breakpoints, zeta, slack);
  if (rep.violated)
    fail(ErrorKind::BoundViolated, "transferred oscillation " + format_real(rep.space_value) + " exceeds bound " +
                                       format_real(rep.bound));
  return rep;
}

}  // namespace ergosc
