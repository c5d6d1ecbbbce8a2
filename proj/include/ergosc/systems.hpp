#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace ergosc {

using SpaceFunction = std::vector<cplx>;

/// Finite model measure space: opaque point ids with strictly positive weights.
class WeightedSpace {
 public:
  WeightedSpace() = default;

  explicit WeightedSpace(std::vector<double> weights) : weights_(std::move(weights)) {
    ids_.resize(weights_.size());
    std::iota(ids_.begin(), ids_.end(), std::int64_t{0});
    validate();
  }

  WeightedSpace(std::vector<std::int64_t> ids, std::vector<double> weights)
      : ids_(std::move(ids)), weights_(std::move(weights)) {
    validate();
  }

  static WeightedSpace counting(std::size_t n) { return WeightedSpace(std::vector<double>(n, 1.0)); }

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::int64_t id(std::size_t i) const { return ids_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::int64_t>& ids() const { return ids_; }

  double total_mass() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

  std::optional<std::size_t> index_of(std::int64_t point) const {
    auto it = std::find(ids_.begin(), ids_.end(), point);
    if (it == ids_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ids_.begin());
  }

  friend bool operator==(const WeightedSpace&, const WeightedSpace&) = default;

 private:
  void validate() const {
    require(ids_.size() == weights_.size(), ErrorKind::BadParameter, "ids and weights differ in length");
    for (double w : weights_)
      require(std::isfinite(w) && w > 0.0, ErrorKind::BadParameter, "weights must be finite and > 0");
    std::vector<std::int64_t> sorted = ids_;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::BadParameter,
            "point ids must be unique");
  }

  std::vector<std::int64_t> ids_;
  std::vector<double> weights_;
};

/// U^j in factored form: (U^j f)(x) = multiplier[x] * f(permutation[x]).
struct IsometryPower {
  std::int64_t exponent = 0;
  std::vector<cplx> multiplier;
  std::vector<std::size_t> permutation;

  std::size_t size() const { return permutation.size(); }

  static IsometryPower identity(std::size_t n) {
    IsometryPower p;
    p.multiplier.assign(n, cplx{1.0, 0.0});
    p.permutation.resize(n);
    std::iota(p.permutation.begin(), p.permutation.end(), std::size_t{0});
    return p;
  }
};

/// Invertible L^p isometry (Uf)(x) = h(x) f(pi(x)) with |h| = 1 and pi weight-preserving.
class FactoredIsometry {
 public:
  FactoredIsometry(WeightedSpace space, std::vector<cplx> multiplier, std::vector<std::size_t> permutation)
      : space_(std::move(space)), multiplier_(std::move(multiplier)), permutation_(std::move(permutation)) {
    const std::size_t n = space_.size();
    require(permutation_.size() == n, ErrorKind::NonBijective, "permutation length differs from space size");
    require(multiplier_.size() == n, ErrorKind::DomainMismatch, "multiplier length differs from space size");
    inverse_.assign(n, n);
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t y = permutation_[x];
      require(y < n && inverse_[y] == n, ErrorKind::NonBijective, "permutation is not a bijection");
      inverse_[y] = x;
    }
    for (std::size_t x = 0; x < n; ++x) {
      require(std::abs(std::abs(multiplier_[x]) - 1.0) <= 1e-12, ErrorKind::NotUnimodular,
              "multiplier modulus differs from 1 at point " + std::to_string(space_.id(x)));
      require(space_.weight(permutation_[x]) == space_.weight(x), ErrorKind::NotMeasurePreserving,
              "permutation moves point " + std::to_string(space_.id(x)) + " to a point of different weight");
    }
    inverse_multiplier_.resize(n);
    for (std::size_t y = 0; y < n; ++y) inverse_multiplier_[y] = std::conj(multiplier_[inverse_[y]]);
  }

  const WeightedSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  const std::vector<cplx>& multiplier() const { return multiplier_; }
  const std::vector<std::size_t>& permutation() const { return permutation_; }
  const std::vector<std::size_t>& inverse_permutation() const { return inverse_; }

  bool pure_permutation() const {
    return std::all_of(multiplier_.begin(), multiplier_.end(), [](cplx h) { return h == cplx{1.0, 0.0}; });
  }

  void check_domain(const SpaceFunction& f) const {
    require(f.size() == size(), ErrorKind::DomainMismatch,
            "function has " + std::to_string(f.size()) + " values, space has " + std::to_string(size()));
  }

  /// out = U f
  void step_forward(const SpaceFunction& f, SpaceFunction& out) const {
    out.resize(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) out[x] = multiplier_[x] * f[permutation_[x]];
  }

  /// out = U^{-1} f
  void step_backward(const SpaceFunction& f, SpaceFunction& out) const {
    out.resize(f.size());
    for (std::size_t y = 0; y < f.size(); ++y) out[y] = inverse_multiplier_[y] * f[inverse_[y]];
  }

  IsometryPower unit_power(bool inverse) const {
    IsometryPower p;
    p.exponent = inverse ? -1 : 1;
    p.multiplier = inverse ? inverse_multiplier_ : multiplier_;
    p.permutation = inverse ? inverse_ : permutation_;
    return p;
  }

 private:
  WeightedSpace space_;
  std::vector<cplx> multiplier_;
  std::vector<std::size_t> permutation_;
  std::vector<std::size_t> inverse_;
  std::vector<cplx> inverse_multiplier_;
};

inline FactoredIsometry make_isometry(WeightedSpace space, std::vector<cplx> multiplier,
                                      std::vector<std::size_t> permutation) {
  return FactoredIsometry(std::move(space), std::move(multiplier), std::move(permutation));
}

inline FactoredIsometry identity_isometry(WeightedSpace space) {
  auto p = IsometryPower::identity(space.size());
  return FactoredIsometry(std::move(space), std::move(p.multiplier), std::move(p.permutation));
}

/// Z_n with counting measure and (Uf)(x) = f(x + step mod n).
inline FactoredIsometry rotation(std::size_t n, std::int64_t step = 1) {
  require(n > 0, ErrorKind::BadParameter, "rotation needs n > 0");
  const auto nn = static_cast<std::int64_t>(n);
  std::vector<std::size_t> perm(n);
  for (std::int64_t x = 0; x < nn; ++x) perm[x] = static_cast<std::size_t>(((x + step) % nn + nn) % nn);
  return FactoredIsometry(WeightedSpace::counting(n), std::vector<cplx>(n, cplx{1.0, 0.0}), std::move(perm));
}

/// U^{j+k} from U^j (first) and U^k (second): pi = pi_k o pi_j, h = h_j * (h_k o pi_j).
inline IsometryPower compose(const IsometryPower& first, const IsometryPower& second) {
  require(first.size() == second.size(), ErrorKind::DomainMismatch, "powers live on different spaces");
  IsometryPower out;
  out.exponent = first.exponent + second.exponent;
  const std::size_t n = first.size();
  out.permutation.resize(n);
  out.multiplier.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t y = first.permutation[x];
    out.permutation[x] = second.permutation[y];
    out.multiplier[x] = first.multiplier[x] * second.multiplier[y];
  }
  return out;
}

inline IsometryPower isometry_power(const FactoredIsometry& u, std::int64_t j) {
  IsometryPower result = IsometryPower::identity(u.size());
  IsometryPower base = u.unit_power(j < 0);
  std::uint64_t e = j < 0 ? static_cast<std::uint64_t>(-(j + 1)) + 1 : static_cast<std::uint64_t>(j);
  while (e) {
    if (e & 1) result = compose(result, base);
    e >>= 1;
    if (e) base = compose(base, base);
  }
  result.exponent = j;
  return result;
}

/// (U^j f)(x) = h_j(x) f(pi_j(x)).
inline SpaceFunction apply_power(const IsometryPower& p, const SpaceFunction& f) {
  require(f.size() == p.size(), ErrorKind::DomainMismatch, "function and power live on different spaces");
  SpaceFunction out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = p.multiplier[x] * f[p.permutation[x]];
  return out;
}

/// The automorphism part alone: (Phi_j f)(x) = f(pi_j(x)).
template <class T>
std::vector<T> automorphism(const IsometryPower& p, const std::vector<T>& f) {
  require(f.size() == p.size(), ErrorKind::DomainMismatch, "function and power live on different spaces");
  std::vector<T> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = f[p.permutation[x]];
  return out;
}

/// Union of all forward and backward permutation images of supp(f), keeping the original ids.
inline WeightedSpace orbit_support_restriction(const FactoredIsometry& u, const SpaceFunction& f) {
  u.check_domain(f);
  const std::size_t n = u.size();
  std::vector<char> keep(n, 0);
  for (std::size_t x = 0; x < n; ++x) {
    if (f[x] == cplx{} || keep[x]) continue;
    // Permutation orbits are cycles, so walking forward covers the backward images too.
    std::size_t y = x;
    do {
      keep[y] = 1;
      y = u.permutation()[y];
    } while (y != x);
  }
  std::vector<std::int64_t> ids;
  std::vector<double> weights;
  for (std::size_t x = 0; x < n; ++x)
    if (keep[x]) {
      ids.push_back(u.space().id(x));
      weights.push_back(u.space().weight(x));
    }
  return WeightedSpace(std::move(ids), std::move(weights));
}

/// U restricted to an invariant sub-space (as returned by orbit_support_restriction).
inline FactoredIsometry restrict_isometry(const FactoredIsometry& u, const WeightedSpace& sub) {
  std::unordered_map<std::int64_t, std::size_t> local;
  std::vector<std::size_t> global(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    auto g = u.space().index_of(sub.id(i));
    require(g.has_value(), ErrorKind::DomainMismatch, "sub-space point missing from parent space");
    global[i] = *g;
    local[u.space().id(*g)] = i;
  }
  std::vector<cplx> h(sub.size());
  std::vector<std::size_t> perm(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    auto it = local.find(u.space().id(u.permutation()[global[i]]));
    require(it != local.end(), ErrorKind::DomainMismatch, "sub-space is not invariant under the permutation");
    perm[i] = it->second;
    h[i] = u.multiplier()[global[i]];
  }
  return FactoredIsometry(sub, std::move(h), std::move(perm));
}

/// Smallest P > 0 with U^P = I exactly, when U is a pure permutation whose cycle lcm fits in `cap`.
inline std::optional<std::int64_t> exact_period(const FactoredIsometry& u, std::int64_t cap = std::int64_t{1} << 40) {
  if (!u.pure_permutation()) return std::nullopt;
  const std::size_t n = u.size();
  std::vector<char> seen(n, 0);
  std::int64_t period = 1;
  for (std::size_t x = 0; x < n; ++x) {
    if (seen[x]) continue;
    std::int64_t len = 0;
    std::size_t y = x;
    do {
      seen[y] = 1;
      y = u.permutation()[y];
      ++len;
    } while (y != x);
    period = std::lcm(period, len);
    if (period > cap) return std::nullopt;
  }
  return period;
}

struct RandomIsometryOptions {
  std::size_t weight_classes = 3;
  bool phases = true;
};

/// Random factored isometry: weights drawn from a few classes, a random permutation
/// inside each class, and (optionally) random unimodular phases.
inline FactoredIsometry random_isometry(CounterRng& rng, std::size_t n, const RandomIsometryOptions& opt = {}) {
  std::vector<double> weights(n);
  const std::size_t classes = std::max<std::size_t>(1, opt.weight_classes);
  for (auto& w : weights) w = 0.5 + static_cast<double>(rng.index(classes));
  std::vector<std::size_t> perm(n);
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t x = 0; x < n; ++x)
      if (weights[x] == 0.5 + static_cast<double>(c)) members.push_back(x);
    std::vector<std::size_t> image = members;
    rng.shuffle(image);
    for (std::size_t i = 0; i < members.size(); ++i) perm[members[i]] = image[i];
  }
  std::vector<cplx> h(n, cplx{1.0, 0.0});
  if (opt.phases)
    for (auto& z : h) z = rng.unit_phase();
  return FactoredIsometry(WeightedSpace(std::move(weights)), std::move(h), std::move(perm));
}

}  // namespace ergosc
