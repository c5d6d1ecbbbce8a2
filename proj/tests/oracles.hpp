#pragma once

// Brute-force reference implementations. They share no code paths with the library
// beyond the single-step operators of FactoredIsometry.

#include <cmath>
#include <functional>
#include <initializer_list>
#include <vector>

#include "ergosc/ergosc.hpp"

namespace oracle {

using namespace ergosc;

inline SpaceFunction random_function(CounterRng& rng, std::size_t n) {
  SpaceFunction f(n);
  for (auto& v : f) v = rng.complex_normal();
  return f;
}

/// Values of modulus at most 1 with at least one of modulus exactly 1.
inline SpaceFunction unit_sup_function(CounterRng& rng, std::size_t n) {
  SpaceFunction f(n);
  for (auto& v : f) v = rng.uniform() * rng.unit_phase();
  f[rng.index(n)] = 1.0;
  return f;
}

inline SpaceFunction sign_function(CounterRng& rng, std::size_t n) {
  SpaceFunction f(n);
  for (auto& v : f) v = rng.sign();
  return f;
}

inline SpaceFunction indicator(std::size_t n, std::initializer_list<std::size_t> pts) {
  SpaceFunction f(n);
  for (auto p : pts) f[p] = 1.0;
  return f;
}

/// j-fold application of U (or U^{-1}) one step at a time.
inline SpaceFunction brute_power(const FactoredIsometry& u, std::int64_t j, SpaceFunction f) {
  SpaceFunction tmp;
  for (std::int64_t i = 0; i < std::abs(j); ++i) {
    if (j > 0)
      u.step_forward(f, tmp);
    else
      u.step_backward(f, tmp);
    f.swap(tmp);
  }
  return f;
}

/// sum_{n=lo}^{hi} (U^n f)(U^{-n} g) w(n), in plain increasing-n order.
inline SpaceFunction brute_biform(const FactoredIsometry& u, const SpaceFunction& f, const SpaceFunction& g,
                                  std::int64_t lo, std::int64_t hi, const std::function<cplx(std::int64_t)>& w) {
  SpaceFunction acc(u.size());
  for (std::int64_t n = lo; n <= hi; ++n) {
    const auto F = brute_power(u, n, f), G = brute_power(u, -n, g);
    const cplx wn = w(n);
    for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += F[x] * G[x] * wn;
  }
  return acc;
}

/// (S_w(a,b))(n) = sum_k a_{n+k} b_{n-k} w_k at one n.
template <class W>
cplx brute_biform_seq(const Sequence& a, const Sequence& b, const BasicSequence<W>& w, std::int64_t n) {
  cplx s{};
  for (std::int64_t k = w.lo; k <= w.hi(); ++k) s += a[n + k] * b[n - k] * cplx(w[k]);
  return s;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

inline double max_abs(const std::vector<cplx>& a) {
  double s = 0.0;
  for (auto v : a) s = std::max(s, std::abs(v));
  return s;
}

inline Sequence random_signs(CounterRng& rng, std::int64_t lo, std::size_t len) {
  Sequence s;
  s.lo = lo;
  for (std::size_t i = 0; i < len; ++i) s.values.push_back(rng.sign());
  return s;
}

inline Sequence random_complex(CounterRng& rng, std::int64_t lo, std::size_t len) {
  Sequence s;
  s.lo = lo;
  for (std::size_t i = 0; i < len; ++i) s.values.push_back(rng.complex_normal());
  return s;
}

}  // namespace oracle
