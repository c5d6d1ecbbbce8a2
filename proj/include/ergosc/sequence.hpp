#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace ergosc {

/// Finitely supported sequence on Z stored on the window [lo, lo + size).
template <class T>
struct BasicSequence {
  std::int64_t lo = 0;
  std::vector<T> values;

  BasicSequence() = default;
  BasicSequence(std::int64_t first, std::vector<T> v) : lo(first), values(std::move(v)) {}

  template <class F>
  static BasicSequence generate(std::int64_t first, std::int64_t last, F&& fn) {
    BasicSequence s;
    s.lo = first;
    if (last >= first) {
      s.values.resize(static_cast<std::size_t>(last - first + 1));
      for (std::int64_t n = first; n <= last; ++n) s.values[static_cast<std::size_t>(n - first)] = fn(n);
    }
    return s;
  }

  static BasicSequence delta(std::int64_t at, T value = T{1}) { return BasicSequence(at, {value}); }

  bool empty() const { return values.empty(); }
  std::size_t size() const { return values.size(); }
  std::int64_t hi() const { return lo + static_cast<std::int64_t>(values.size()) - 1; }

  T operator[](std::int64_t n) const {
    if (n < lo || n > hi()) return T{};
    return values[static_cast<std::size_t>(n - lo)];
  }

  /// Same values on the window [first, last], zero padded or clipped.
  BasicSequence window(std::int64_t first, std::int64_t last) const {
    return generate(first, last, [this](std::int64_t n) { return (*this)[n]; });
  }

  /// Drops leading and trailing zeros.
  BasicSequence trimmed() const {
    std::size_t a = 0, b = values.size();
    while (a < b && values[a] == T{}) ++a;
    while (b > a && values[b - 1] == T{}) --b;
    return BasicSequence(lo + static_cast<std::int64_t>(a), std::vector<T>(values.begin() + a, values.begin() + b));
  }

  template <class U = T>
  BasicSequence<U> cast() const {
    BasicSequence<U> out;
    out.lo = lo;
    out.values.assign(values.begin(), values.end());
    return out;
  }
};

template <class T>
BasicSequence<T> operator-(const BasicSequence<T>& a, const BasicSequence<T>& b) {
  if (a.empty()) {
    auto out = b;
    for (auto& v : out.values) v = -v;
    return out;
  }
  if (b.empty()) return a;
  const std::int64_t first = std::min(a.lo, b.lo), last = std::max(a.hi(), b.hi());
  return BasicSequence<T>::generate(first, last, [&](std::int64_t n) { return a[n] - b[n]; });
}

using Sequence = BasicSequence<cplx>;
using WeightSequence = BasicSequence<cplx>;
using DiscreteKernel = BasicSequence<double>;

}  // namespace ergosc
