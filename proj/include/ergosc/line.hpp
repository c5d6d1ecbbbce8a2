#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"

namespace ergosc {

/// Quadrature rule on an interval of R or on the circle: strictly increasing nodes, positive weights.
struct Grid {
  std::vector<double> nodes;
  std::vector<double> weights;

  Grid() = default;
  Grid(std::vector<double> x, std::vector<double> w) : nodes(std::move(x)), weights(std::move(w)) { validate(); }

  /// n midpoint nodes on [lo, hi] with equal weights (hi - lo)/n.
  static Grid midpoint(double lo, double hi, std::size_t n) {
    require(n > 0 && hi > lo, ErrorKind::BadParameter, "midpoint grid needs n > 0 and hi > lo");
    std::vector<double> x(n), w(n, (hi - lo) / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return Grid(std::move(x), std::move(w));
  }

  std::size_t size() const { return nodes.size(); }

  void validate() const {
    require(nodes.size() == weights.size(), ErrorKind::BadParameter, "grid nodes and weights differ in length");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      require(weights[i] > 0.0 && std::isfinite(weights[i]), ErrorKind::BadParameter, "grid weights must be > 0");
      require(i == 0 || nodes[i] > nodes[i - 1], ErrorKind::BadParameter, "grid nodes must be strictly increasing");
    }
  }
};

/// Compactly supported function on R, smooth between its breakpoints.
class LineFunction {
 public:
  using Evaluator = std::function<cplx(double)>;

  LineFunction() = default;

  /// Support [breaks.front(), breaks.back()]; `eval` is only called inside it.
  LineFunction(std::vector<double> breaks, Evaluator eval) : breaks_(std::move(breaks)), eval_(std::move(eval)) {
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
    if (breaks_.size() < 2) {
      breaks_.clear();
      eval_ = nullptr;
    }
  }

  /// values[i] on [edges[i], edges[i+1]).
  static LineFunction piecewise_constant(std::vector<double> edges, std::vector<cplx> values) {
    require(edges.size() == values.size() + 1, ErrorKind::BadParameter, "need one more edge than values");
    for (std::size_t i = 1; i < edges.size(); ++i)
      require(edges[i] > edges[i - 1], ErrorKind::BadParameter, "edges must be strictly increasing");
    auto e = edges;
    return LineFunction(std::move(edges), [e, values](double x) {
      auto it = std::upper_bound(e.begin(), e.end(), x);
      if (it == e.begin() || it == e.end()) return cplx{};
      return values[static_cast<std::size_t>(it - e.begin()) - 1];
    });
  }

  static LineFunction indicator(double lo, double hi, cplx value = 1.0) { return piecewise_constant({lo, hi}, {value}); }

  bool is_zero() const { return !eval_; }
  double lo() const { return breaks_.empty() ? 0.0 : breaks_.front(); }
  double hi() const { return breaks_.empty() ? 0.0 : breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }

  cplx operator()(double x) const {
    if (!eval_ || x < lo() || x > hi()) return cplx{};
    return eval_(x);
  }

 private:
  std::vector<double> breaks_;
  Evaluator eval_;
};

/// (int |f|^p)^{1/p} by quadrature; for p = inf, sup over the breakpoints and a dense sample of each piece.
inline double line_lp_norm(const LineFunction& f, double p, double tol = 1e-12) {
  require(p > 0.0, ErrorKind::BadExponent, "p must be > 0");
  if (f.is_zero()) return 0.0;
  if (std::isinf(p)) {
    double s = 0.0;
    const auto& b = f.breaks();
    for (double x : b) s = std::max(s, std::abs(f(x)));
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
      for (int k = 0; k <= 256; ++k) {
        // Interior samples only, so half-open pieces do not pick up their neighbour's value.
        const double t = (static_cast<double>(k) + 0.5) / 257.0;
        s = std::max(s, std::abs(f(b[i] + (b[i + 1] - b[i]) * t)));
      }
    return s;
  }
  auto r = integrate([&](double x) { return std::pow(std::abs(f(x)), p); }, f.breaks(), {tol, 1u << 16});
  return std::pow(r.value, 1.0 / p);
}

}  // namespace ergosc
