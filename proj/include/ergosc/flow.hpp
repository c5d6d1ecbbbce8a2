#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <variant>
#include <vector>

#include "error.hpp"
#include "line.hpp"

namespace ergosc {

/// Sum of a_k e^{2 pi i k x}, stored by coefficient so shifts are exact.
struct TrigPolynomial {
  std::map<int, cplx> coeffs;

  static TrigPolynomial character(int k, cplx a = 1.0) { return TrigPolynomial{{{k, a}}}; }
  static TrigPolynomial constant(cplx a) { return character(0, a); }

  cplx operator()(double x) const {
    cplx s{};
    for (const auto& [k, a] : coeffs) s += a * std::polar(1.0, 2.0 * std::numbers::pi * k * x);
    return s;
  }

  /// x -> f(x + s).
  TrigPolynomial shifted(double s) const {
    TrigPolynomial out;
    for (const auto& [k, a] : coeffs) out.coeffs[k] = a * std::polar(1.0, 2.0 * std::numbers::pi * k * s);
    return out;
  }

  int bandwidth() const {
    int b = 0;
    for (const auto& [k, a] : coeffs)
      if (a != cplx{}) b = std::max(b, std::abs(k));
    return b;
  }

  bool is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second == cplx{}; });
  }
};

/// Step function. On the circle: values[i] on [edges[i], edges[i+1]) with the last piece
/// wrapping to edges[0] + 1, edges inside [0, 1). On the line: values[i] on
/// [edges[i], edges[i+1]) and `zero_extended` decides whether leaving the stored
/// support reads 0 or is an error.
struct PiecewiseConstant {
  std::vector<double> edges;
  std::vector<cplx> values;
  bool periodic = true;
  bool zero_extended = true;

  static PiecewiseConstant arc(double lo, double hi, cplx value = 1.0) {
    PiecewiseConstant f;
    f.edges = {lo, hi};
    f.values = {value, 0.0};
    f.validate();
    return f;
  }

  void validate() const {
    if (periodic) {
      require(!edges.empty() && edges.size() == values.size(), ErrorKind::BadParameter, "circle step function needs one value per edge");
      require(edges.front() >= 0.0 && edges.back() < 1.0, ErrorKind::BadParameter, "circle edges must lie in [0,1)");
    } else {
      require(edges.size() == values.size() + 1, ErrorKind::BadParameter, "line step function needs one more edge than values");
    }
    for (std::size_t i = 1; i < edges.size(); ++i)
      require(edges[i] > edges[i - 1], ErrorKind::BadParameter, "edges must be strictly increasing");
  }

  cplx operator()(double x) const {
    if (periodic) {
      const double t = x - std::floor(x);
      auto it = std::upper_bound(edges.begin(), edges.end(), t);
      if (it == edges.begin()) return values.back();
      return values[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    if (it == edges.begin() || it == edges.end()) return cplx{};
    return values[static_cast<std::size_t>(it - edges.begin()) - 1];
  }

  /// x -> f(x + s), by moving the breakpoints.
  PiecewiseConstant shifted(double s) const {
    PiecewiseConstant out = *this;
    if (!periodic) {
      for (auto& e : out.edges) e -= s;
      return out;
    }
    std::vector<std::pair<double, cplx>> pieces;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      double e = edges[i] - s;
      e -= std::floor(e);
      if (e >= 1.0) e = 0.0;
      pieces.emplace_back(e, values[i]);
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      out.edges[i] = pieces[i].first;
      out.values[i] = pieces[i].second;
    }
    return out;
  }

  bool is_zero() const {
    return std::all_of(values.begin(), values.end(), [](cplx v) { return v == cplx{}; });
  }
};

using FlowFunction = std::variant<TrigPolynomial, PiecewiseConstant>;

inline cplx evaluate(const FlowFunction& f, double x) {
  return std::visit([x](const auto& g) { return g(x); }, f);
}

inline bool is_zero(const FlowFunction& f) {
  return std::visit([](const auto& g) { return g.is_zero(); }, f);
}

enum class FlowDomain { circle, line };

/// U_t f(x) = f(x + rate * t) on the circle of circumference 1 or on R.
struct TranslationFlow {
  FlowDomain domain = FlowDomain::circle;
  Grid grid;
  double rate = 1.0;

  TranslationFlow(FlowDomain d, Grid g, double c) : domain(d), grid(std::move(g)), rate(c) {
    grid.validate();
    require(std::isfinite(rate), ErrorKind::BadParameter, "flow rate must be finite");
    if (domain == FlowDomain::circle)
      require(grid.nodes.empty() || (grid.nodes.front() >= 0.0 && grid.nodes.back() < 1.0), ErrorKind::BadParameter,
              "circle grid nodes must lie in [0,1)");
  }
};

inline std::vector<cplx> sample(const FlowFunction& f, const Grid& g) {
  std::vector<cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = evaluate(f, g.nodes[i]);
  return out;
}

inline void check_flow_function(const TranslationFlow& flow, const FlowFunction& f) {
  if (auto pc = std::get_if<PiecewiseConstant>(&f)) {
    pc->validate();
    require(pc->periodic == (flow.domain == FlowDomain::circle), ErrorKind::DomainMismatch,
            "step function domain differs from the flow domain");
  }
}

/// U_t f, exact in coefficient or breakpoint form.
inline FlowFunction flow_sample(const TranslationFlow& flow, const FlowFunction& f, double t) {
  check_flow_function(flow, f);
  const double s = flow.rate * t;
  if (auto tp = std::get_if<TrigPolynomial>(&f)) return tp->shifted(s);
  const auto& pc = std::get<PiecewiseConstant>(f);
  if (!pc.periodic && !pc.zero_extended && !flow.grid.nodes.empty()) {
    const double lo = flow.grid.nodes.front() + s, hi = flow.grid.nodes.back() + s;
    require(lo >= pc.edges.front() && hi < pc.edges.back(), ErrorKind::OutOfDomain,
            "shifted grid leaves the stored support");
  }
  return pc.shifted(s);
}

namespace detail {

/// Times t in (t0, t1) where x + c t crosses a breakpoint of f.
inline void flow_crossings(const FlowFunction& f, double x, double c, double t0, double t1, std::vector<double>& out) {
  const auto* pc = std::get_if<PiecewiseConstant>(&f);
  if (!pc || c == 0.0) return;
  for (double e : pc->edges) {
    if (!pc->periodic) {
      const double t = (e - x) / c;
      if (t > t0 && t < t1) out.push_back(t);
      continue;
    }
    const double a = x + c * t0, b = x + c * t1;
    const double lo = std::min(a, b), hi = std::max(a, b);
    for (double k = std::ceil(lo - e); e + k <= hi; k += 1.0) {
      const double t = (e + k - x) / c;
      if (t > t0 && t < t1) out.push_back(t);
    }
  }
}

inline double flow_frequency(const FlowFunction& f, double c) {
  if (auto tp = std::get_if<TrigPolynomial>(&f)) return tp->bandwidth() * std::abs(c);
  return 0.0;
}

}  // namespace detail

}  // namespace ergosc
