#include <gtest/gtest.h>

#include <numbers>

#include "ergosc/ergosc.hpp"
#include "oracles.hpp"

using namespace ergosc;
using namespace oracle;

namespace {

std::function<cplx(std::int64_t)> constant_weight(double c) {
  return [c](std::int64_t) { return cplx(c); };
}

std::function<cplx(std::int64_t)> reciprocal_weight() {
  return [](std::int64_t n) { return n == 0 ? cplx{} : cplx(1.0 / static_cast<double>(n)); };
}

}  // namespace

TEST(BilinearErgodic, SingleTermBelowTwo) {
  CounterRng rng(1);
  auto u = random_isometry(rng, 30);
  auto f = random_function(rng, 30), g = random_function(rng, 30);
  const auto a = bilinear_ergodic(u, f, g, 1.75);
  for (std::size_t x = 0; x < 30; ++x) EXPECT_EQ(a[x], f[x] * g[x]);
}

TEST(BilinearErgodic, IdentitySystemGivesProduct) {
  CounterRng rng(2);
  auto u = identity_isometry(WeightedSpace::counting(8));
  auto f = random_function(rng, 8), g = random_function(rng, 8);
  for (double r : {1.0, 3.5, 17.0, 100.0}) {
    const auto a = bilinear_ergodic(u, f, g, r);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(std::abs(a[x] - f[x] * g[x]), 0.0, 1e-14);
  }
}

TEST(BilinearErgodic, RotationExample) {
  auto u = rotation(4);
  const auto a = bilinear_ergodic(u, indicator(4, {0}), indicator(4, {0, 1}), 2.0);
  EXPECT_EQ(a[0], cplx(0.5));
}

TEST(BilinearErgodic, MatchesBruteForce) {
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(60));
    auto f = random_function(rng, u.size()), g = random_function(rng, u.size());
    const double r = rng.uniform(1.0, 70.0);
    const auto N = static_cast<std::int64_t>(std::floor(r));
    const auto ref = brute_biform(u, f, g, 0, N - 1, constant_weight(1.0 / N));
    EXPECT_LT(max_abs_diff(bilinear_ergodic(u, f, g, r), ref), 1e-12);
  }
}

TEST(BilinearErgodic, RejectsRadiusBelowOne) {
  auto u = rotation(3);
  SpaceFunction f(3, 1.0);
  EXPECT_THROW(bilinear_ergodic(u, f, f, 0.5), Error);
  EXPECT_THROW(bilinear_ergodic(u, f, SpaceFunction(2), 2.0), Error);
}

TEST(BilinearHilbert, IdentityAndZero) {
  CounterRng rng(4);
  auto u = identity_isometry(WeightedSpace::counting(6));
  auto f = random_function(rng, 6), g = random_function(rng, 6);
  for (double r : {1.0, 5.0, 40.0})
    for (auto v : bilinear_hilbert(u, f, g, r)) EXPECT_EQ(v, cplx{});
  auto w = random_isometry(rng, 6);
  for (auto v : bilinear_hilbert(w, SpaceFunction(6), g, 9.0)) EXPECT_EQ(v, cplx{});
}

TEST(BilinearHilbert, RotationExample) {
  auto u = rotation(4);
  const auto f = indicator(4, {0});
  // (U^n f)(0) (U^{-n} f)(0) = 1 iff n = 0 mod 4, so only even shifts of the
  // other residue class matter; for |n| <= 3 no term survives.
  const auto ref = brute_biform(u, f, f, -3, 3, reciprocal_weight());
  const auto h = bilinear_hilbert(u, f, f, 3.0);
  EXPECT_EQ(h[0], ref[0]);
  EXPECT_EQ(h[0], cplx{});
  const auto g = indicator(4, {0, 2});
  const auto ref2 = brute_biform(u, g, g, -3, 3, reciprocal_weight());
  EXPECT_LT(max_abs_diff(bilinear_hilbert(u, g, g, 3.0), ref2), 1e-15);
}

TEST(BilinearHilbert, MatchesBruteForce) {
  CounterRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(60));
    auto f = random_function(rng, u.size()), g = random_function(rng, u.size());
    const double r = rng.uniform(1.0, 70.0);
    const auto N = static_cast<std::int64_t>(std::floor(r));
    const auto ref = brute_biform(u, f, g, -N, N, reciprocal_weight());
    EXPECT_LT(max_abs_diff(bilinear_hilbert(u, f, g, r), ref), 1e-12);
  }
}

TEST(DyadicErgodic, Examples) {
  CounterRng rng(6);
  auto u = random_isometry(rng, 12);
  auto f = random_function(rng, 12), g = random_function(rng, 12);
  const auto two = dyadic_ergodic(u, f, g, 1, 1);
  const auto ref = brute_biform(u, f, g, 0, 1, constant_weight(0.5));
  EXPECT_LT(max_abs_diff(two, ref), 1e-15);
  const auto root = dyadic_ergodic(u, f, g, 1, 2);
  for (std::size_t x = 0; x < 12; ++x) EXPECT_NEAR(std::abs(root[x] - f[x] * g[x] / std::numbers::sqrt2), 0.0, 1e-15);
  auto id = identity_isometry(WeightedSpace::counting(12));
  for (std::int64_t j = 1; j <= 9; ++j) {
    const double D = std::exp2(j / 3.0);
    const auto v = dyadic_ergodic(id, f, g, j, 3);
    for (std::size_t x = 0; x < 12; ++x) EXPECT_NEAR(std::abs(v[x] - f[x] * g[x] * std::floor(D) / D), 0.0, 1e-13);
  }
}

TEST(WeightedBiformSeq, Examples) {
  Sequence a(0, {1.0, 1.0}), b(0, {1.0, 1.0});
  const auto d = weighted_biform_seq(a, b, WeightSequence::delta(0));
  EXPECT_EQ(d[0], cplx(1.0));
  EXPECT_EQ(d[1], cplx(1.0));
  const auto e = weighted_biform_seq(Sequence::delta(0), Sequence::delta(0), WeightSequence::delta(0));
  EXPECT_EQ(e.trimmed().lo, 0);
  EXPECT_EQ(e.trimmed().values, std::vector<cplx>{1.0});
  const auto t = weighted_biform_seq(a, b, WeightSequence(-1, {1.0, 1.0, 1.0}));
  EXPECT_EQ(t[0], cplx(1.0));
}

TEST(WeightedBiformSeq, MatchesBruteForceAndSupport) {
  CounterRng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_complex(rng, rng.integer(-10, 10), 1 + rng.index(20));
    auto b = random_complex(rng, rng.integer(-10, 10), 1 + rng.index(20));
    auto w = random_complex(rng, rng.integer(-8, 3), 1 + rng.index(12));
    const auto s = weighted_biform_seq(a, b, w);
    for (std::int64_t n = -40; n <= 40; ++n) EXPECT_NEAR(std::abs(s[n] - brute_biform_seq(a, b, w, n)), 0.0, 1e-12);
  }
}

TEST(WeightedBiformSpace, DeltaAndHilbertWeights) {
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(50));
    auto f = random_function(rng, u.size()), g = random_function(rng, u.size());
    const auto d = weighted_biform_space(u, f, g, WeightSequence::delta(0));
    for (std::size_t x = 0; x < u.size(); ++x) EXPECT_EQ(d[x], f[x] * g[x]);
    const auto N = rng.integer(1, 80);
    auto w = DiscreteKernel::generate(-N, N, [](std::int64_t n) { return n == 0 ? 0.0 : 1.0 / static_cast<double>(n); });
    // Same summation order, so the agreement is bitwise.
    EXPECT_EQ(weighted_biform_space(u, f, g, w), bilinear_hilbert(u, f, g, static_cast<double>(N)));
  }
}

TEST(WeightedBiformSpace, HilbertWeightsOnPeriodicSystemAreBitwiseEqual) {
  CounterRng rng(9);
  auto u = rotation(7, 3);
  auto f = random_function(rng, 7), g = random_function(rng, 7);
  for (std::int64_t N : {20, 33, 100}) {
    auto w = DiscreteKernel::generate(-N, N, [](std::int64_t n) { return n == 0 ? 0.0 : 1.0 / static_cast<double>(n); });
    EXPECT_EQ(weighted_biform_space(u, f, g, w), bilinear_hilbert(u, f, g, static_cast<double>(N)));
    EXPECT_LT(max_abs_diff(bilinear_hilbert(u, f, g, static_cast<double>(N)), brute_biform(u, f, g, -N, N, reciprocal_weight())), 1e-12);
  }
}

TEST(WeightedBiformSpace, DecompositionIdentity) {
  CounterRng rng(10);
  for (int M : {2, 4})
    for (int m : {1, 2})
      for (std::int64_t n = 1; n <= 8; ++n) {
        auto u = random_isometry(rng, 2 + rng.index(40));
        auto f = random_function(rng, u.size()), g = random_function(rng, u.size());
        const auto fam = sample_discrete_family(M, m, n);
        const auto lhs = weighted_biform_space(u, f, g, fam.difference);
        const auto avg = weighted_biform_space(u, f, g, fam.averaging);
        const auto h = bilinear_hilbert(u, f, g, fam.scale);
        SpaceFunction rhs(u.size());
        for (std::size_t x = 0; x < u.size(); ++x) rhs[x] = avg[x] - h[x];
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12) << M << " " << m << " " << n;
      }
}

TEST(WeightedBiformSpace, FlankBound) {
  CounterRng rng(11);
  for (int M : {2, 4})
    for (int m : {1, 2})
      for (std::int64_t n = 1; n <= 8; ++n) {
        auto u = random_isometry(rng, 2 + rng.index(40));
        auto f = unit_sup_function(rng, u.size()), g = unit_sup_function(rng, u.size());
        const auto avg = weighted_biform_space(u, f, g, sample_discrete_family(M, m, n).averaging);
        EXPECT_LE(max_abs(avg), 4.0 * (1.0 / M + std::exp2(-static_cast<double>(n) / m)));
      }
}

TEST(WeightedBiformSpace, PlateauReconstruction) {
  CounterRng rng(12);
  for (int M : {2, 4, 8})
    for (int m : {1, 2})
      for (std::int64_t j = 1; j <= 10; ++j) {
        auto u = random_isometry(rng, 2 + rng.index(40));
        auto f = unit_sup_function(rng, u.size()), g = unit_sup_function(rng, u.size());
        const auto w = sample_kernel(DilationFamily(plateau_kernel(M), m).member(j));
        const auto a = weighted_biform_space(u, f, g, w);
        const auto d = dyadic_ergodic(u, f, g, j, m);
        const double bound = 1.0 / M + (1.0 / M + std::exp2(-static_cast<double>(j) / m));
        EXPECT_LE(max_abs_diff(a, d), bound);
      }
}

TEST(WeightedBiformSpace, FoldedWeightsMatchExplicitWeights) {
  CounterRng rng(13);
  auto u = rotation(101, 1);
  auto f = random_function(rng, 101), g = random_function(rng, 101);
  for (std::int64_t j : {4, 9, 14}) {
    const auto fam = sample_discrete_family(4, 2, j);
    const auto folded = PeriodicWeights<double>{101, folded_difference_weights(4, 2, j, 101)};
    EXPECT_LT(max_abs_diff(weighted_biform_space(u, f, g, folded), weighted_biform_space(u, f, g, fam.difference)), 1e-12);
  }
  EXPECT_THROW(weighted_biform_space(u, f, g, PeriodicWeights<double>{7, std::vector<double>(7)}), Error);
}

TEST(Bilinearity, AllDiscreteForms) {
  CounterRng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(40));
    const std::size_t n = u.size();
    auto f1 = random_function(rng, n), f2 = random_function(rng, n), g = random_function(rng, n);
    const cplx a = rng.complex_normal(), b = rng.complex_normal();
    SpaceFunction comb(n);
    for (std::size_t x = 0; x < n; ++x) comb[x] = a * f1[x] + b * f2[x];
    const double r = rng.uniform(1, 40);
    auto w = random_complex(rng, -5, 11);
    std::vector<std::function<SpaceFunction(const SpaceFunction&, const SpaceFunction&)>> forms = {
        [&](const auto& p, const auto& q) { return bilinear_ergodic(u, p, q, r); },
        [&](const auto& p, const auto& q) { return bilinear_hilbert(u, p, q, r); },
        [&](const auto& p, const auto& q) { return dyadic_ergodic(u, p, q, 7, 2); },
        [&](const auto& p, const auto& q) { return weighted_biform_space(u, p, q, w); },
    };
    for (const auto& form : forms) {
      const auto lhs = form(comb, g);
      const auto r1 = form(f1, g), r2 = form(f2, g);
      const auto rhs_left = form(g, comb), s1 = form(g, f1), s2 = form(g, f2);
      for (std::size_t x = 0; x < n; ++x) {
        EXPECT_NEAR(std::abs(lhs[x] - (a * r1[x] + b * r2[x])), 0.0, 1e-12 * (1 + std::abs(lhs[x])));
        EXPECT_NEAR(std::abs(rhs_left[x] - (a * s1[x] + b * s2[x])), 0.0, 1e-12 * (1 + std::abs(rhs_left[x])));
      }
    }
  }
}

TEST(PeriodicCesaro, MultiplesOfPeriodAgreeExactly) {
  CounterRng rng(15);
  for (std::size_t N : {5u, 12u, 31u}) {
    auto u = rotation(N, 1);
    auto f = random_function(rng, N), g = random_function(rng, N);
    const auto base = bilinear_ergodic(u, f, g, static_cast<double>(N));
    for (int q = 2; q <= 6; ++q) EXPECT_EQ(bilinear_ergodic(u, f, g, static_cast<double>(q * N)), base);
    // Cyclic convolution oracle.
    for (std::size_t x = 0; x < N; ++x) {
      cplx s{};
      for (std::size_t k = 0; k < N; ++k) s += f[(x + k) % N] * g[(x + N - k) % N];
      EXPECT_NEAR(std::abs(base[x] - s / static_cast<double>(N)), 0.0, 1e-12);
    }
  }
}

TEST(Maximal, IdentityZeroAndMonotone) {
  CounterRng rng(16);
  auto id = identity_isometry(WeightedSpace::counting(9));
  auto f = random_function(rng, 9), g = random_function(rng, 9);
  const auto me = maximal_ergodic(id, f, g, 7);
  const auto mh = maximal_hilbert(id, f, g, 7);
  for (std::size_t x = 0; x < 9; ++x) {
    EXPECT_NEAR(me[x], std::abs(f[x]) * std::abs(g[x]), 1e-13);
    EXPECT_EQ(mh[x], 0.0);
  }
  auto u = random_isometry(rng, 30);
  auto a = random_function(rng, 30), b = random_function(rng, 30);
  for (double v : maximal_ergodic(u, SpaceFunction(30), b, 5)) EXPECT_EQ(v, 0.0);
  for (std::int64_t J = 1; J < 12; ++J) {
    const auto e0 = maximal_ergodic(u, a, b, J), e1 = maximal_ergodic(u, a, b, J + 1);
    const auto h0 = maximal_hilbert(u, a, b, J), h1 = maximal_hilbert(u, a, b, J + 1);
    for (std::size_t x = 0; x < 30; ++x) {
      EXPECT_GE(e1[x], e0[x]);
      EXPECT_GE(h1[x], h0[x]);
    }
  }
}

TEST(Maximal, MatchesBruteForce) {
  CounterRng rng(17);
  auto u = random_isometry(rng, 25);
  auto f = random_function(rng, 25), g = random_function(rng, 25);
  const auto h1 = maximal_hilbert(u, f, g, 1);
  const auto ref1 = bilinear_hilbert(u, f, g, 1.0);
  for (std::size_t x = 0; x < 25; ++x) EXPECT_NEAR(h1[x], std::abs(ref1[x]), 1e-14);
  const auto me = maximal_ergodic(u, f, g, 10);
  SpaceFunction af(25), ag(25);
  std::vector<double> best(25, 0.0);
  for (std::int64_t j = 1; j <= 10; ++j) {
    for (std::size_t x = 0; x < 25; ++x) {
      double s = 0;
      for (std::int64_t n = -j; n <= j; ++n) s += std::abs(brute_power(u, n, f)[x]) * std::abs(brute_power(u, -n, g)[x]);
      best[x] = std::max(best[x], s / (2 * j + 1));
    }
  }
  for (std::size_t x = 0; x < 25; ++x) EXPECT_NEAR(me[x], best[x], 1e-12);
  const auto mh = maximal_hilbert(u, f, g, 10);
  for (std::size_t x = 0; x < 25; ++x) {
    double b = 0;
    for (std::int64_t j = 1; j <= 10; ++j) b = std::max(b, std::abs(brute_biform(u, f, g, -j, j, reciprocal_weight())[x]));
    EXPECT_NEAR(mh[x], b, 1e-12);
  }
}

TEST(BiformRealline, ZeroInput) {
  const auto v = biform_realline(LineFunction{}, LineFunction::indicator(0, 1), bump_kernel(1.0), {0.0, 0.5});
  for (auto z : v.values) EXPECT_EQ(z, cplx{});
}

TEST(BiformRealline, IntervalOverlapClosedForm) {
  // f = g = 1 on [0,1], x = 1/2: int_{-1/2}^{1/2} K(y) dy = 1/2 + (1/M) int_0^1 S = 1/2 + 1/(2M).
  for (int M : {4, 16, 64}) {
    const auto v = biform_realline(LineFunction::indicator(0, 1), LineFunction::indicator(0, 1), plateau_kernel(M), {0.5}, {1e-12});
    EXPECT_NEAR(v.values[0].real(), 0.5 + 0.5 / M, 1e-10);
    EXPECT_EQ(v.values[0].imag(), 0.0);
  }
}

TEST(BiformRealline, OddKernelEvenDataCancels) {
  const auto F = LineFunction::indicator(-1, 1), G = LineFunction::indicator(-1, 1);
  const auto v = biform_realline(F, G, hilbert_kernel(3), {0.0}, {1e-12});
  EXPECT_NEAR(std::abs(v.values[0]), 0.0, 1e-12);
  const auto d = biform_realline(F, G, kernel_difference(dilate(hilbert_kernel(2), 0.3), hilbert_kernel(2)), {0.0});
  EXPECT_NEAR(std::abs(d.values[0]), 0.0, 1e-12);
}

TEST(BiformRealline, MatchesDirectQuadrature) {
  CounterRng rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    const auto F = LineFunction::piecewise_constant({-1, -0.2, 0.7}, {rng.complex_normal(), rng.complex_normal()});
    const auto G = LineFunction::piecewise_constant({-0.5, 0.1, 1.3}, {rng.complex_normal(), rng.complex_normal()});
    const auto k = bump_kernel(rng.uniform(0.3, 2.0));
    const double x = rng.uniform(-0.5, 0.5);
    const auto v = biform_realline(F, G, k, {x}, {1e-11});
    // Plain Riemann sum with a very fine midpoint rule as an independent check.
    const int n = 400000;
    const double lo = -3, hi = 3, h = (hi - lo) / n;
    cplx s{};
    for (int i = 0; i < n; ++i) {
      const double y = lo + (i + 0.5) * h;
      s += F(x + y) * G(x - y) * k(y) * h;
    }
    EXPECT_NEAR(std::abs(v.values[0] - s), 0.0, 2e-4);
  }
}

namespace {

TranslationFlow circle_flow(std::size_t n = 16, double rate = 1.0) {
  return TranslationFlow(FlowDomain::circle, Grid::midpoint(0.0, 1.0, n), rate);
}

}  // namespace

TEST(CesaroFlow, CharacterPairClosedForm) {
  auto flow = circle_flow();
  const FlowFunction f = TrigPolynomial::character(1), g = TrigPolynomial::character(-1);
  for (double r : {0.1, 0.37, 1.0, 2.3, 10.7}) {
    const auto v = cesaro_flow(flow, f, g, r, {1e-12});
    const cplx expect = (std::polar(1.0, 4 * std::numbers::pi * r) - 1.0) / cplx(0, 4 * std::numbers::pi * r);
    for (auto z : v.values) EXPECT_NEAR(std::abs(z - expect), 0.0, 1e-11) << r;
  }
}

TEST(CesaroFlow, SmallRadiusApproachesProduct) {
  auto flow = circle_flow(8, 1.3);
  TrigPolynomial fp, gp;
  fp.coeffs = {{0, 0.5}, {1, cplx(0.2, 0.1)}, {-2, 0.3}};
  gp.coeffs = {{1, 1.0}, {3, cplx(0, -0.4)}};
  const auto prod = cesaro_limit_zero(fp, gp, flow.grid);
  double prev = INFINITY;
  for (double r : {1e-1, 1e-2, 1e-3}) {
    const double dev = max_abs_diff(cesaro_flow(flow, fp, gp, r, {1e-13}).values, prod);
    EXPECT_LT(dev, prev / 5.0);
    prev = dev;
  }
  EXPECT_LT(prev, 1e-1 * 1e-1);
}

TEST(CesaroFlow, ZeroInputAndBadRadius) {
  auto flow = circle_flow();
  const FlowFunction f = TrigPolynomial::character(2), z = TrigPolynomial{};
  for (auto v : cesaro_flow(flow, f, z, 3.0).values) EXPECT_EQ(v, cplx{});
  EXPECT_THROW(cesaro_flow(flow, f, f, 0.0), Error);
}

TEST(CesaroFlow, ArcIndicatorsMatchOverlapLength) {
  // f = g = indicator of [0, 1/2): the integrand is 1 iff x + t and x - t both land in the arc.
  auto flow = circle_flow(4);
  const FlowFunction f = PiecewiseConstant::arc(0.0, 0.5);
  const double r = 1.0;
  const auto v = cesaro_flow(flow, f, f, r, {1e-12});
  for (std::size_t i = 0; i < flow.grid.size(); ++i) {
    const double x = flow.grid.nodes[i];
    const int n = 2000000;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = (k + 0.5) / n * r;
      s += std::abs(evaluate(f, x + t) * evaluate(f, x - t));
    }
    EXPECT_NEAR(v.values[i].real(), s / n, 1e-5);
  }
}

TEST(HilbertFlow, EvenIntegrandsVanishExactly) {
  auto flow = circle_flow();
  const FlowFunction one = TrigPolynomial::constant(1.0), e1 = TrigPolynomial::character(1);
  for (auto v : hilbert_flow(flow, one, one, 1e-3, 50.0).values) EXPECT_EQ(v, cplx{});
  for (auto v : hilbert_flow(flow, e1, e1, 1e-3, 50.0).values) EXPECT_EQ(v, cplx{});
}

TEST(HilbertFlow, CharacterPairMatchesSineIntegral) {
  for (double c : {1.0, 0.7}) {
    auto flow = circle_flow(4, c);
    const FlowFunction f = TrigPolynomial::character(1), g = TrigPolynomial::character(-1);
    for (auto [eps, sig] : {std::pair{1e-2, 1.0}, {1e-3, 10.0}, {1e-4, 100.0}}) {
      const cplx expect(0.0, 2.0 * (sine_integral(4 * std::numbers::pi * c * sig) - sine_integral(4 * std::numbers::pi * c * eps)));
      for (auto v : hilbert_flow(flow, f, g, eps, sig, {1e-12}).values) EXPECT_NEAR(std::abs(v - expect), 0.0, 1e-9);
    }
    const auto lim = hilbert_flow(flow, f, g, 1e-6, 1000.0, {1e-12});
    for (auto v : lim.values) EXPECT_NEAR(std::abs(v - cplx(0, std::numbers::pi)), 0.0, 1e-3);
  }
}

TEST(HilbertFlow, MatchesPrincipalValueOracle) {
  auto flow = circle_flow(6, 1.0);
  TrigPolynomial fp, gp;
  fp.coeffs = {{1, 1.0}, {2, cplx(0.3, -0.2)}};
  gp.coeffs = {{-1, 0.5}, {0, cplx(0, 1)}};
  const auto oracle_value = hilbert_flow_limit(fp, gp, flow.rate, flow.grid);
  const auto v = hilbert_flow(flow, fp, gp, 1e-7, 2000.0, {1e-11});
  EXPECT_LT(max_abs_diff(v.values, oracle_value), 1e-3);
  EXPECT_THROW(hilbert_flow(flow, fp, gp, 1.0, 0.5), Error);
}
