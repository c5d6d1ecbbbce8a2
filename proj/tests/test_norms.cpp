#include <gtest/gtest.h>

#include <limits>

#include "ergosc/ergosc.hpp"
#include "oracles.hpp"

using namespace ergosc;
using namespace oracle;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

IndexedFamily<cplx> random_family(CounterRng& rng, std::int64_t first, std::size_t len, std::size_t points) {
  IndexedFamily<cplx> fam;
  fam.first = first;
  for (std::size_t i = 0; i < len; ++i) fam.members.push_back(random_function(rng, points));
  for (std::size_t x = 0; x < points; ++x) fam.weights.push_back(0.5 + rng.index(3));
  return fam;
}

std::vector<std::int64_t> random_breakpoints(CounterRng& rng, std::int64_t lo, std::int64_t hi, std::size_t R) {
  std::vector<std::int64_t> all;
  for (std::int64_t n = lo; n <= hi; ++n) all.push_back(n);
  rng.shuffle(all);
  all.resize(R);
  std::sort(all.begin(), all.end());
  return all;
}

// Direct definition: sup over y of y * mass{|f| > y}, approached from below at each level.
double brute_weak_norm(const std::vector<double>& mag, const std::vector<double>& w) {
  double best = 0.0;
  for (double v : mag) {
    double mass = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i)
      if (mag[i] >= v) mass += w[i];
    best = std::max(best, v * mass);
  }
  return best;
}

}  // namespace

TEST(Distribution, Examples) {
  const auto space = WeightedSpace::counting(3);
  const auto zero = distribution(SpaceFunction(3), space);
  EXPECT_EQ(zero(0.0), 0.0);
  EXPECT_EQ(zero(1.0), 0.0);
  const auto ind = distribution(SpaceFunction{1.0, 0.0, 1.0}, WeightedSpace({0.5, 3.0, 0.25}));
  EXPECT_EQ(ind(0.3), 0.75);
  EXPECT_EQ(ind(1.0), 0.0);
  const auto d = distribution(SpaceFunction{3.0, 1.0, 1.0}, space);
  EXPECT_EQ(d(0.5), 3.0);
  EXPECT_EQ(d(1.0), 1.0);
  EXPECT_EQ(d(3.0), 0.0);
}

TEST(Distribution, MatchesDirectCount) {
  CounterRng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(50);
    std::vector<double> mag(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      mag[i] = static_cast<double>(rng.index(6));
      w[i] = 0.25 * (1 + rng.index(8));
    }
    const auto d = distribution(mag, w);
    for (double y : {0.0, 0.5, 1.0, 2.5, 5.0, 6.0}) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mag[i] > y) m += w[i];
      EXPECT_DOUBLE_EQ(d(y), m);
    }
    for (std::size_t i = 1; i < d.masses.size(); ++i) EXPECT_LE(d.masses[i], d.masses[i - 1]);
  }
}

TEST(WeakNorm, Examples) {
  EXPECT_EQ(weak_l1_norm(SpaceFunction{1.0, 0.0, 1.0}, WeightedSpace({0.5, 3.0, 0.25})), 0.75);
  EXPECT_EQ(weak_l1_norm(SpaceFunction{2.0, 1.0}, WeightedSpace::counting(2)), 2.0);
  EXPECT_EQ(weak_l1_norm(SpaceFunction(4), WeightedSpace::counting(4)), 0.0);
}

TEST(WeakNorm, MatchesDefinitionAndHomogeneity) {
  CounterRng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(60));
    auto f = random_function(rng, u.size());
    const double w = weak_l1_norm(f, u.space());
    EXPECT_DOUBLE_EQ(w, brute_weak_norm(magnitudes(f), u.space().weights()));
    const cplx c = rng.complex_normal();
    SpaceFunction cf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) cf[i] = c * f[i];
    EXPECT_NEAR(weak_l1_norm(cf, u.space()), std::abs(c) * w, 1e-12 * std::abs(c) * w);
  }
}

TEST(WeakNorm, ChebyshevConsistency) {
  CounterRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto u = random_isometry(rng, 1 + rng.index(60));
    auto f = random_function(rng, u.size());
    EXPECT_LE(weak_l1_norm(f, u.space()), lp_norm(f, u.space(), 1.0));
  }
}

TEST(LpNorm, Examples) {
  EXPECT_EQ(lp_norm(SpaceFunction{3.0, -1.0}, WeightedSpace::counting(2), inf), 3.0);
  EXPECT_EQ(lp_norm(SpaceFunction{3.0, 4.0}, WeightedSpace::counting(2), 2.0), 5.0);
  EXPECT_NEAR(lp_norm(Sequence(0, {1.0, cplx(0, 1)}), 1.0), 2.0, 0);
  EXPECT_THROW(lp_norm(SpaceFunction{1.0}, WeightedSpace::counting(1), 0.0), Error);
  EXPECT_THROW(lp_norm(SpaceFunction{1.0}, WeightedSpace::counting(2), 1.0), Error);
}

TEST(HolderGate, AcceptsAndRejects) {
  EXPECT_EQ(holder_exponent(2.0, 2.0), 1.0);
  EXPECT_NEAR(holder_exponent(3.0, 6.0), 2.0, 1e-15);
  EXPECT_THROW(holder_exponent(1.2, 1.2), Error);
  EXPECT_THROW(holder_exponent(1.0, 4.0), Error);
  EXPECT_THROW(holder_exponent(2.0, inf), Error);
  try {
    holder_exponent(1.2, 1.2);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadExponent);
  }
}

TEST(Oscillation, ConstantFamilyIsZero) {
  CounterRng rng(4);
  IndexedFamily<cplx> fam;
  fam.first = 1;
  const auto f = random_function(rng, 10);
  fam.members.assign(20, f);
  fam.weights.assign(10, 1.0);
  const auto rep = oscillation(fam, {1, 3, 7, 20}, OscVariant::left_closed);
  EXPECT_EQ(rep.value, 0.0);
  EXPECT_EQ(rep.R, 4u);
}

TEST(Oscillation, SingleBlock) {
  CounterRng rng(5);
  auto fam = random_family(rng, 1, 2, 12);
  const auto rep = oscillation(fam, {1, 2}, OscVariant::left_closed);
  std::vector<double> diff(12);
  for (std::size_t x = 0; x < 12; ++x) diff[x] = std::abs(fam.at(1)[x] - fam.at(2)[x]);
  EXPECT_EQ(rep.value, weak_l1_norm(diff, fam.weights));
}

TEST(Oscillation, MatchesBruteForceSquareFunction) {
  CounterRng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    auto fam = random_family(rng, 0, 30, 8);
    const auto u = random_breakpoints(rng, 0, 29, 2 + rng.index(8));
    for (auto variant : {OscVariant::left_closed, OscVariant::right_closed}) {
      const auto sq = square_function(fam, u, variant);
      for (std::size_t x = 0; x < 8; ++x) {
        double s = 0;
        for (std::size_t r = 0; r + 1 < u.size(); ++r) {
          double b = 0;
          for (std::int64_t n = u[r]; n <= u[r + 1]; ++n) {
            const bool left = variant == OscVariant::left_closed;
            if (left && n == u[r + 1]) continue;
            if (!left && n == u[r]) continue;
            b = std::max(b, std::abs(fam.at(n)[x] - fam.at(left ? u[r + 1] : u[r])[x]));
          }
          s += b * b;
        }
        EXPECT_NEAR(sq[x], std::sqrt(s), 1e-12);
      }
    }
  }
}

TEST(Oscillation, FactorTwoBetweenVariants) {
  CounterRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto fam = random_family(rng, 0, 40, 16);
    const auto u = random_breakpoints(rng, 0, 39, 2 + rng.index(12));
    const double l = oscillation(fam, u, OscVariant::left_closed).value;
    const double r = oscillation(fam, u, OscVariant::right_closed).value;
    EXPECT_LE(l, 2.0 * r);
    EXPECT_LE(r, 2.0 * l);
  }
}

TEST(Oscillation, HomogeneityAndRefinement) {
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto fam = random_family(rng, 0, 30, 10);
    auto u = random_breakpoints(rng, 0, 29, 3 + rng.index(5));
    const cplx c = rng.complex_normal();
    auto scaled = fam;
    for (auto& m : scaled.members)
      for (auto& v : m) v *= c;
    const double base = oscillation(fam, u, OscVariant::left_closed).value;
    EXPECT_NEAR(oscillation(scaled, u, OscVariant::left_closed).value, std::abs(c) * base, 1e-12 * (1 + base));
    // Dropping the last breakpoint removes one block from the sum.
    std::vector<std::int64_t> sub(u.begin(), u.end() - 1);
    if (sub.size() >= 2) {
      const auto full = square_function(fam, u, OscVariant::left_closed);
      const auto part = square_function(fam, sub, OscVariant::left_closed);
      for (std::size_t x = 0; x < full.size(); ++x) EXPECT_LE(part[x], full[x]);
    }
  }
}

TEST(Oscillation, Errors) {
  CounterRng rng(9);
  auto fam = random_family(rng, 1, 5, 3);
  EXPECT_THROW(oscillation(fam, {1, 9}, OscVariant::left_closed), Error);
  EXPECT_THROW(oscillation(fam, {2}, OscVariant::left_closed), Error);
  EXPECT_THROW(oscillation(fam, {3, 2}, OscVariant::left_closed), Error);
  try {
    oscillation(fam, {0, 2}, OscVariant::left_closed);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(Oscillation, FittedConstant) {
  CounterRng rng(10);
  auto fam = random_family(rng, 0, 17, 5);
  const auto rep = oscillation(fam, {0, 1, 4, 9, 16}, OscVariant::left_closed, 3.0);
  EXPECT_NEAR(rep.fitted_constant, rep.value / (3.0 * std::pow(5.0, 0.25)), 1e-15);
}

TEST(ExponentFit, ExactPowerLawAndConstant) {
  std::vector<std::pair<double, double>> pts, flat;
  for (double R : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    pts.emplace_back(R, 2.5 * std::pow(R, 0.25));
    flat.emplace_back(R, 7.0);
  }
  EXPECT_NEAR(exponent_fit(pts, 1.7), 0.25, 1e-10);
  EXPECT_NEAR(exponent_fit(flat), 0.0, 1e-12);
  EXPECT_THROW(exponent_fit({{4, 1}, {8, 2}}), Error);
  EXPECT_THROW(exponent_fit({{4, 1}, {8, 0}, {16, 2}}), Error);
  EXPECT_THROW(exponent_fit({{4, 1}, {4, 2}, {8, 2}}), Error);
}

TEST(OscillationRealline, ZeroInputAndEqualIndices) {
  const auto grid = Grid::midpoint(-2, 2, 16);
  const auto rep = oscillation_realline(LineFunction{}, LineFunction::indicator(0, 1), bump_kernel(1.0), 1, {0, 2, 4}, grid);
  EXPECT_EQ(rep.value, 0.0);
  // The zero kernel makes every difference vanish.
  const auto z = oscillation_realline(LineFunction::indicator(0, 1), LineFunction::indicator(0, 1), zero_kernel(), 1, {0, 1}, grid);
  EXPECT_EQ(z.value, 0.0);
}

TEST(OscillationRealline, FittedConstantStableUnderDoubling) {
  CounterRng rng(11);
  const auto F = LineFunction::piecewise_constant({-1, -0.3, 0.4, 1}, {rng.sign(), rng.sign(), rng.sign()});
  const auto G = LineFunction::piecewise_constant({-1, 0.1, 1}, {rng.sign(), rng.sign()});
  const auto grid = Grid::midpoint(-1.2, 1.2, 48);
  std::vector<std::int64_t> u4{-4, -3, -2, -1}, u8{-8, -7, -6, -5, -4, -3, -2, -1};
  const auto k = bump_kernel(1.0);
  const auto a = oscillation_realline(F, G, k, 1, u4, grid, OscVariant::left_closed, {1e-9});
  const auto b = oscillation_realline(F, G, k, 1, u8, grid, OscVariant::left_closed, {1e-9});
  ASSERT_GT(a.fitted_constant, 0.0);
  EXPECT_LT(b.fitted_constant / a.fitted_constant, 2.0);
  EXPECT_GT(b.fitted_constant / a.fitted_constant, 0.5);
  EXPECT_NE(a.fingerprint.find("bump"), std::string::npos);
}
