#include <gtest/gtest.h>

#include "ergosc/ergosc.hpp"
#include "oracles.hpp"

using namespace ergosc;
using namespace oracle;

namespace {

// s_j(n) = random complex weights on |n| <= 4, fixed per j.
struct RandomWeights {
  std::uint64_t seed;
  WeightSequence operator()(std::int64_t j) const {
    CounterRng rng(seed, static_cast<std::uint64_t>(j));
    return random_complex(rng, -4, 9);
  }
};

}  // namespace

TEST(Conjugation, TrivialCases) {
  CounterRng rng(1);
  auto u = random_isometry(rng, 20);
  auto F = random_function(rng, 20), G = random_function(rng, 20);
  EXPECT_EQ(conjugation_identity_check(u, F, G, 3, -2, 0), 0.0);
  auto p = random_isometry(rng, 20, {3, false});
  for (int k = -4; k <= 4; ++k) EXPECT_EQ(conjugation_identity_check(p, F, G, 2, -3, k), 0.0);
}

TEST(Conjugation, RandomDrawsOnZ8) {
  CounterRng rng(2);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    auto u = make_isometry(WeightedSpace::counting(8), [&] {
      std::vector<cplx> h(8);
      for (auto& z : h) z = rng.unit_phase();
      return h;
    }(), [&] {
      std::vector<std::size_t> p(8);
      std::iota(p.begin(), p.end(), 0);
      rng.shuffle(p);
      return p;
    }());
    auto F = random_function(rng, 8), G = random_function(rng, 8);
    worst = std::max(worst, conjugation_identity_check(u, F, G, rng.integer(-4, 4), rng.integer(-4, 4), rng.integer(-4, 4)));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Conjugation, DomainMismatch) {
  auto u = rotation(5);
  EXPECT_THROW(conjugation_identity_check(u, SpaceFunction(4), SpaceFunction(5), 0, 0, 1), Error);
}

TEST(DeltaStatistic, ConstantFamilyIsZero) {
  CounterRng rng(3);
  auto u = random_isometry(rng, 30);
  auto f = random_function(rng, 30), g = random_function(rng, 30);
  const auto w = random_complex(rng, -3, 7);
  const auto d = delta_statistic(u, f, g, [&](std::int64_t) { return w; }, {1, 2, 5, 9});
  for (double v : d) EXPECT_EQ(v, 0.0);
}

TEST(DeltaStatistic, SingleBlock) {
  CounterRng rng(4);
  auto u = random_isometry(rng, 25);
  auto f = random_function(rng, 25), g = random_function(rng, 25);
  RandomWeights w{7};
  const std::vector<std::int64_t> bp{2, 6};
  const auto d = delta_statistic(u, f, g, w, bp);
  const auto top = weighted_biform_space(u, f, g, w(6));
  for (std::size_t x = 0; x < 25; ++x) {
    double s = 0;
    for (std::int64_t j = 2; j < 6; ++j) s = std::max(s, std::abs(weighted_biform_space(u, f, g, w(j))[x] - top[x]));
    EXPECT_NEAR(d[x], s, 1e-14);
  }
}

TEST(DeltaStatistic, DistributionInvariantUnderAutomorphism) {
  CounterRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_isometry(rng, 10 + rng.index(40));
    auto f = random_function(rng, u.size()), g = random_function(rng, u.size());
    const auto d = delta_statistic(u, f, g, RandomWeights{static_cast<std::uint64_t>(trial)}, {0, 1, 3, 6});
    for (std::int64_t k = -5; k <= 5; ++k)
      EXPECT_EQ(distribution(automorphism(isometry_power(u, k), d), u.space()), distribution(d, u.space()));
  }
}

TEST(DeltaStatistic, SubFamilyNeverExceedsFull) {
  CounterRng rng(6);
  auto u = random_isometry(rng, 40);
  auto f = random_function(rng, 40), g = random_function(rng, 40);
  RandomWeights w{11};
  const auto full = delta_statistic(u, f, g, w, {0, 2, 3, 7, 8});
  const auto part = delta_statistic(u, f, g, w, {0, 2, 3, 7});
  for (std::size_t x = 0; x < 40; ++x) EXPECT_LE(part[x], full[x]);
}

TEST(Transference, ZeroInput) {
  auto u = rotation(11);
  SpaceFunction z(11), g(11, 1.0);
  const auto rep = transference_experiment(u, z, g, RandomWeights{1}, {1, 2, 4}, 1.0);
  EXPECT_EQ(rep.space_value, 0.0);
  EXPECT_FALSE(rep.violated);
}

TEST(Transference, IdentitySystemReducesToScalars) {
  CounterRng rng(7);
  auto u = identity_isometry(WeightedSpace({1.0, 2.0, 0.5, 1.5, 1.0, 3.0}));
  auto f = random_function(rng, 6), g = random_function(rng, 6);
  RandomWeights w{3};
  const std::vector<std::int64_t> bp{0, 2, 5, 6};
  std::vector<cplx> c;
  for (std::int64_t j = 0; j <= 6; ++j) {
    cplx s{};
    for (auto v : w(j).values) s += v;
    c.push_back(s);
  }
  double scalar = 0;
  for (std::size_t r = 0; r + 1 < bp.size(); ++r) {
    double b = 0;
    for (std::int64_t j = bp[r]; j < bp[r + 1]; ++j) b = std::max(b, std::abs(c[j] - c[bp[r + 1]]));
    scalar += b * b;
  }
  scalar = std::sqrt(scalar);
  const auto d = delta_statistic(u, f, g, w, bp);
  for (std::size_t x = 0; x < 6; ++x) EXPECT_NEAR(d[x], std::abs(f[x] * g[x]) * scalar, 1e-12 * (1 + d[x]));
}

TEST(Transference, ViolationThrowsBoundViolated) {
  CounterRng rng(8);
  auto u = random_isometry(rng, 30);
  auto f = random_function(rng, 30), g = random_function(rng, 30);
  RandomWeights w{5};
  const auto rep = evaluate_transference(u, f, g, w, {0, 1, 2, 4}, 1e-6);
  EXPECT_TRUE(rep.violated);
  try {
    transference_experiment(u, f, g, w, {0, 1, 2, 4}, 1e-6);
    FAIL() << "expected BoundViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BoundViolated);
  }
}

TEST(SequenceForms, MatchSpaceFormsOnOrbits) {
  // On Z_N with a rotation, the space form at x equals the sequence form of the orbit
  // sequences a_n = f(x + n), b_n = g(x + n) at n = 0, once the windows cover the weights.
  CounterRng rng(9);
  const std::size_t N = 13;
  auto u = rotation(N, 1);
  auto f = random_function(rng, N), g = random_function(rng, N);
  const auto w = random_complex(rng, -3, 7);
  const auto space = weighted_biform_space(u, f, g, w);
  for (std::size_t x = 0; x < N; ++x) {
    Sequence a, b;
    a.lo = b.lo = -5;
    for (std::int64_t n = -5; n <= 5; ++n) {
      a.values.push_back(f[(x + N * 2 + n) % N]);
      b.values.push_back(g[(x + N * 2 + n) % N]);
    }
    EXPECT_NEAR(std::abs(weighted_biform_seq(a, b, w)[0] - space[x]), 0.0, 1e-12);
  }
}
