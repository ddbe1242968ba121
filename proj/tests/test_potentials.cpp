#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ntsym/potentials.hpp"
#include "oracles.hpp"

using namespace ntsym;

namespace {

const AlphabetSeq m2 = AlphabetSeq::constant(2);

/// D = 2, m = 2: f_k(w) = scale_k * (w_2 - 1) + 0.3 * w_1, scale_k = 2^{-k}
/// for the first `levels` levels and 0 afterwards.
PotentialSeq geometric_oscillation(std::size_t levels) {
  std::vector<PotentialSeq::Table> head;
  for (std::size_t k = 0; k < levels; ++k) {
    const double s = std::ldexp(1.0, -static_cast<int>(k));
    head.push_back({0.3, 0.3 + s, 0.6, 0.6 + s});
  }
  return PotentialSeq::depth_dependent(m2, 2, head, {{0.3, 0.3, 0.6, 0.6}});
}

/// A depth-3 potential on m = (2, 3) with arbitrary table entries.
PotentialSeq random_depth3(std::uint64_t seed) {
  const AlphabetSeq m({}, {2, 3});
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<PotentialSeq::Table> period;
  for (std::size_t k = 0; k < 2; ++k) {
    PotentialSeq::Table t(m(k) * m(k + 1) * m(k + 2));
    for (auto& x : t) x = u(gen);
    period.push_back(t);
  }
  return PotentialSeq::depth_dependent(m, 3, {}, period);
}

PointPrefix random_point(const AlphabetSeq& m, std::mt19937_64& gen, std::size_t len) {
  std::vector<Symbol> s(len);
  for (std::size_t j = 0; j < len; ++j) s[j] = static_cast<Symbol>(1 + gen() % m(j));
  return PointPrefix::finite(0, s);
}

}  // namespace

TEST(PotentialSeq, RejectsMalformedTables) {
  EXPECT_THROW(PotentialSeq::first_coord(m2, {}, {{1.0}}), std::invalid_argument);
  EXPECT_THROW(PotentialSeq::first_coord(m2, {}, {{1.0, NAN}}), std::invalid_argument);
  EXPECT_THROW(PotentialSeq::depth_dependent(m2, 2, {}, {{1, 2, 3}}), std::invalid_argument);
  EXPECT_THROW(PotentialSeq::depth_dependent(m2, 0, {}, {{1, 2}}), std::invalid_argument);
}

TEST(PotentialSeq, SupNormAndCoefficients) {
  const auto f = PotentialSeq::first_coord(AlphabetSeq({}, {2, 3}), {{-4.0, 1.0}, {1, 2, 3}}, {{0.5, 0.25}, {1, 2, 3}});
  EXPECT_EQ(f.sup_norm(), 4.0);
  EXPECT_EQ(f.coefficient(0, 1), -4.0);
  EXPECT_EQ(f.coefficient(1, 3), 3.0);
  EXPECT_EQ(f.coefficient(2, 2), 0.25);
}

TEST(BirkhoffSum, Examples) {
  std::mt19937_64 gen(3);
  const auto zero = PotentialSeq::zero(m2);
  EXPECT_EQ(birkhoff_sum(zero, random_point(m2, gen, 7), 7), 0.0);

  const auto logi = PotentialSeq::uniform_first_coord(m2, {std::log(1.0), std::log(2.0)});
  const auto w = PointPrefix::finite(0, {2, 1, 2});
  EXPECT_DOUBLE_EQ(birkhoff_sum(logi, w, 2), std::log(2.0));
  EXPECT_EQ(birkhoff_sum(logi, w, 0), 0.0);
}

TEST(BirkhoffSum, NeedsDepthNPlusDMinusOne) {
  const auto f = geometric_oscillation(4);
  const auto w = PointPrefix::finite(0, {1, 2, 1});
  EXPECT_NO_THROW(birkhoff_sum(f, w, 2));
  EXPECT_THROW(birkhoff_sum(f, w, 3), depth_error);
  EXPECT_NO_THROW(birkhoff_sum(f, PointPrefix::periodic(0, {}, {1, 2}), 40));
}

TEST(BirkhoffSum, MatchesDirectTableSum) {
  const auto f = random_depth3(11);
  const auto& m = f.alphabet();
  std::mt19937_64 gen(5);
  for (int t = 0; t < 200; ++t) {
    const auto w = random_point(m, gen, 60);
    const std::size_t n = 1 + gen() % 50;
    double expect = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = ((w[j] - 1) * m(j + 1) + (w[j + 1] - 1)) * m(j + 2) + (w[j + 2] - 1);
      expect += f.table(j)[idx];
    }
    ASSERT_NEAR(birkhoff_sum(f, w, n), expect, 1e-12);
  }
}

TEST(BirkhoffSum, CocycleOnSampledPoints) {
  const auto f = random_depth3(12);
  std::mt19937_64 gen(6);
  for (int t = 0; t < 200; ++t) {
    const auto w = random_point(f.alphabet(), gen, 60);
    for (std::size_t n = 0; n < 50; ++n) {
      auto tail = w;
      for (std::size_t j = 0; j < n; ++j) tail = tail.shifted();
      const double step = f.value(n, std::span<const Symbol>(tail.curtail(3).symbols));
      ASSERT_NEAR(birkhoff_sum(f, w, n + 1), birkhoff_sum(f, w, n) + step, 1e-12);
    }
  }
}

TEST(Envelopes, Examples) {
  const auto fc = PotentialSeq::uniform_first_coord(m2, {0.2, -1.0});
  const auto e = envelopes(fc);
  EXPECT_EQ(e.lower.tables(), fc.tables());
  EXPECT_EQ(e.upper.tables(), fc.tables());

  // f_k(w) = w_2 / 10
  const auto f = PotentialSeq::depth_dependent(m2, 2, {}, {{0.1, 0.2, 0.1, 0.2}});
  const auto env = envelopes(f);
  for (Symbol i = 1; i <= 2; ++i) {
    EXPECT_DOUBLE_EQ(env.lower.coefficient(0, i), 0.1);
    EXPECT_DOUBLE_EQ(env.upper.coefficient(0, i), 0.2);
    EXPECT_DOUBLE_EQ(env.upper.coefficient(9, i), 0.2);
  }

  const auto c = PotentialSeq::depth_dependent(m2, 3, {}, {PotentialSeq::Table(8, 1.5)});
  const auto ce = envelopes(c);
  for (Symbol i = 1; i <= 2; ++i) {
    EXPECT_EQ(ce.lower.coefficient(4, i), 1.5);
    EXPECT_EQ(ce.upper.coefficient(4, i), 1.5);
  }
}

TEST(Envelopes, LowerNeverExceedsUpper) {
  const auto f = random_depth3(21);
  const auto e = envelopes(f);
  for (std::size_t k = 0; k < 8; ++k)
    for (Symbol i = 1; i <= f.alphabet()(k); ++i) ASSERT_LE(e.lower.coefficient(k, i), e.upper.coefficient(k, i));
}

TEST(Envelopes, SandwichBirkhoffSums) {
  const auto f = random_depth3(31);
  const auto e = envelopes(f);
  std::mt19937_64 gen(8);
  for (int t = 0; t < 1000; ++t) {
    const auto w = random_point(f.alphabet(), gen, 64);
    const std::size_t n = gen() % 60;
    const double s = birkhoff_sum(f, w, n);
    ASSERT_LE(birkhoff_sum(e.lower, w, n), s + 1e-12);
    ASSERT_GE(birkhoff_sum(e.upper, w, n), s - 1e-12);
  }
}

TEST(Envelopes, Idempotent) {
  const auto e = envelopes(random_depth3(41));
  const auto ee = envelopes(e.lower);
  EXPECT_EQ(ee.lower.tables(), e.lower.tables());
  EXPECT_EQ(ee.upper.tables(), e.lower.tables());
}

TEST(Reduce, PolicyPicksInsideTheEnvelope) {
  const auto f = PotentialSeq::depth_dependent(m2, 2, {}, {{0.1, 0.2, 0.1, 0.2}});
  EXPECT_DOUBLE_EQ(reduce(f, EnvelopePolicy::lower).coefficient(3, 1), 0.1);
  EXPECT_DOUBLE_EQ(reduce(f, EnvelopePolicy::midpoint).coefficient(3, 2), 0.15);
  EXPECT_DOUBLE_EQ(reduce(f, EnvelopePolicy::upper).coefficient(3, 1), 0.2);
}

TEST(SbvBound, FirstCoordAndConstantAreZero) {
  const auto fc = PotentialSeq::uniform_first_coord(m2, {0.4, -2.0});
  const auto r = sbv_bound(fc, 20);
  EXPECT_EQ(r.bound, 0.0);
  for (double g : r.gaps) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(sbv_bound(PotentialSeq::constant(m2, 3.0), 5).bound, 0.0);
  EXPECT_THROW(sbv_bound(fc, 0), std::invalid_argument);
}

TEST(SbvBound, GeometricOscillationSumsBelowTwo) {
  const auto r = sbv_bound(geometric_oscillation(40), 40);
  EXPECT_LE(r.bound, 2.0);
  EXPECT_NEAR(r.bound, 2.0 - std::ldexp(1.0, -39), 1e-12);
  EXPECT_TRUE(r.increments_settle);
  for (std::size_t n = 1; n < r.gaps.size(); ++n) EXPECT_GE(r.gaps[n], r.gaps[n - 1]);
}

TEST(SbvBound, MatchesEnumeratedGapOverCylinders) {
  // Maximise S_n f^* - S_n f_* over every rank-n word directly.
  const auto f = random_depth3(51);
  const auto e = envelopes(f);
  const auto& m = f.alphabet();
  const oracle::SizeFn mf = [&](std::size_t k) { return m(k); };
  const oracle::CoefFn up = [&](std::size_t k, oracle::Sym i) { return e.upper.coefficient(k, i); };
  const oracle::CoefFn lo = [&](std::size_t k, oracle::Sym i) { return e.lower.coefficient(k, i); };
  const auto r = sbv_bound(f, 8);
  for (std::size_t n = 1; n <= 8; ++n) {
    double best = 0.0;
    for (const auto& u : oracle::words(mf, 0, n))
      best = std::max(best, oracle::birkhoff(up, u, n) - oracle::birkhoff(lo, u, n));
    ASSERT_NEAR(r.gaps[n - 1], best, 1e-12);
  }
}

TEST(SbvBound, GrowingOscillationIsFlagged) {
  std::vector<PotentialSeq::Table> head;
  for (std::size_t k = 0; k < 40; ++k) {
    const double s = 0.01 * static_cast<double>(k);
    head.push_back({0.0, s, 0.0, s});
  }
  const auto f = PotentialSeq::depth_dependent(m2, 2, head, {{0, 0, 0, 0}});
  EXPECT_FALSE(sbv_bound(f, 30).increments_settle);
}
