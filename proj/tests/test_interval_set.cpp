#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ppclab/interval_set.hpp"
#include "support.hpp"

using namespace ppclab;
using ppclab::test::q;

namespace {

IntervalSet set_of(std::initializer_list<std::pair<Rational, Rational>> parts) {
  std::vector<Interval> v;
  for (const auto& [lo, hi] : parts) v.emplace_back(lo, hi);
  return IntervalSet(v);
}

}  // namespace

TEST(Interval, RejectsOutsideUnit) {
  EXPECT_THROW(Interval(q(-1, 2), q(1, 2)), precondition_error);
  EXPECT_THROW(Interval(q(1, 2), q(3, 2)), precondition_error);
  EXPECT_THROW(Interval(q(3, 4), q(1, 4)), precondition_error);
}

TEST(IntervalSet, NormalizesTouchingAndDegenerate) {
  auto s = set_of({{q(1, 4), q(1, 2)}, {q(0), q(1, 4)}, {q(3, 4), q(3, 4)}});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.intervals()[0], Interval(q(0), q(1, 2)));
}

TEST(IntervalSet, Measure) {
  EXPECT_EQ(measure(IntervalSet()), 0);
  EXPECT_EQ(measure(IntervalSet::unit()), 1);
  EXPECT_EQ(measure(bohr_set(7, q(1, 100))), q(1, 50));
}

TEST(IntervalSet, Union) {
  EXPECT_EQ(unite(set_of({{q(0), q(1, 2)}}), IntervalSet()), set_of({{q(0), q(1, 2)}}));
  EXPECT_EQ(unite(set_of({{q(0), q(1, 4)}}), set_of({{q(1, 4), q(1, 2)}})), set_of({{q(0), q(1, 2)}}));
  auto u = unite(set_of({{q(0), q(1, 8)}}), set_of({{q(1, 2), q(1)}}));
  EXPECT_EQ(u.size(), 2u);
  EXPECT_EQ(u.measure(), q(5, 8));
}

TEST(IntervalSet, Intersect) {
  auto x = bohr_set(3, q(1, 10));
  EXPECT_EQ(intersect(x, IntervalSet::unit()), x);
  auto point = intersect(set_of({{q(0), q(1, 2)}}), set_of({{q(1, 2), q(1)}}));
  EXPECT_EQ(point.measure(), 0);
  auto both = intersect(bohr_set(1, q(1, 4)), bohr_set(2, q(1, 8)));
  EXPECT_EQ(both.measure(), q(1, 8));
  EXPECT_LE(both.measure(), q(1, 4));
}

TEST(IntervalSet, Complement) {
  EXPECT_TRUE(complement(IntervalSet::unit()).empty());
  EXPECT_EQ(complement(IntervalSet()), IntervalSet::unit());
  EXPECT_EQ(complement(set_of({{q(1, 4), q(3, 4)}})), set_of({{q(0), q(1, 4)}, {q(3, 4), q(1)}}));
}

TEST(BohrSet, Examples) {
  EXPECT_EQ(bohr_set(1, q(1, 2)), IntervalSet::unit());
  EXPECT_EQ(bohr_set(1, q(1, 4)), set_of({{q(0), q(1, 4)}, {q(3, 4), q(1)}}));
  auto b = bohr_set(2, q(1, 8));
  EXPECT_EQ(b, set_of({{q(0), q(1, 16)}, {q(7, 16), q(9, 16)}, {q(15, 16), q(1)}}));
  EXPECT_EQ(b.measure(), q(1, 4));
  EXPECT_EQ(bohr_set(-2, q(1, 8)), b);
}

TEST(BohrSet, RejectsBadArguments) {
  EXPECT_THROW(bohr_set(0, q(1, 8)), precondition_error);
  EXPECT_THROW(bohr_set(3, q(3, 4)), precondition_error);
}

TEST(BohrSet, MembershipMatchesDistanceToIntegers) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const long d = 1 + static_cast<long>(rng() % 12);
    const auto delta = q(1 + static_cast<long>(rng() % 20), 41);
    const auto set = bohr_set(d, delta);
    for (long k = 0; k <= 60; ++k) {
      const Rational x = q(k, 60);
      Rational dx = x * d;
      BigInt fl;
      mpz_fdiv_q(fl.get_mpz_t(), dx.get_num_mpz_t(), dx.get_den_mpz_t());
      Rational frac = dx - fl;
      Rational dist = frac < q(1, 2) ? frac : Rational(1 - frac);
      EXPECT_EQ(set.contains(x), dist <= delta) << "d=" << d << " x=" << x.get_str();
    }
  }
}

TEST(SmallDenominatorSet, Examples) {
  std::vector<std::int64_t> b01{0, 1};
  EXPECT_EQ(small_denominator_set(b01, q(1, 2)), bohr_set(1, q(1, 6)));
  EXPECT_EQ(small_denominator_set(b01, q(1, 2)).measure(), q(1, 3));

  std::vector<std::int64_t> b0n{0, 37};
  for (long e = 1; e <= 9; ++e) {
    Rational eps = q(e, 10);
    Rational expect = eps * 2 / 3;
    if (expect > 1) expect = 1;
    EXPECT_EQ(small_denominator_set(b0n, eps).measure(), expect);
  }

  std::vector<std::int64_t> b123{1, 2, 3};
  const auto s = small_denominator_set(b123, q(1, 10));
  EXPECT_EQ(s, set_of({{q(0), q(1, 50)}, {q(49, 100), q(51, 100)}, {q(49, 50), q(1)}}));
  EXPECT_EQ(s.measure(), q(3, 50));
}

TEST(BorelCantelli, Examples) {
  const auto a = bohr_set(3, q(1, 10));
  std::vector<IntervalSet> copies(5, a);
  EXPECT_EQ(borel_cantelli_ratio(copies), a.measure());

  std::vector<IntervalSet> disjoint;
  for (long i = 0; i < 4; ++i) disjoint.push_back(set_of({{q(i, 4), q(4 * i + 1, 16)}}));
  EXPECT_EQ(borel_cantelli_ratio(disjoint), q(4, 16));

  std::vector<IntervalSet> two{set_of({{q(0), q(1, 2)}}), set_of({{q(1, 4), q(3, 4)}})};
  EXPECT_EQ(borel_cantelli_ratio(two), q(2, 3));
}

TEST(IntervalSet, TextRoundTrip) {
  const auto b = bohr_set(5, q(1, 12));
  std::istringstream in("# comment\n" + to_text(b));
  EXPECT_EQ(read_interval_set(in), b);
}

TEST(IntervalSet, ComplementPartitionsUnit) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto a = bohr_set(1 + static_cast<long>(rng() % 9), q(1 + static_cast<long>(rng() % 9), 19));
    EXPECT_EQ(a.measure() + complement(a).measure(), 1);
    EXPECT_EQ(intersect(a, complement(a)).measure(), 0);
    EXPECT_EQ(unite(a, complement(a)), IntervalSet::unit());
  }
}
