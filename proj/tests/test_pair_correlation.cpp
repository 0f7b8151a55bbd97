#include <gtest/gtest.h>

#include <random>

#include "ppclab/pair_correlation.hpp"
#include "support.hpp"

using namespace ppclab;
using ppclab::test::ints;
using ppclab::test::q;
using ppclab::test::random_set;

namespace {

std::vector<BigInt> identity(std::size_t n) { return classic(ClassicFamily::identity, n).elements; }

Rational as_rational(const FractionalPart& part) { return std::get<Rational>(part); }

}  // namespace

TEST(Alpha, RationalIsReducedIntoUnitInterval) {
  auto a = Alpha::rational(q(10, 4));
  EXPECT_EQ(a.numerator(), 1);
  EXPECT_EQ(a.denominator(), 2);
  EXPECT_EQ(Alpha::rational(q(-1, 3)).value(), q(2, 3));
  EXPECT_EQ(Alpha::rational(q(0)).denominator(), 1);
  EXPECT_THROW(Alpha::rational(BigInt(1), BigInt(0)), precondition_error);
}

TEST(Alpha, Parsing) {
  EXPECT_EQ(parse_alpha("3/7").value(), q(3, 7));
  EXPECT_EQ(parse_alpha("0.25").value(), q(1, 4));
  const auto fx = parse_alpha("fixed:128:0.5");
  EXPECT_FALSE(fx.is_rational());
  EXPECT_EQ(fx.width(), 128u);
  EXPECT_EQ(fx.numerator(), pow2(127));
  EXPECT_THROW(parse_alpha("fixed:32:0.5"), std::exception);
  EXPECT_THROW(parse_alpha("x/y"), config_error);
}

TEST(FracMult, Examples) {
  EXPECT_EQ(as_rational(frac_mult(parse_alpha("3/7"), BigInt(10))), q(2, 7));
  EXPECT_EQ(as_rational(frac_mult(parse_alpha("1/2"), BigInt(3))), q(1, 2));
  EXPECT_EQ(as_rational(frac_mult(parse_alpha("5/13"), BigInt(13))), 0);
  const BigInt huge = pow2(4000) + 3;
  const auto a = Alpha::rational(BigInt(5), BigInt(11));
  BigInt r = 5 * huge;
  mpz_fdiv_r_ui(r.get_mpz_t(), r.get_mpz_t(), 11);
  EXPECT_EQ(as_rational(frac_mult(a, huge)), Rational(r, 11));
  EXPECT_THROW(frac_mult(a, BigInt(0)), precondition_error);
}

TEST(FracMult, FixedPointErrorIsCertified) {
  std::mt19937_64 rng(9);
  const unsigned width = 256;
  for (int t = 0; t < 100; ++t) {
    BigInt m;
    for (int w = 0; w < 4; ++w) m = m * pow2(64) + BigInt(static_cast<unsigned long>(rng()));
    const auto alpha = Alpha::fixed_point(m, width);
    const BigInt a = BigInt(static_cast<unsigned long>(rng() >> 1)) * pow2(rng() % 100) + 1;
    if (bit_length(a) + Alpha::kGuardBits > width) continue;
    const auto got = std::get<FixedFraction>(frac_mult(alpha, a));
    // exact fractional part scaled to 2^64
    BigInt t2 = m * a;
    mpz_fdiv_r_2exp(t2.get_mpz_t(), t2.get_mpz_t(), width);
    Rational exact(t2 * pow2(64), pow2(width));
    exact.canonicalize();
    Rational err = exact - Rational(BigInt(static_cast<unsigned long>(got.bits)));
    if (err < 0) err = -err;
    EXPECT_LE(err, FixedFraction::error_units);
  }
  EXPECT_THROW(frac_mult(Alpha::fixed_point(BigInt(1), 80), pow2(40)), precision_error);
}

TEST(PairCorrelation, SpecExamples) {
  const auto id4 = identity(4);
  EXPECT_EQ(pair_correlation(id4, parse_alpha("1/2"), 4, 1).exact(), 1);
  const auto id3 = identity(3);
  const auto third = parse_alpha("1/3");
  EXPECT_EQ(pair_correlation(id3, third, 3, 1).exact(), 2);
  EXPECT_EQ(pair_correlation_naive(id3, third, 3, 1).exact(), 2);
  EXPECT_EQ(pair_correlation_via_reps(id3, third, 3, 1).exact(), 2);
  // just below the boundary, nothing counts
  EXPECT_EQ(pair_correlation(id3, third, 3, q(99, 100)).ordered_pairs, 0u);
}

TEST(PairCorrelation, AlphaZeroCountsEveryPair) {
  const auto zero = Alpha::rational(q(0));
  const auto p = classic(ClassicFamily::primes, 300).elements;
  for (std::size_t n : {2u, 17u, 300u}) {
    for (const Rational& s : {q(0), q(1, 2), q(5)}) {
      EXPECT_EQ(pair_correlation(p, zero, n, s).exact(), static_cast<long>(n - 1));
      EXPECT_EQ(pair_correlation_naive(p, zero, n, s).exact(), static_cast<long>(n - 1));
      EXPECT_EQ(pair_correlation_via_reps(p, zero, n, s).exact(), static_cast<long>(n - 1));
    }
  }
}

TEST(PairCorrelation, RoutesAgreeOnRandomInstances) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 199;
    const auto seq = random_set(rng, n, 1, 1'000'000'000L);
    const BigInt qd = BigInt(static_cast<unsigned long>(2 + rng() % 100000));
    const auto alpha = Alpha::rational(BigInt(static_cast<unsigned long>(rng())) % qd, qd);
    const Rational s = std::vector<Rational>{q(1, 2), q(1), q(2)}[t % 3];
    const auto fast = pair_correlation(seq, alpha, n, s);
    EXPECT_EQ(fast, pair_correlation_naive(seq, alpha, n, s));
    EXPECT_EQ(fast, pair_correlation_via_reps(seq, alpha, n, s));
  }
}

TEST(PairCorrelation, LargeDenominatorPath) {
  std::mt19937_64 rng(41);
  const auto seq = build_blocks(GrowthFunction::iterated_log(1), 0.7, 0.45, 8);
  const std::vector<BigInt> el(seq.elements().begin(), seq.elements().end());
  for (int t = 0; t < 10; ++t) {
    const BigInt qd = pow2(90) + BigInt(static_cast<unsigned long>(rng()));
    const auto alpha = Alpha::rational(BigInt(static_cast<unsigned long>(rng())) * pow2(20), qd);
    const std::size_t n = el.size();
    EXPECT_EQ(pair_correlation(el, alpha, n, q(3, 2)), pair_correlation_naive(el, alpha, n, q(3, 2)));
  }
}

TEST(PairCorrelation, ShiftAndReflectionInvariance) {
  std::mt19937_64 rng(43);
  const auto seq = random_set(rng, 150, 1, 1L << 40);
  for (int t = 0; t < 20; ++t) {
    const Rational a = q(static_cast<long>(1 + rng() % 9999), 10007);
    const auto base = pair_correlation(seq, Alpha::rational(a), 150, 1);
    EXPECT_EQ(base, pair_correlation(seq, Alpha::rational(Rational(a + 1)), 150, 1));
    EXPECT_EQ(base, pair_correlation(seq, Alpha::rational(Rational(1 - a)), 150, 1));
  }
}

TEST(PairCorrelation, FixedPointMatchesRationalAwayFromTies) {
  std::mt19937_64 rng(47);
  const auto seq = classic(ClassicFamily::power, 2000, 2).elements;
  for (int t = 0; t < 10; ++t) {
    const BigInt k = BigInt(static_cast<unsigned long>(rng() | 1));
    const auto rational = Alpha::rational(k, pow2(64));
    const auto fixed = Alpha::fixed_point(k * pow2(64), 128);
    EXPECT_EQ(pair_correlation(seq, rational, 2000, 1), pair_correlation(seq, fixed, 2000, 1));
  }
}

TEST(PairCorrelation, FixedPointTieIsAnError) {
  // alpha = 1/2 exactly: every other pair sits at distance 0 and 1/2; with s = N/2 the
  // window equals 1/2, a tie no finite guard can decide
  const auto fx = Alpha::fixed_point(pow2(127), 128);
  EXPECT_THROW(pair_correlation(identity(4), fx, 4, 2), precision_error);
}

TEST(PairCorrelation, Preconditions) {
  const auto id = identity(5);
  EXPECT_THROW(pair_correlation(id, parse_alpha("1/3"), 1, 1), precondition_error);
  EXPECT_THROW(pair_correlation(id, parse_alpha("1/3"), 6, 1), precondition_error);
  EXPECT_THROW(pair_correlation(id, parse_alpha("1/3"), 5, -1), precondition_error);
}

TEST(RegularSystem, DenominatorRange) {
  const RegularSystemParams params{GrowthFunction::iterated_log(1), ThetaFunction::one_plus_log()};
  // direct evaluation of 2^10 / (f(2^10) sqrt(theta(2^10))) in a separate script
  EXPECT_NEAR(params.upper(10), 52.456293815506818, 1e-12);
  EXPECT_NEAR(params.lower(10), 34.97086254367121, 1e-12);
  const auto r = denominator_range(params, 10);
  EXPECT_EQ(r.q_min, 35u);
  EXPECT_EQ(r.q_max, 52u);
  EXPECT_THROW(denominator_range(params, 1), precondition_error);
}

TEST(RegularSystem, SingleDenominatorLevel) {
  const RegularSystemParams params{GrowthFunction::power(0.25), ThetaFunction::one_plus_log()};
  const auto r = denominator_range(params, 4);
  ASSERT_EQ(r.q_min, 3u);
  ASSERT_EQ(r.q_max, 3u);
  const auto c = exceptional_alpha_candidates(params, 4, 100);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].value(), q(1, 3));
  EXPECT_EQ(c[1].value(), q(2, 3));
}

TEST(RegularSystem, CandidatesAreReducedAndInRange) {
  const RegularSystemParams params{GrowthFunction::iterated_log(1), ThetaFunction::one_plus_log()};
  for (int j = 6; j <= 14; ++j) {
    const auto c = exceptional_alpha_candidates(params, j, 500);
    ASSERT_FALSE(c.empty());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& a = c[i];
      EXPECT_EQ(gcd(a.numerator(), a.denominator()), 1);
      EXPECT_GE(a.denominator().get_d(), params.lower(j));
      EXPECT_LE(a.denominator().get_d(), params.upper(j));
      if (i > 0) {
        const auto& b = c[i - 1];
        EXPECT_TRUE(b.denominator() < a.denominator() ||
                    (b.denominator() == a.denominator() && b.numerator() < a.numerator()));
      }
    }
  }
}

TEST(RegularSystem, UpperBoundGrows) {
  const RegularSystemParams params{GrowthFunction::iterated_log(2), ThetaFunction::power(0.25)};
  for (int j = 8; j < 60; ++j) EXPECT_LT(params.upper(j), params.upper(j + 1)) << j;
  for (int j = 1; j < 60; ++j) EXPECT_LT(params.lower(j), params.upper(j));
}

TEST(Perturbation, RankProxyAndNeighbourhood) {
  EXPECT_EQ(rank_proxy(BigInt(1)), 1u);
  EXPECT_EQ(rank_proxy(BigInt(108)), 48u);
  const RegularSystemParams params;
  const auto cand = Alpha::rational(BigInt(5), BigInt(108));
  const auto same = perturbed_alpha(cand, params, 0);
  EXPECT_EQ(same.alpha.value(), cand.value());
  EXPECT_EQ(as_rational(frac_mult(same.alpha, BigInt(108))), 0);

  const auto half = perturbed_alpha(cand, params, q(1, 2));
  EXPECT_GT(half.eta, 0);
  EXPECT_LE(half.eta, half.psi);
  const Rational dist = as_rational(frac_mult(half.alpha, BigInt(108)));
  EXPECT_EQ(dist, half.eta * 108);
  EXPECT_LE(dist, half.psi * 108);
  EXPECT_THROW(perturbed_alpha(cand, params, 2), precondition_error);
}

TEST(Perturbation, TargetedScaleKeepsCoincidences) {
  const auto seq = build_blocks(GrowthFunction::iterated_log(1), 0.7, 0.45, 9);
  const RegularSystemParams params;
  const auto cand = Alpha::rational(BigInt(1), BigInt(30));
  const std::size_t n = seq.checkpoint(9);
  const auto scale = targeted_scale(cand, params, seq.elements(), n, 1);
  const auto p = perturbed_alpha(cand, params, scale);
  EXPECT_LE(p.eta * seq.elements()[n - 1], Rational(1, 2 * n));
  EXPECT_GT(p.eta * 2 * seq.elements()[n - 1], Rational(1, 2 * n));  // largest such power of two
  EXPECT_GE(pair_correlation(seq.elements(), p.alpha, n, 1).ordered_pairs,
            pair_correlation(seq.elements(), cand, n, 0).ordered_pairs);
}

TEST(Probe, AlphaZeroDiverges) {
  const auto seq = build_blocks(GrowthFunction::iterated_log(1), 2.0 / 3.0, 1.0 / 3.0, 8);
  std::vector<int> levels{3, 5, 8};
  const auto tr = divergence_probe(seq, Alpha::rational(q(0)), 1, levels, ThetaFunction::one_plus_log());
  ASSERT_EQ(tr.entries.size(), 3u);
  for (const auto& e : tr.entries) EXPECT_EQ(e.r.exact(), static_cast<long>(e.n - 1));
  EXPECT_LT(tr.entries[0].n, tr.entries[2].n);
  EXPECT_GT(tr.entries[0].predicted, 0);
}

TEST(MonteCarlo, DeterministicAndOrdered) {
  const auto seq = classic(ClassicFamily::power, 3000, 2).elements;
  MonteCarloConfig cfg;
  cfg.seed = 42;
  cfg.trials = 4;
  cfg.schedule = {1000, 3000};
  cfg.s_values = {q(1, 2), q(1)};
  const auto a = monte_carlo_ppc(seq, cfg, 1);
  const auto b = monte_carlo_ppc(seq, cfg, 3);
  ASSERT_EQ(a.rows.size(), 16u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].r, b.rows[i].r);
    EXPECT_EQ(a.rows[i].trial_seed, trial_seed(42, a.rows[i].trial));
  }
  EXPECT_EQ(a.summary.size(), 4u);
  for (const auto& alpha : a.alphas) {
    EXPECT_EQ(alpha.denominator(), pow2(64));
    EXPECT_EQ(mpz_odd_p(alpha.numerator().get_mpz_t()) != 0, true);
  }
}

TEST(MonteCarlo, ZeroWindowHasNoPairs) {
  const auto seq = classic(ClassicFamily::primes, 500).elements;
  MonteCarloConfig cfg;
  cfg.seed = 1;
  cfg.trials = 5;
  cfg.schedule = {500};
  cfg.s_values = {q(0)};
  cfg.denominator = RandomDenominator::prime64;
  for (const auto& row : monte_carlo_ppc(seq, cfg).rows) EXPECT_EQ(row.r.ordered_pairs, 0u);
}
