#pragma once

// Pair correlation statistic
//   R([-s,s], alpha, N) = (1/N) #{ i != j <= N : ||alpha a_i - alpha a_j|| <= s/N }
// for integer sequences, with three independent counting routes, the
// exceptional-alpha generator built on rationals with denominators in
// [b_j, B_j], the divergence probe, and a seeded Monte Carlo driver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ppclab/additive_energy.hpp"
#include "ppclab/block_sequence.hpp"
#include "ppclab/growth.hpp"
#include "ppclab/numeric.hpp"
#include "ppclab/parallel.hpp"

namespace ppclab {

/// alpha in [0,1): an exact rational p/q in lowest terms, or a binary
/// fraction mantissa / 2^width standing for a real known to width bits.
class Alpha {
 public:
  enum class Mode { rational, fixed_point };
  static constexpr unsigned kGuardBits = 64;

  static Alpha rational(const Rational& value) {
    Rational v = value;
    v.canonicalize();
    BigInt num = v.get_num();
    const BigInt& den = v.get_den();
    mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    Alpha a;
    a.mode_ = Mode::rational;
    a.num_ = num;
    a.den_ = den;
    return a;
  }

  static Alpha rational(const BigInt& p, const BigInt& q) {
    if (sgn(q) <= 0) throw precondition_error("alpha denominator must be positive");
    return rational(Rational(p, q));
  }

  static Alpha fixed_point(const BigInt& mantissa, unsigned width) {
    if (width < kGuardBits + 1) throw precondition_error("fixed-point alpha needs width > 64 bits");
    if (sgn(mantissa) < 0 || bit_length(mantissa) > width)
      throw precondition_error("fixed-point mantissa must lie in [0, 2^width)");
    Alpha a;
    a.mode_ = Mode::fixed_point;
    a.num_ = mantissa;
    a.den_ = pow2(width);
    a.width_ = width;
    return a;
  }

  Mode mode() const { return mode_; }
  bool is_rational() const { return mode_ == Mode::rational; }
  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  unsigned width() const { return width_; }

  Rational value() const {
    Rational v(num_, den_);
    v.canonicalize();
    return v;
  }

  std::string to_string() const {
    if (is_rational()) return ppclab::to_string(value());
    return "fixed:" + std::to_string(width_) + ":" + num_.get_str();
  }

 private:
  Alpha() = default;
  Mode mode_ = Mode::rational;
  BigInt num_{0};
  BigInt den_{1};
  unsigned width_ = 0;
};

/// "p/q" or a decimal for rational mode; "fixed:L:value" truncates value to L bits.
inline Alpha parse_alpha(std::string_view text) {
  auto t = trim(text);
  if (t.substr(0, 6) == "fixed:") {
    auto rest = t.substr(6);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw config_error("fixed alpha must look like fixed:L:value");
    const unsigned width = static_cast<unsigned>(std::stoul(std::string(rest.substr(0, colon))));
    Rational v = parse_rational(rest.substr(colon + 1));
    BigInt mantissa;
    Rational scaled = v * pow2(width);
    mpz_fdiv_q(mantissa.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    mpz_fdiv_r(mantissa.get_mpz_t(), mantissa.get_mpz_t(), pow2(width).get_mpz_t());
    try {
      return Alpha::fixed_point(mantissa, width);
    } catch (const precondition_error& e) {
      throw config_error(e.what());
    }
  }
  return Alpha::rational(parse_rational(t));
}

/// Top 64 bits of a certified fixed-point fractional part: the true value lies
/// within error_units / 2^64 of bits / 2^64 (circularly).
struct FixedFraction {
  std::uint64_t bits;
  static constexpr std::uint64_t error_units = 2;
};

using FractionalPart = std::variant<Rational, FixedFraction>;

namespace detail {

inline std::size_t required_width(const BigInt& a) { return bit_length(a) + Alpha::kGuardBits; }

inline FixedFraction fixed_fraction(const Alpha& alpha, const BigInt& a) {
  const std::size_t need = required_width(a);
  if (alpha.width() < need)
    throw precision_error("fixed-point precision exhausted: element of " + std::to_string(bit_length(a)) +
                          " bits needs L >= " + std::to_string(need) + " (have " + std::to_string(alpha.width()) + ")");
  BigInt t = alpha.numerator() * a;
  mpz_tdiv_r_2exp(t.get_mpz_t(), t.get_mpz_t(), alpha.width());
  mpz_tdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), alpha.width() - 64);
  return {low_u64(t)};
}

}  // namespace detail

/// <alpha a>: (p a mod q) / q exactly in rational mode, certified 64-bit
/// fraction in fixed-point mode.
inline FractionalPart frac_mult(const Alpha& alpha, const BigInt& a) {
  if (sgn(a) < 1) throw precondition_error("frac_mult: a must be >= 1");
  if (!alpha.is_rational()) return detail::fixed_fraction(alpha, a);
  const BigInt& q = alpha.denominator();
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
  r *= alpha.numerator();
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t());
  Rational out(r, q);
  out.canonicalize();
  return out;
}

/// Ordered pair count behind R; R = ordered_pairs / n.
struct PairCount {
  std::uint64_t ordered_pairs = 0;
  std::size_t n = 0;
  double value() const { return static_cast<double>(ordered_pairs) / static_cast<double>(n); }
  Rational exact() const {
    Rational r(BigInt(static_cast<unsigned long>(ordered_pairs)), BigInt(static_cast<unsigned long>(n)));
    r.canonicalize();
    return r;
  }
  friend bool operator==(const PairCount&, const PairCount&) = default;
};

namespace detail {

inline void check_pc_args(std::span<const BigInt> seq, std::size_t N, const Rational& s) {
  if (N < 2) throw precondition_error("pair correlation needs N >= 2");
  if (N > seq.size())
    throw precondition_error("N = " + std::to_string(N) + " exceeds sequence length " + std::to_string(seq.size()));
  if (s < 0) throw precondition_error("s must be >= 0");
}

/// Ordered pairs i != j of sorted residues mod q with circular distance <= w.
template <class Int>
std::uint64_t count_circular_pairs(const std::vector<Int>& r, const Int& q, const Int& w) {
  const std::size_t n = r.size();
  if (w >= q / 2) return static_cast<std::uint64_t>(n) * (n - 1);
  std::uint64_t near = 0, wrap = 0;
  const Int far = q - w;
  std::size_t hi = 0, lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (hi < i) hi = i;
    while (hi + 1 < n && r[hi + 1] - r[i] <= w) ++hi;
    near += hi - i;
    if (lo < i + 1) lo = i + 1;
    while (lo < n && r[lo] - r[i] < far) ++lo;
    wrap += n - lo;
  }
  return 2 * (near + wrap);
}

// floor(s * q / N)
inline BigInt window(const Rational& s, const BigInt& q, std::size_t N) {
  BigInt num = s.get_num() * q;
  BigInt den = s.get_den() * static_cast<unsigned long>(N);
  BigInt w;
  mpz_fdiv_q(w.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return w;
}

inline bool fits_u64_modulus(const BigInt& q) { return q <= pow2(64); }

inline unsigned __int128 to_u128(const BigInt& x) {
  BigInt hi = x >> 64;
  return (static_cast<unsigned __int128>(hi.get_ui()) << 64) | low_u64(x);
}

/// Residues p a_i mod q for a modulus q <= 2^64.
inline std::vector<unsigned __int128> small_residues(std::span<const BigInt> a, const BigInt& p, const BigInt& q) {
  const bool full = (q == pow2(64));
  const unsigned __int128 qq = to_u128(q);
  const std::uint64_t pp = low_u64(p);
  std::vector<unsigned __int128> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t ai = full ? low_u64(a[i]) : mod_u64(a[i], static_cast<std::uint64_t>(qq));
    out[i] = (static_cast<unsigned __int128>(pp) * ai) % qq;
  }
  return out;
}

inline std::vector<BigInt> big_residues(std::span<const BigInt> a, const BigInt& p, const BigInt& q) {
  std::vector<BigInt> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    mpz_fdiv_r(out[i].get_mpz_t(), a[i].get_mpz_t(), q.get_mpz_t());
    out[i] *= p;
    mpz_fdiv_r(out[i].get_mpz_t(), out[i].get_mpz_t(), q.get_mpz_t());
  }
  return out;
}

/// Fixed-point certification: pairs with computed distance <= floor(thr) - 4
/// are certainly inside, those > floor(thr) + 4 certainly outside.
struct FixedWindow {
  bool has_inner;
  unsigned __int128 inner;
  unsigned __int128 outer;
};

inline FixedWindow fixed_window(const Rational& s, std::size_t N) {
  const BigInt thr = window(s, pow2(64), N);
  constexpr unsigned slack = 2 * FixedFraction::error_units;
  FixedWindow w{};
  w.has_inner = thr >= slack;
  w.inner = w.has_inner ? to_u128(BigInt(thr - slack)) : 0;
  BigInt outer = thr + slack;
  if (outer > pow2(64)) outer = pow2(64);
  w.outer = to_u128(outer);
  return w;
}

[[noreturn]] inline void undecidable_tie() {
  throw precision_error("fixed-point comparison within the precision guard of s/N; rerun in rational mode");
}

}  // namespace detail

/// Sorted two-pointer sweep over the fractional parts, O(N log N).
inline PairCount pair_correlation(std::span<const BigInt> seq, const Alpha& alpha, std::size_t N, const Rational& s) {
  detail::check_pc_args(seq, N, s);
  const auto a = seq.first(N);
  PairCount out{0, N};
  if (alpha.is_rational()) {
    const BigInt& q = alpha.denominator();
    const BigInt w = detail::window(s, q, N);
    if (detail::fits_u64_modulus(q)) {
      auto r = detail::small_residues(a, alpha.numerator(), q);
      std::sort(r.begin(), r.end());
      const unsigned __int128 qq = detail::to_u128(q);
      const unsigned __int128 ww = w >= q ? qq : detail::to_u128(w);
      out.ordered_pairs = detail::count_circular_pairs<unsigned __int128>(r, qq, ww);
    } else {
      auto r = detail::big_residues(a, alpha.numerator(), q);
      std::sort(r.begin(), r.end());
      out.ordered_pairs = detail::count_circular_pairs<BigInt>(r, q, w);
    }
    return out;
  }
  std::vector<unsigned __int128> r(N);
  for (std::size_t i = 0; i < N; ++i) r[i] = detail::fixed_fraction(alpha, a[i]).bits;
  std::sort(r.begin(), r.end());
  const unsigned __int128 q = static_cast<unsigned __int128>(1) << 64;
  const auto fw = detail::fixed_window(s, N);
  const std::uint64_t outer = detail::count_circular_pairs<unsigned __int128>(r, q, fw.outer);
  const std::uint64_t inner = fw.has_inner ? detail::count_circular_pairs<unsigned __int128>(r, q, fw.inner) : 0;
  if (inner != outer) detail::undecidable_tie();
  out.ordered_pairs = outer;
  return out;
}

/// O(N^2) oracle on exact fractional parts (rational mode) or certified
/// 64-bit fractions (fixed-point mode).
inline PairCount pair_correlation_naive(std::span<const BigInt> seq, const Alpha& alpha, std::size_t N,
                                        const Rational& s) {
  detail::check_pc_args(seq, N, s);
  PairCount out{0, N};
  if (alpha.is_rational()) {
    std::vector<Rational> theta(N);
    for (std::size_t i = 0; i < N; ++i) theta[i] = std::get<Rational>(frac_mult(alpha, seq[i]));
    Rational bound = s / BigInt(static_cast<unsigned long>(N));
    bound.canonicalize();
    Rational dist;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        dist = abs(theta[i] - theta[j]);
        if (dist > Rational(1, 2)) dist = 1 - dist;
        if (dist <= bound) out.ordered_pairs += 2;
      }
    }
    return out;
  }
  std::vector<std::uint64_t> theta(N);
  for (std::size_t i = 0; i < N; ++i) theta[i] = detail::fixed_fraction(alpha, seq[i]).bits;
  const auto fw = detail::fixed_window(s, N);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      const std::uint64_t d = theta[i] - theta[j];
      const unsigned __int128 dist = std::min(d, static_cast<std::uint64_t>(0 - d));
      const bool in_outer = dist <= fw.outer;
      const bool in_inner = fw.has_inner && dist <= fw.inner;
      if (in_outer != in_inner) detail::undecidable_tie();
      if (in_outer) out.ordered_pairs += 2;
    }
  }
  return out;
}

/// R as (1/N) sum_{d != 0} rep_{A_N,A_N}(d) 1[||alpha d|| <= s/N], grouping
/// the differences exactly; cost scales with the number of distinct differences.
inline PairCount pair_correlation_via_reps(std::span<const BigInt> seq, const Alpha& alpha, std::size_t N,
                                           const Rational& s) {
  detail::check_pc_args(seq, N, s);
  const auto sorted = detail::sorted_distinct(seq.first(N), "pair_correlation_via_reps");
  PairCount out{0, N};
  if (alpha.is_rational()) {
    const BigInt& q = alpha.denominator();
    const BigInt w = detail::window(s, q, N);
    BigInt d, r, other;
    detail::for_each_positive_difference(sorted, [&](std::size_t hi, std::size_t lo, std::uint64_t count) {
      d = sorted[hi] - sorted[lo];
      mpz_fdiv_r(r.get_mpz_t(), d.get_mpz_t(), q.get_mpz_t());
      r *= alpha.numerator();
      mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t());
      other = q - r;
      if (r <= w || other <= w) out.ordered_pairs += 2 * count;
    });
    return out;
  }
  const auto fw = detail::fixed_window(s, N);
  detail::for_each_positive_difference(sorted, [&](std::size_t hi, std::size_t lo, std::uint64_t count) {
    const std::uint64_t bits = detail::fixed_fraction(alpha, BigInt(sorted[hi] - sorted[lo])).bits;
    const unsigned __int128 dist = std::min(bits, static_cast<std::uint64_t>(0 - bits));
    const bool in_outer = dist <= fw.outer;
    const bool in_inner = fw.has_inner && dist <= fw.inner;
    if (in_outer != in_inner) detail::undecidable_tie();
    if (in_outer) out.ordered_pairs += 2 * count;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rationals with denominators in [b_j, B_j] and their perturbations.

struct RegularSystemParams {
  GrowthFunction f = GrowthFunction::iterated_log(1);
  ThetaFunction theta = ThetaFunction::one_plus_log();

  /// B_j = 2^j / (f(2^j) sqrt(theta(2^j)))
  double upper(int j) const {
    const double x = std::ldexp(1.0, j);
    return x / (f(x) * std::sqrt(theta(x)));
  }
  /// b_j = (2/3) B_j
  double lower(int j) const { return 2.0 / 3.0 * upper(j); }
};

struct DenominatorRange {
  std::uint64_t q_min;
  std::uint64_t q_max;
};

inline DenominatorRange denominator_range(const RegularSystemParams& params, int j) {
  if (j < 1 || j > 120) throw precondition_error("regular-system level must lie in 1..120");
  const double b = params.lower(j), B = params.upper(j);
  const auto q_min = static_cast<std::uint64_t>(std::max(1.0, std::ceil(b)));
  const auto q_max = static_cast<std::uint64_t>(std::floor(B));
  if (q_min > q_max || q_max < 2) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "level %d has no admissible denominators: b_j = %.6g, B_j = %.6g", j, b, B);
    throw precondition_error(buf);
  }
  return {q_min, q_max};
}

/// Reduced p/q, 0 < p < q, q in [q_min, q_max], ordered by q then p.
inline std::vector<Alpha> rationals_with_denominators(DenominatorRange range, std::size_t limit) {
  std::vector<Alpha> out;
  for (std::uint64_t q = std::max<std::uint64_t>(range.q_min, 2); q <= range.q_max && out.size() < limit; ++q) {
    for (std::uint64_t p = 1; p < q && out.size() < limit; ++p) {
      if (std::gcd(p, q) == 1)
        out.push_back(Alpha::rational(BigInt(static_cast<unsigned long>(p)), BigInt(static_cast<unsigned long>(q))));
    }
  }
  return out;
}

inline std::vector<Alpha> exceptional_alpha_candidates(const RegularSystemParams& params, int j, std::size_t limit) {
  return rationals_with_denominators(denominator_range(params, j), limit);
}

/// Conservative rank of a height-q rational in the regular system: ceil(q^2 / (25 pi^2)).
inline std::uint64_t rank_proxy(const BigInt& q) {
  const double v = std::ceil(q.get_d() * q.get_d() / (25.0 * std::numbers::pi * std::numbers::pi));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(v));
}

struct PerturbedAlpha {
  Alpha alpha;
  Alpha candidate;
  Rational eta;
  std::uint64_t rank;
  Rational psi;  // psi(rank), exact value of the double evaluation
};

/// alpha = p/q + eta with eta = scale * psi(rank_proxy(q)), 0 <= scale <= 1.
inline PerturbedAlpha perturbed_alpha(const Alpha& candidate, const RegularSystemParams& params, const Rational& scale) {
  if (!candidate.is_rational()) throw precondition_error("perturbed_alpha needs a rational candidate");
  if (scale < 0 || scale > 1) throw precondition_error("perturbation scale must lie in [0,1]");
  const std::uint64_t rank = rank_proxy(candidate.denominator());
  const Rational psi_value = rational_from_double(psi(params.f, params.theta, rank));
  Rational eta = scale * psi_value;
  eta.canonicalize();
  return {Alpha::rational(candidate.value() + eta), candidate, eta, rank, psi_value};
}

/// Largest scale 2^-k (k >= 0) with eta * a_N <= s / (2N): every pair that
/// coincides modulo q stays within s/N after perturbation.
inline Rational targeted_scale(const Alpha& candidate, const RegularSystemParams& params,
                               std::span<const BigInt> seq, std::size_t N, const Rational& s) {
  if (s <= 0) throw precondition_error("targeted perturbation needs s > 0");
  if (N < 1 || N > seq.size()) throw precondition_error("targeted perturbation: N out of range");
  const Rational psi_value = rational_from_double(psi(params.f, params.theta, rank_proxy(candidate.denominator())));
  Rational need = psi_value * seq[N - 1] * BigInt(2 * static_cast<unsigned long>(N)) / s;
  need.canonicalize();
  BigInt ceil_need;
  mpz_cdiv_q(ceil_need.get_mpz_t(), need.get_num_mpz_t(), need.get_den_mpz_t());
  std::size_t k = ceil_need <= 1 ? 0 : bit_length(BigInt(ceil_need - 1));
  Rational scale(BigInt(1), pow2(k));
  scale.canonicalize();
  return scale;
}

// ---------------------------------------------------------------------------
// Divergence probe.

struct TrajectoryEntry {
  int level;
  std::size_t n;
  PairCount r;
  Rational s;
  double predicted;  // f(2^j)^(2 gamma - beta) theta(2^j)^(1/3); constant unspecified
  double ratio() const { return r.value() / predicted; }
};

struct Trajectory {
  std::vector<TrajectoryEntry> entries;
};

inline double predicted_lower_curve(const BlockParams& p, const ThetaFunction& theta, int j) {
  const double x = std::ldexp(1.0, j);
  return std::pow(p.f(x), 2 * p.gamma - p.beta) * std::cbrt(theta(x));
}

/// R([-s,s], alpha, T_j) at each requested block checkpoint.
inline Trajectory divergence_probe(const BlockSequence& seq, const Alpha& alpha, const Rational& s,
                                   std::span<const int> levels,
                                   const ThetaFunction& theta = ThetaFunction::one_plus_log()) {
  if (s <= 0) throw precondition_error("divergence probe needs s > 0");
  Trajectory t;
  std::size_t last = 0;
  for (int j : levels) {
    const std::size_t n = seq.checkpoint(j);
    if (n <= last) throw precondition_error("probe levels must give strictly increasing checkpoints");
    last = n;
    t.entries.push_back({j, n, pair_correlation(seq.elements(), alpha, n, s), s, predicted_lower_curve(seq.params(), theta, j)});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Seeded Monte Carlo over random rational alpha.

enum class RandomDenominator {
  dyadic64,  // k / 2^64, k odd
  prime64,   // k / (2^64 - 59), 0 < k < q
};

inline constexpr std::uint64_t kPrime64 = 18446744073709551557ULL;  // 2^64 - 59

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent per-trial seed derived from (seed, trial).
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trial) + 1));
}

inline Alpha random_alpha(std::mt19937_64& rng, RandomDenominator kind) {
  if (kind == RandomDenominator::dyadic64) {
    const std::uint64_t k = rng() | 1ULL;
    return Alpha::rational(BigInt(static_cast<unsigned long>(k)), pow2(64));
  }
  std::uint64_t k;
  do {
    k = rng();
  } while (k >= kPrime64 - 1);
  return Alpha::rational(BigInt(static_cast<unsigned long>(k + 1)), BigInt(static_cast<unsigned long>(kPrime64)));
}

struct MonteCarloConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::vector<std::size_t> schedule;
  std::vector<Rational> s_values;
  Rational delta{1, 10};
  RandomDenominator denominator = RandomDenominator::dyadic64;
};

struct MonteCarloRow {
  std::size_t trial;
  std::uint64_t trial_seed;
  std::size_t n;
  Rational s;
  PairCount r;
};

struct MonteCarloSummary {
  std::size_t n;
  Rational s;
  double mean_r;
  double fraction_above;  // share of trials with R > (1 + delta) 2s
};

struct MonteCarloResult {
  std::vector<Alpha> alphas;  // one per trial
  std::vector<MonteCarloRow> rows;  // trial-major, then schedule, then s
  std::vector<MonteCarloSummary> summary;
};

inline MonteCarloResult monte_carlo_ppc(std::span<const BigInt> seq, const MonteCarloConfig& cfg,
                                        std::size_t workers = worker_count()) {
  if (cfg.trials < 1) throw precondition_error("monte carlo needs trials >= 1");
  if (cfg.schedule.empty() || cfg.s_values.empty()) throw precondition_error("monte carlo needs a schedule and s values");
  for (auto n : cfg.schedule) detail::check_pc_args(seq, n, Rational(0));
  for (const auto& s : cfg.s_values)
    if (s < 0) throw precondition_error("s must be >= 0");

  const std::size_t per_trial = cfg.schedule.size() * cfg.s_values.size();
  MonteCarloResult out;
  out.rows.resize(cfg.trials * per_trial, MonteCarloRow{0, 0, 0, Rational(0), {}});
  out.alphas.resize(cfg.trials, Alpha::rational(Rational(0)));
  parallel_for(cfg.trials, [&](std::size_t trial) {
    const std::uint64_t ts = trial_seed(cfg.seed, trial);
    std::mt19937_64 rng(ts);
    const Alpha alpha = random_alpha(rng, cfg.denominator);
    out.alphas[trial] = alpha;
    std::size_t slot = trial * per_trial;
    for (auto n : cfg.schedule)
      for (const auto& s : cfg.s_values) out.rows[slot++] = {trial, ts, n, s, pair_correlation(seq, alpha, n, s)};
  }, workers);

  for (std::size_t k = 0; k < per_trial; ++k) {
    const auto& proto = out.rows[k];
    double sum = 0;
    std::size_t above = 0;
    const Rational limit = (1 + cfg.delta) * 2 * proto.s;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      const auto& row = out.rows[trial * per_trial + k];
      sum += row.r.value();
      if (row.r.exact() > limit) ++above;
    }
    out.summary.push_back({proto.n, proto.s, sum / static_cast<double>(cfg.trials),
                           static_cast<double>(above) / static_cast<double>(cfg.trials)});
  }
  return out;
}

}  // namespace ppclab
