#pragma once

// Representation counts rep_{X,Y}(d) and the additive energy
// E(A) = #{(a,b,c,d) in A^4 : a + b = c + d} = sum_d rep_{A,A}(d)^2.
//
// Four independent routes to E(A):
//   additive_energy            sort positive differences by a 62-bit residue
//                              fingerprint, verify every fingerprint run exactly
//   additive_energy_streaming  k-way merge of the sorted difference rows, O(N) memory
//   additive_energy_dense      bucket counts of pair sums over a small value range
//   additive_energy_bruteforce literal quadruple count (oracle, #A <= 64)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppclab/block_sequence.hpp"
#include "ppclab/numeric.hpp"
#include "ppclab/parallel.hpp"

namespace ppclab {

namespace detail {

inline void require_distinct(std::span<const BigInt> values, const char* what) {
  std::vector<BigInt> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw precondition_error(std::string(what) + ": input contains duplicates");
}

inline std::vector<BigInt> sorted_distinct(std::span<const BigInt> values, const char* what) {
  std::vector<BigInt> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw precondition_error(std::string(what) + ": input contains duplicates");
  return sorted;
}

// 2^62 - 57 is prime and 2 has large multiplicative order modulo it, so
// shifted powers of two do not collide periodically.
inline constexpr std::uint64_t kFingerprintPrime = (std::uint64_t{1} << 62) - 57;

struct DiffEntry {
  std::uint64_t fingerprint;
  std::uint32_t hi;
  std::uint32_t lo;
};

/// Number of bytes the in-memory difference kernel needs for n values.
inline std::uint64_t difference_kernel_bytes(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2 * sizeof(DiffEntry); }

/// Visits every distinct positive difference of a strictly increasing list
/// once, as visit(hi, lo, multiplicity) with values[hi] - values[lo] the difference.
/// Equal fingerprints are never trusted: each run is checked in exact arithmetic
/// and split by value if it mixes differences.
template <class Visit>
void for_each_positive_difference(std::span<const BigInt> values, Visit&& visit) {
  const std::size_t n = values.size();
  if (n < 2) return;
  if (n > 0xffffffffULL) throw precondition_error("difference kernel supports at most 2^32 values");
  std::vector<std::uint64_t> residue(n);
  for (std::size_t i = 0; i < n; ++i) residue[i] = mod_u64(values[i], kFingerprintPrime);

  std::vector<DiffEntry> entries;
  entries.reserve(n * (n - 1) / 2);
  for (std::size_t hi = 1; hi < n; ++hi) {
    for (std::size_t lo = 0; lo < hi; ++lo) {
      std::uint64_t fp = residue[hi] >= residue[lo] ? residue[hi] - residue[lo]
                                                    : residue[hi] + (kFingerprintPrime - residue[lo]);
      entries.push_back({fp, static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(lo)});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const DiffEntry& a, const DiffEntry& b) {
    if (a.fingerprint != b.fingerprint) return a.fingerprint < b.fingerprint;
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.lo < b.lo;
  });

  BigInt head, other;
  std::size_t run_start = 0;
  while (run_start < entries.size()) {
    std::size_t run_end = run_start + 1;
    while (run_end < entries.size() && entries[run_end].fingerprint == entries[run_start].fingerprint) ++run_end;
    const DiffEntry& first = entries[run_start];
    if (run_end - run_start == 1) {
      visit(first.hi, first.lo, std::uint64_t{1});
    } else {
      mpz_sub(head.get_mpz_t(), values[first.hi].get_mpz_t(), values[first.lo].get_mpz_t());
      bool uniform = true;
      for (std::size_t k = run_start + 1; k < run_end && uniform; ++k) {
        mpz_sub(other.get_mpz_t(), values[entries[k].hi].get_mpz_t(), values[entries[k].lo].get_mpz_t());
        uniform = (mpz_cmp(head.get_mpz_t(), other.get_mpz_t()) == 0);
      }
      if (uniform) {
        visit(first.hi, first.lo, static_cast<std::uint64_t>(run_end - run_start));
      } else {
        std::vector<std::pair<BigInt, std::size_t>> exact;
        exact.reserve(run_end - run_start);
        for (std::size_t k = run_start; k < run_end; ++k)
          exact.emplace_back(values[entries[k].hi] - values[entries[k].lo], k);
        std::sort(exact.begin(), exact.end());
        for (std::size_t a = 0; a < exact.size();) {
          std::size_t b = a + 1;
          while (b < exact.size() && exact[b].first == exact[a].first) ++b;
          const DiffEntry& rep = entries[exact[a].second];
          visit(rep.hi, rep.lo, static_cast<std::uint64_t>(b - a));
          a = b;
        }
      }
    }
    run_start = run_end;
  }
}

inline BigInt energy_from_square_sum(std::size_t n, unsigned __int128 positive_square_sum) {
  return BigInt(static_cast<unsigned long>(n)) * static_cast<unsigned long>(n) + 2 * to_bigint(positive_square_sum);
}

}  // namespace detail

/// rep_{X,Y}(d) for all d, as a hashed map from difference to count.
class RepCounts {
 public:
  using Map = std::unordered_map<BigInt, std::uint64_t, BigIntHash>;

  RepCounts() = default;
  explicit RepCounts(Map counts) : counts_(std::move(counts)) {}

  std::uint64_t operator()(const BigInt& d) const {
    auto it = counts_.find(d);
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t distinct() const { return counts_.size(); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& [d, c] : counts_) t += c;
    return t;
  }
  /// Entries ordered by difference.
  std::vector<std::pair<BigInt, std::uint64_t>> sorted() const {
    std::vector<std::pair<BigInt, std::uint64_t>> out(counts_.begin(), counts_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }
  const Map& map() const { return counts_; }

 private:
  Map counts_;
};

inline RepCounts rep_counts(std::span<const BigInt> X, std::span<const BigInt> Y) {
  detail::require_distinct(X, "rep_counts");
  detail::require_distinct(Y, "rep_counts");
  RepCounts::Map counts;
  counts.reserve(X.size() * Y.size());
  BigInt d;
  for (const auto& x : X) {
    for (const auto& y : Y) {
      mpz_sub(d.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      ++counts[d];
    }
  }
  return RepCounts(std::move(counts));
}

inline BigInt additive_energy(std::span<const BigInt> A) {
  const auto sorted = detail::sorted_distinct(A, "additive_energy");
  unsigned __int128 squares = 0;
  detail::for_each_positive_difference(sorted, [&](std::size_t, std::size_t, std::uint64_t count) {
    squares += static_cast<unsigned __int128>(count) * count;
  });
  return detail::energy_from_square_sum(sorted.size(), squares);
}

/// Same value as additive_energy with O(#A) memory: every row
/// a_hi - a_{hi-1} < a_hi - a_{hi-2} < ... is merged through a heap.
inline BigInt additive_energy_streaming(std::span<const BigInt> A) {
  const auto v = detail::sorted_distinct(A, "additive_energy_streaming");
  const std::size_t n = v.size();
  struct Node {
    BigInt diff;
    std::size_t hi;
    std::size_t lo;
  };
  auto greater = [](const Node& a, const Node& b) { return a.diff > b.diff; };
  std::priority_queue<Node, std::vector<Node>, decltype(greater)> heap(greater);
  for (std::size_t hi = 1; hi < n; ++hi) heap.push({v[hi] - v[hi - 1], hi, hi - 1});

  unsigned __int128 squares = 0;
  BigInt current;
  std::uint64_t run = 0;
  while (!heap.empty()) {
    Node node = heap.top();
    heap.pop();
    if (run > 0 && node.diff == current) {
      ++run;
    } else {
      squares += static_cast<unsigned __int128>(run) * run;
      current = node.diff;
      run = 1;
    }
    if (node.lo > 0) {
      --node.lo;
      node.diff = v[node.hi] - v[node.lo];
      heap.push(std::move(node));
    }
  }
  squares += static_cast<unsigned __int128>(run) * run;
  return detail::energy_from_square_sum(n, squares);
}

/// Dense pair-sum buckets; intended for polynomially growing sequences whose
/// value range (max - min) stays below max_range.
inline BigInt additive_energy_dense(std::span<const BigInt> A, std::uint64_t max_range = std::uint64_t{1} << 26) {
  const auto v = detail::sorted_distinct(A, "additive_energy_dense");
  if (v.empty()) return BigInt(0);
  const BigInt span_big = v.back() - v.front();
  if (!span_big.fits_ulong_p() || span_big.get_ui() > max_range)
    throw precondition_error("additive_energy_dense: value range too large for dense buckets");
  std::vector<std::uint64_t> offset(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) offset[i] = BigInt(v[i] - v.front()).get_ui();
  std::vector<std::uint64_t> sums(2 * span_big.get_ui() + 1, 0);
  for (auto a : offset)
    for (auto b : offset) ++sums[a + b];
  unsigned __int128 total = 0;
  for (auto r : sums) total += static_cast<unsigned __int128>(r) * r;
  return to_bigint(total);
}

inline constexpr std::size_t kBruteForceCap = 64;

/// Literal count of ordered quadruples (a,b,c,d) with a + b = c + d.
inline BigInt additive_energy_bruteforce(std::span<const BigInt> A) {
  if (A.size() > kBruteForceCap)
    throw precondition_error("additive_energy_bruteforce: at most " + std::to_string(kBruteForceCap) + " elements");
  detail::require_distinct(A, "additive_energy_bruteforce");
  const std::size_t n = A.size();
  std::uint64_t count = 0;
  const bool small = std::all_of(A.begin(), A.end(), [](const BigInt& x) {
    return x.fits_slong_p() && x.get_si() > -(1L << 61) && x.get_si() < (1L << 61);
  });
  if (small) {
    std::vector<std::int64_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = A[i].get_si();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) count += (a[i] + a[j] == a[k] + a[l]);
  } else {
    std::vector<BigInt> sum(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum[i * n + j] = A[i] + A[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) count += (sum[i * n + j] == sum[k * n + l]);
  }
  return BigInt(static_cast<unsigned long>(count));
}

struct EnergyReport {
  int level = 0;
  std::size_t n = 0;
  BigInt energy;
  double f_n = 0;
  double normalized = 0;          // E * f(N)^{3(beta-gamma)} / N^3
  bool arithmetic_block_empty = false;  // flagged checkpoints are excluded from min/max
};

struct EnergyScaling {
  std::vector<EnergyReport> reports;
  double min_normalized = 0;
  double max_normalized = 0;
  double spread() const { return min_normalized > 0 ? max_normalized / min_normalized : 0; }
};

inline EnergyReport energy_report(const BlockSequence& seq, int level) {
  EnergyReport r;
  r.level = level;
  r.n = seq.checkpoint(level);
  r.arithmetic_block_empty = seq.block(level, BlockKind::arithmetic).length == 0;
  r.energy = additive_energy(seq.elements().first(r.n));
  const auto& p = seq.params();
  r.f_n = p.f(static_cast<double>(r.n));
  const double n = static_cast<double>(r.n);
  r.normalized = r.energy.get_d() * std::pow(r.f_n, 3.0 * (p.beta - p.gamma)) / (n * n * n);
  return r;
}

/// Energy at the checkpoints N = T_j of the requested levels, computed
/// concurrently and reported in the order given.
inline EnergyScaling energy_scaling(const BlockSequence& seq, std::span<const int> levels,
                                    std::size_t workers = worker_count()) {
  EnergyScaling out;
  out.reports.resize(levels.size());
  for (int j : levels) (void)seq.checkpoint(j);
  parallel_for(levels.size(), [&](std::size_t i) { out.reports[i] = energy_report(seq, levels[i]); }, workers);
  bool any = false;
  for (const auto& r : out.reports) {
    if (r.arithmetic_block_empty) continue;
    if (!any) {
      out.min_normalized = out.max_normalized = r.normalized;
      any = true;
    } else {
      out.min_normalized = std::min(out.min_normalized, r.normalized);
      out.max_normalized = std::max(out.max_normalized, r.normalized);
    }
  }
  return out;
}

}  // namespace ppclab
