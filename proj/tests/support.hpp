#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <set>
#include <vector>

#include "ppclab/numeric.hpp"

namespace ppclab::test {

inline std::vector<BigInt> ints(std::initializer_list<long> values) {
  std::vector<BigInt> out;
  for (long v : values) out.emplace_back(v);
  return out;
}

inline Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

/// Sorted distinct integers drawn from [lo, hi].
inline std::vector<BigInt> random_set(std::mt19937_64& rng, std::size_t n, long lo, long hi) {
  std::uniform_int_distribution<long> pick(lo, hi);
  std::set<long> seen;
  while (seen.size() < n) seen.insert(pick(rng));
  std::vector<BigInt> out;
  for (long v : seen) out.emplace_back(v);
  return out;
}

/// Independent energy oracle: count quadruples through a sorted list of sums.
inline BigInt energy_by_sums(const std::vector<BigInt>& A) {
  std::vector<BigInt> sums;
  for (const auto& a : A)
    for (const auto& b : A) sums.push_back(a + b);
  std::sort(sums.begin(), sums.end());
  BigInt total = 0;
  for (std::size_t i = 0; i < sums.size();) {
    std::size_t j = i;
    while (j < sums.size() && sums[j] == sums[i]) ++j;
    total += BigInt(static_cast<unsigned long>((j - i) * (j - i)));
    i = j;
  }
  return total;
}

}  // namespace ppclab::test
