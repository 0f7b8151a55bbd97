#pragma once

// Exact finite unions of closed rational intervals inside [0,1]: Bohr sets,
// Lebesgue measure, and the small-denominator / Erdos-Renyi quantities built
// from them. No floating point anywhere in this header.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppclab/numeric.hpp"

namespace ppclab {

/// Closed interval [lo, hi] with 0 <= lo <= hi <= 1.
class Interval {
 public:
  Interval(Rational lo, Rational hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    lo_.canonicalize();
    hi_.canonicalize();
    if (lo_ < 0 || hi_ > 1 || lo_ > hi_)
      throw precondition_error("interval [" + to_string(lo_) + ", " + to_string(hi_) + "] is not inside [0,1]");
  }

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  Rational length() const { return hi_ - lo_; }
  bool degenerate() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

 private:
  Rational lo_;
  Rational hi_;
};

/// Sorted, pairwise disjoint, non-touching, positive-length intervals.
///
/// Zero-length components are dropped during normalization so that equal sets
/// compare equal; they never carry measure.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet unit() { return IntervalSet({Interval(Rational(0), Rational(1))}); }

  explicit IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) { normalize(); }

  std::span<const Interval> intervals() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }

  Rational measure() const {
    Rational total(0);
    for (const auto& iv : parts_) total += iv.length();
    return total;
  }

  bool contains(const Rational& x) const {
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](const Rational& v, const Interval& iv) { return v < iv.lo(); });
    return it != parts_.begin() && std::prev(it)->contains(x);
  }

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.parts_ == b.parts_; }

 private:
  void normalize() {
    std::erase_if(parts_, [](const Interval& iv) { return iv.degenerate(); });
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) { return a.lo() < b.lo(); });
    std::vector<Interval> merged;
    merged.reserve(parts_.size());
    for (auto& iv : parts_) {
      if (!merged.empty() && iv.lo() <= merged.back().hi()) {
        if (iv.hi() > merged.back().hi()) merged.back() = Interval(merged.back().lo(), iv.hi());
      } else {
        merged.push_back(std::move(iv));
      }
    }
    parts_ = std::move(merged);
  }

  std::vector<Interval> parts_;
};

inline Rational measure(const IntervalSet& a) { return a.measure(); }

inline IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> parts(a.intervals().begin(), a.intervals().end());
  parts.insert(parts.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet(std::move(parts));
}

inline IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  auto x = a.intervals();
  auto y = b.intervals();
  std::size_t i = 0, k = 0;
  while (i < x.size() && k < y.size()) {
    const Rational& lo = std::max(x[i].lo(), y[k].lo());
    const Rational& hi = std::min(x[i].hi(), y[k].hi());
    if (lo < hi) out.emplace_back(lo, hi);
    if (x[i].hi() < y[k].hi()) {
      ++i;
    } else {
      ++k;
    }
  }
  return IntervalSet(std::move(out));
}

/// Closure of [0,1] minus a; complement(complement(a)) == a.
inline IntervalSet complement(const IntervalSet& a) {
  std::vector<Interval> out;
  Rational cursor(0);
  for (const auto& iv : a.intervals()) {
    if (cursor < iv.lo()) out.emplace_back(cursor, iv.lo());
    cursor = iv.hi();
  }
  if (cursor < 1) out.emplace_back(cursor, Rational(1));
  return IntervalSet(std::move(out));
}

/// B(d, delta) = { alpha in [0,1] : ||d alpha|| <= delta }.
inline IntervalSet bohr_set(std::int64_t d, const Rational& delta) {
  if (d == 0) throw precondition_error("bohr_set: d must be nonzero");
  if (delta < 0 || delta > Rational(1, 2))
    throw precondition_error("bohr_set: delta must lie in [0, 1/2], got " + to_string(delta));
  const std::uint64_t n = d < 0 ? -static_cast<std::uint64_t>(d) : static_cast<std::uint64_t>(d);
  const BigInt big_n = static_cast<unsigned long>(n);
  Rational radius = delta / big_n;
  radius.canonicalize();
  std::vector<Interval> parts;
  parts.reserve(n + 1);
  for (std::uint64_t k = 0; k <= n; ++k) {
    Rational centre(BigInt(static_cast<unsigned long>(k)), big_n);
    centre.canonicalize();
    Rational lo = centre - radius;
    Rational hi = centre + radius;
    if (lo < 0) lo = 0;
    if (hi > 1) hi = 1;
    parts.emplace_back(std::move(lo), std::move(hi));
  }
  return IntervalSet(std::move(parts));
}

/// Closed form of the set { alpha : min over nonzero d in B-B of ||d alpha|| < eps / #(B-B) }.
/// The strict inequality is realized as a closed Bohr set; measure is unaffected.
inline IntervalSet small_denominator_set(std::span<const std::int64_t> B, const Rational& epsilon) {
  std::set<std::int64_t> elems(B.begin(), B.end());
  if (elems.size() < 2) throw precondition_error("small_denominator_set: B needs at least two distinct elements");
  if (epsilon <= 0 || epsilon >= 1) throw precondition_error("small_denominator_set: epsilon must lie in (0,1)");
  std::set<std::int64_t> diffs;
  for (auto x : elems)
    for (auto y : elems) diffs.insert(x - y);
  Rational radius = epsilon / BigInt(static_cast<unsigned long>(diffs.size()));
  radius.canonicalize();
  std::vector<Interval> parts;
  for (auto d : diffs) {
    if (d <= 0) continue;  // B(-d) == B(d)
    auto piece = bohr_set(d, radius);
    parts.insert(parts.end(), piece.intervals().begin(), piece.intervals().end());
  }
  return IntervalSet(std::move(parts));
}

/// (sum_n lambda(A_n))^2 / sum_{m,n} lambda(A_n cap A_m), evaluated exactly.
inline Rational borel_cantelli_ratio(std::span<const IntervalSet> sets) {
  if (sets.empty()) throw precondition_error("borel_cantelli_ratio: empty list");
  Rational total(0);
  for (const auto& s : sets) total += s.measure();
  if (total == 0) throw precondition_error("borel_cantelli_ratio: all sets have measure zero");
  Rational pair_sum(0);
  for (std::size_t m = 0; m < sets.size(); ++m) {
    pair_sum += sets[m].measure();
    for (std::size_t n = m + 1; n < sets.size(); ++n) pair_sum += 2 * intersect(sets[m], sets[n]).measure();
  }
  Rational ratio = total * total / pair_sum;
  ratio.canonicalize();
  return ratio;
}

// Text form: one "lo hi" line per interval, endpoints as num/den; '#' starts a comment line.

inline void write_interval_set(std::ostream& os, const IntervalSet& a) {
  for (const auto& iv : a.intervals()) os << to_string(iv.lo()) << ' ' << to_string(iv.hi()) << '\n';
}

inline std::string to_text(const IntervalSet& a) {
  std::ostringstream os;
  write_interval_set(os, a);
  return os.str();
}

inline IntervalSet read_interval_set(std::istream& is) {
  std::vector<Interval> parts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    std::string lo, hi, extra;
    if (!(fields >> lo >> hi) || (fields >> extra))
      throw config_error("interval set line " + std::to_string(lineno) + ": expected 'lo hi'");
    try {
      parts.emplace_back(parse_rational(lo), parse_rational(hi));
    } catch (const precondition_error& e) {
      throw config_error("interval set line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return IntervalSet(std::move(parts));
}

}  // namespace ppclab
