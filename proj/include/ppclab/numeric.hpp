#pragma once

// Exact integer/rational vocabulary shared by every ppclab module, plus the
// error types the command line maps to exit codes.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppclab {

using BigInt = mpz_class;
using Rational = mpq_class;

static_assert(sizeof(unsigned long) == 8, "ppclab assumes an LP64 platform");

/// A caller violated an operation's documented precondition.
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixed-point evaluation could not certify a comparison or ran out of bits.
class precision_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

/// Malformed configuration or command-line input.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimated work exceeds the configured budget.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const BigInt& x) { return x.get_str(); }

inline std::string to_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

/// Number of bits in |x|; zero has bit length 0.
inline std::size_t bit_length(const BigInt& x) {
  if (sgn(x) == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

inline BigInt pow2(std::size_t e) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

inline bool fits_int64(const BigInt& x) { return x.fits_slong_p(); }

/// Non-negative residue of x modulo m (m > 0, m < 2^64).
inline std::uint64_t mod_u64(const BigInt& x, std::uint64_t m) {
  return mpz_fdiv_ui(x.get_mpz_t(), m);
}

/// Low 64 bits of a non-negative integer, i.e. x mod 2^64.
inline std::uint64_t low_u64(const BigInt& x) {
  return mpz_size(x.get_mpz_t()) == 0 ? 0 : mpz_getlimbn(x.get_mpz_t(), 0);
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline BigInt to_bigint(unsigned __int128 v) {
  BigInt hi = static_cast<unsigned long>(v >> 64);
  BigInt r = hi << 64;
  r += static_cast<unsigned long>(static_cast<std::uint64_t>(v));
  return r;
}

/// Exact conversion of a finite double.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw precondition_error("rational_from_double: non-finite value");
  Rational r(x);
  r.canonicalize();
  return r;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline BigInt parse_bigint(std::string_view text) {
  auto t = trim(text);
  std::string s(t);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty() || s == "-") throw config_error("expected an integer, got '" + std::string(text) + "'");
  for (std::size_t i = (s.front() == '-') ? 1 : 0; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw config_error("expected an integer, got '" + std::string(text) + "'");
  }
  return BigInt(s, 10);
}

/// Parses "p/q", an integer, or a plain decimal such as "-0.125"; the result is exact.
inline Rational parse_rational(std::string_view text) {
  auto t = trim(text);
  if (auto slash = t.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_bigint(t.substr(0, slash));
    BigInt den = parse_bigint(t.substr(slash + 1));
    if (sgn(den) == 0) throw config_error("zero denominator in '" + std::string(text) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  if (auto dot = t.find('.'); dot != std::string_view::npos) {
    std::string_view whole = t.substr(0, dot);
    std::string_view frac = t.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) throw config_error("expected a number, got '" + std::string(text) + "'");
    std::string digits = std::string(whole.empty() ? "0" : whole) + std::string(frac);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational r(parse_bigint(digits), scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_bigint(t));
}

/// Nearest double when numerator and denominator are exact doubles (IEEE
/// division rounds correctly); mpq_get_d, which truncates, otherwise.
inline double to_double(const Rational& x) {
  const BigInt limit = pow2(53);
  if (abs(x.get_num()) <= limit && x.get_den() <= limit) return x.get_num().get_d() / x.get_den().get_d();
  return x.get_d();
}

/// Floating value of a rational written as "p/q" or a decimal. Decimals go
/// through strtod so that printed %.17g values read back to the same double.
inline double parse_real(std::string_view text) {
  const Rational exact = parse_rational(text);
  const std::string t(trim(text));
  if (t.find('/') == std::string::npos) return std::strtod(t.c_str(), nullptr);
  return to_double(exact);
}

/// Hash over the limbs of an mpz value.
struct BigIntHash {
  std::size_t operator()(const BigInt& x) const noexcept {
    const mpz_srcptr z = x.get_mpz_t();
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(mpz_sgn(z) + 1);
    for (std::size_t i = 0; i < mpz_size(z); ++i) {
      h ^= mpz_getlimbn(z, i) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// 64-bit FNV-1a; used for config hashing.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Splits on a delimiter, trimming each piece; empty input yields no pieces.
inline std::vector<std::string> split(std::string_view text, char delim) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(delim, start);
    out.emplace_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace ppclab
