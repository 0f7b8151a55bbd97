#pragma once

// Block sequences interleaving arithmetic runs P_A^(j) with shifted geometric
// runs P_G^(j), the classic comparison sequences, truncation, and the
// decimal sequence-file format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ppclab/growth.hpp"
#include "ppclab/numeric.hpp"

namespace ppclab {

struct BlockParams {
  GrowthFunction f = GrowthFunction::iterated_log(1);
  double beta = 2.0 / 3.0;
  double gamma = 1.0 / 3.0;
  int jmax = 1;
};

enum class BlockKind { arithmetic, geometric };

struct Block {
  int level;
  BlockKind kind;
  std::size_t start;   // index of the first element in the sequence
  std::size_t length;  // may be zero for small levels
};

/// #P_A^(j) = floor(2^j f(2^j)^-beta); evaluated in long double.
inline std::size_t arithmetic_block_length(const GrowthFunction& f, double beta, int j) {
  const long double x = std::ldexp(1.0L, j);
  const long double fx = f(static_cast<double>(x));
  return static_cast<std::size_t>(std::floor(x * std::pow(fx, -static_cast<long double>(beta))));
}

/// #P_G^(j) = floor(f(2^j)^-gamma 2^j (1 - f(2^j)^(gamma-beta))).
inline std::size_t geometric_block_length(const GrowthFunction& f, double beta, double gamma, int j) {
  const long double x = std::ldexp(1.0L, j);
  const long double fx = f(static_cast<double>(x));
  const long double g = gamma, b = beta;
  const long double v = std::pow(fx, -g) * x * (1.0L - std::pow(fx, g - b));
  return v <= 0 ? 0 : static_cast<std::size_t>(std::floor(v));
}

/// Rough storage for levels 1..jmax (limb bytes plus per-element overhead),
/// computed from the block lengths alone so oversized requests fail fast.
inline long double estimated_block_bytes(const GrowthFunction& f, double beta, double gamma, int jmax) {
  long double bytes = 2 * 32.0L, bits = 2;
  for (int j = 2; j <= jmax; ++j) {
    const long double la = arithmetic_block_length(f, beta, j);
    const long double lg = geometric_block_length(f, beta, gamma, j);
    const long double base_bits = bits + 1;
    bytes += la * (32 + base_bits / 8) + lg * (32 + (std::max(base_bits + 1, lg + 1)) / 8);
    bits = std::max(base_bits + 1, lg + 1) + 1;
  }
  return bytes;
}

inline constexpr long double kMaxBlockBytes = 2.0L * (1ULL << 30);

class BlockSequence {
 public:
  const BlockParams& params() const { return params_; }
  std::span<const BigInt> elements() const { return elements_; }
  std::span<const Block> blocks() const { return blocks_; }
  std::size_t size() const { return elements_.size(); }
  int levels() const { return static_cast<int>(checkpoints_.size()); }

  /// T_j: number of elements through level j (1-based).
  std::size_t checkpoint(int j) const {
    if (j < 1 || j > levels()) throw precondition_error("checkpoint level " + std::to_string(j) + " outside built range");
    return checkpoints_[static_cast<std::size_t>(j - 1)];
  }

  const Block& block(int j, BlockKind kind) const {
    for (const auto& b : blocks_)
      if (b.level == j && b.kind == kind) return b;
    throw precondition_error("no block at level " + std::to_string(j));
  }

  /// C_j, the first value of P_A^(j) (j >= 2).
  const BigInt& block_base(int j) const {
    if (j < 2 || j > levels()) throw precondition_error("block base defined for levels 2..jmax");
    return bases_[static_cast<std::size_t>(j - 2)];
  }

 private:
  friend BlockSequence build_blocks(const GrowthFunction&, double, double, int);
  BlockParams params_;
  std::vector<BigInt> elements_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> checkpoints_;
  std::vector<BigInt> bases_;
};

/// Builds levels 1..jmax. Level 1 is P_A = {} and P_G = {1, 2}; level j >= 2 is
/// P_A = [C_j, C_j + #P_A) followed by P_G = {2 C_j + 2^i : 1 <= i <= #P_G},
/// where C_j is twice the largest element built so far.
inline BlockSequence build_blocks(const GrowthFunction& f, double beta, double gamma, int jmax) {
  if (!(0 < gamma && gamma < beta && beta < 0.75))
    throw precondition_error("block parameters need 0 < gamma < beta < 3/4");
  if (jmax < 1) throw precondition_error("jmax must be >= 1");
  if (jmax > 62) throw precondition_error("jmax above 62 is out of range for block indices");
  if (const long double need = estimated_block_bytes(f, beta, gamma, jmax); need > kMaxBlockBytes) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "block sequence with jmax = %d needs about %.3Lg bytes, above the %.3Lg byte cap",
                  jmax, need, kMaxBlockBytes);
    throw budget_error(buf);
  }

  BlockSequence seq;
  seq.params_ = BlockParams{f, beta, gamma, jmax};
  auto& el = seq.elements_;
  el.emplace_back(1);
  el.emplace_back(2);
  seq.blocks_.push_back({1, BlockKind::arithmetic, 0, 0});
  seq.blocks_.push_back({1, BlockKind::geometric, 0, 2});
  seq.checkpoints_.push_back(2);

  for (int j = 2; j <= jmax; ++j) {
    const std::size_t la = arithmetic_block_length(f, beta, j);
    const std::size_t lg = geometric_block_length(f, beta, gamma, j);
    const BigInt base = 2 * el.back();
    seq.bases_.push_back(base);

    seq.blocks_.push_back({j, BlockKind::arithmetic, el.size(), la});
    for (std::size_t k = 0; k < la; ++k) el.push_back(base + static_cast<unsigned long>(k));

    const BigInt shift = 2 * base;
    if (lg > 0 && !el.empty() && shift + 2 <= el.back())
      throw precondition_error("level " + std::to_string(j) + ": geometric block would not exceed arithmetic block");
    seq.blocks_.push_back({j, BlockKind::geometric, el.size(), lg});
    BigInt power(1);
    for (std::size_t i = 1; i <= lg; ++i) {
      power <<= 1;
      el.push_back(shift + power);
    }
    seq.checkpoints_.push_back(el.size());
  }
  for (std::size_t i = 1; i < el.size(); ++i)
    if (!(el[i - 1] < el[i])) throw precondition_error("block construction lost strict monotonicity");
  return seq;
}

enum class ClassicFamily { identity, power, primes, lacunary };

struct ClassicSequence {
  ClassicFamily family;
  unsigned parameter;  // d for power, q for lacunary
  std::vector<BigInt> elements;
};

namespace detail {

inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::size_t limit = 16;
  if (count >= 6) {
    const double n = static_cast<double>(count);
    limit = static_cast<std::size_t>(n * (std::log(n) + std::log(std::log(n)))) + 16;
  }
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  primes.reserve(count);
  for (std::size_t i = 2; i <= limit && primes.size() < count; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::size_t m = i * i; m <= limit; m += i) composite[m] = true;
  }
  return primes;
}

}  // namespace detail

inline ClassicSequence classic(ClassicFamily family, std::size_t count, unsigned parameter = 0) {
  if (count < 1) throw precondition_error("classic: count must be >= 1");
  ClassicSequence seq{family, parameter, {}};
  seq.elements.reserve(count);
  switch (family) {
    case ClassicFamily::identity:
      for (std::size_t n = 1; n <= count; ++n) seq.elements.emplace_back(static_cast<unsigned long>(n));
      break;
    case ClassicFamily::power:
      if (parameter < 2) throw precondition_error("classic power: d must be >= 2");
      for (std::size_t n = 1; n <= count; ++n) {
        BigInt v;
        mpz_ui_pow_ui(v.get_mpz_t(), n, parameter);
        seq.elements.push_back(std::move(v));
      }
      break;
    case ClassicFamily::primes:
      for (auto p : detail::first_primes(count)) seq.elements.emplace_back(static_cast<unsigned long>(p));
      break;
    case ClassicFamily::lacunary: {
      if (parameter < 2) throw precondition_error("classic lacunary: q must be >= 2");
      BigInt v(1);
      for (std::size_t n = 1; n <= count; ++n) {
        v *= parameter;
        seq.elements.push_back(v);
      }
      break;
    }
  }
  return seq;
}

/// A_N: the first N elements.
inline std::vector<BigInt> truncate(std::span<const BigInt> seq, std::size_t N) {
  if (N < 1 || N > seq.size())
    throw precondition_error("truncation length " + std::to_string(N) + " outside 1.." + std::to_string(seq.size()));
  return {seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(N)};
}

inline std::vector<BigInt> truncate(const BlockSequence& seq, std::size_t N) { return truncate(seq.elements(), N); }
inline std::vector<BigInt> truncate(const ClassicSequence& seq, std::size_t N) { return truncate(seq.elements, N); }

/// Bit length of a_N.
inline std::size_t max_element_bits(std::span<const BigInt> seq, std::size_t N) {
  if (N < 1 || N > seq.size()) throw precondition_error("max_element_bits: N out of range");
  return bit_length(seq[N - 1]);
}

// ---------------------------------------------------------------------------
// Sequence descriptors and files.

/// What generated a sequence; serialized as the "# ppclab:" header line.
struct SequenceSpec {
  std::string family = "blocks";  // blocks | identity | power | primes | lacunary
  BlockParams blocks;
  unsigned parameter = 0;
  std::size_t count = 0;

  bool is_blocks() const { return family == "blocks"; }

  std::string header() const {
    char buf[160];
    if (is_blocks()) {
      std::snprintf(buf, sizeof buf, "# ppclab: family=blocks; f=%s; beta=%.17g; gamma=%.17g; jmax=%d",
                    blocks.f.spec().c_str(), blocks.beta, blocks.gamma, blocks.jmax);
    } else {
      std::snprintf(buf, sizeof buf, "# ppclab: family=%s; param=%u; count=%zu", family.c_str(), parameter, count);
    }
    return buf;
  }

  static std::optional<SequenceSpec> from_header(std::string_view line) {
    constexpr std::string_view tag = "# ppclab:";
    if (line.substr(0, tag.size()) != tag) return std::nullopt;
    std::map<std::string, std::string> kv;
    for (const auto& part : split(line.substr(tag.size()), ';')) {
      auto eq = part.find('=');
      if (eq == std::string::npos) throw config_error("malformed sequence header field '" + part + "'");
      kv[std::string(trim(part.substr(0, eq)))] = std::string(trim(part.substr(eq + 1)));
    }
    SequenceSpec spec;
    spec.family = kv["family"];
    try {
      if (spec.is_blocks()) {
        spec.blocks.f = parse_growth(kv.at("f"));
        spec.blocks.beta = parse_real(kv.at("beta"));
        spec.blocks.gamma = parse_real(kv.at("gamma"));
        spec.blocks.jmax = std::stoi(kv.at("jmax"));
      } else {
        spec.parameter = static_cast<unsigned>(std::stoul(kv.at("param")));
        spec.count = std::stoul(kv.at("count"));
      }
    } catch (const std::out_of_range&) {
      throw config_error("sequence header is missing a field: " + std::string(line));
    }
    return spec;
  }
};

inline ClassicFamily parse_classic_family(const std::string& name) {
  if (name == "identity") return ClassicFamily::identity;
  if (name == "power") return ClassicFamily::power;
  if (name == "primes") return ClassicFamily::primes;
  if (name == "lacunary") return ClassicFamily::lacunary;
  throw config_error("unknown sequence family '" + name + "'");
}

/// Materialized sequence plus, for block sequences, the block structure.
struct LoadedSequence {
  std::optional<SequenceSpec> spec;
  std::vector<BigInt> elements;
  std::optional<BlockSequence> blocks;
};

inline LoadedSequence generate(const SequenceSpec& spec) {
  LoadedSequence out;
  out.spec = spec;
  if (spec.is_blocks()) {
    out.blocks = build_blocks(spec.blocks.f, spec.blocks.beta, spec.blocks.gamma, spec.blocks.jmax);
    out.elements.assign(out.blocks->elements().begin(), out.blocks->elements().end());
  } else {
    out.elements = classic(parse_classic_family(spec.family), spec.count, spec.parameter).elements;
  }
  return out;
}

inline void write_sequence(std::ostream& os, std::span<const BigInt> elements, const std::optional<SequenceSpec>& spec) {
  if (spec) os << spec->header() << '\n';
  for (const auto& x : elements) os << x.get_str() << '\n';
}

/// Reads decimal integers, one per line. A "# ppclab:" header for a block
/// sequence is honoured by rebuilding the blocks and checking they match.
inline LoadedSequence read_sequence(std::istream& is) {
  LoadedSequence out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (!out.spec) out.spec = SequenceSpec::from_header(t);
      continue;
    }
    BigInt v;
    try {
      v = parse_bigint(t);
    } catch (const config_error&) {
      throw config_error("sequence line " + std::to_string(lineno) + ": not an integer");
    }
    if (!out.elements.empty() && !(out.elements.back() < v))
      throw config_error("sequence line " + std::to_string(lineno) + ": values must be strictly increasing");
    out.elements.push_back(std::move(v));
  }
  if (out.spec && out.spec->is_blocks()) {
    const auto& p = out.spec->blocks;
    out.blocks = build_blocks(p.f, p.beta, p.gamma, p.jmax);
    auto rebuilt = out.blocks->elements();
    if (!std::equal(rebuilt.begin(), rebuilt.end(), out.elements.begin(), out.elements.end()))
      throw config_error("sequence file does not match its block header");
  }
  return out;
}

}  // namespace ppclab
