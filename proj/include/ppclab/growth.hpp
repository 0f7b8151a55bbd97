#pragma once

// Preset growth functions f (iterated-logarithm products and small powers),
// the auxiliary theta functions, and the derived quantities psi, the
// 1/(n f(n)) partial sums, lower order of infinity and predicted dimension.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <regex>
#include <string>
#include <string_view>

#include "ppclab/numeric.hpp"

namespace ppclab {

enum class GrowthFamily { iterated_log, iterated_log_eps, power };

class GrowthFunction {
 public:
  static constexpr double kClampMargin = 2.05;
  static constexpr int kMaxDepth = 3;

  /// f(x) = log(x) log_2(x) ... log_r(x)
  static GrowthFunction iterated_log(int r) { return GrowthFunction(GrowthFamily::iterated_log, r, 0.0); }

  /// f(x) = log(x) ... log_r(x) * log_r(x)^eps
  static GrowthFunction iterated_log_eps(int r, double eps) {
    if (!(eps > 0)) throw precondition_error("ilog_eps: eps must be positive");
    return GrowthFunction(GrowthFamily::iterated_log_eps, r, eps);
  }

  /// f(x) = x^a with 0 < a <= 1/3
  static GrowthFunction power(double a) {
    if (!(a > 0) || a > 1.0 / 3.0 + 1e-15) throw precondition_error("pow(a): a must lie in (0, 1/3]");
    return GrowthFunction(GrowthFamily::power, 0, a);
  }

  GrowthFamily family() const { return family_; }
  int depth() const { return depth_; }
  double parameter() const { return param_; }
  double x_min() const { return x_min_; }

  /// Clamped evaluation: f(x) for x >= x_min, f(x_min) below.
  double operator()(double x) const { return std::exp(log_unclamped(std::log(std::max(x, x_min_)))); }

  /// log f(x) given log x, without forming x; only meaningful for x >= x_min.
  double log_at_log(double log_x) const { return log_unclamped(std::max(log_x, std::log(x_min_))); }

  double analytic_lower_order() const { return family_ == GrowthFamily::power ? param_ : 0.0; }

  std::string spec() const {
    char buf[64];
    switch (family_) {
      case GrowthFamily::iterated_log:
        std::snprintf(buf, sizeof buf, "ilog(%d)", depth_);
        break;
      case GrowthFamily::iterated_log_eps:
        std::snprintf(buf, sizeof buf, "ilog_eps(%d, %.17g)", depth_, param_);
        break;
      case GrowthFamily::power:
        std::snprintf(buf, sizeof buf, "pow(%.17g)", param_);
        break;
    }
    return buf;
  }

 private:
  GrowthFunction(GrowthFamily family, int depth, double param) : family_(family), depth_(depth), param_(param) {
    if (family != GrowthFamily::power && (depth < 1 || depth > kMaxDepth))
      throw precondition_error("iterated logarithm depth must lie in 1.." + std::to_string(kMaxDepth));
    x_min_ = find_x_min();
  }

  // NaN when some iterated logarithm is not positive.
  double log_unclamped(double log_x) const {
    if (family_ == GrowthFamily::power) return param_ * log_x;
    double level = log_x;  // log_1(x)
    double sum = 0.0;
    for (int k = 1; k <= depth_; ++k) {
      if (!(level > 0)) return std::numeric_limits<double>::quiet_NaN();
      sum += std::log(level);
      if (k < depth_) level = std::log(level);
    }
    if (family_ == GrowthFamily::iterated_log_eps) sum += param_ * std::log(level);
    return sum;
  }

  // Smallest dyadic x = 2^k with f(x) > kClampMargin.
  double find_x_min() const {
    const double threshold = std::log(kClampMargin);
    for (int k = 0; k < 1000; ++k) {
      double v = log_unclamped(k * std::log(2.0));
      if (v > threshold) return std::ldexp(1.0, k);
    }
    throw precondition_error("growth function never exceeds the clamp margin");
  }

  GrowthFamily family_;
  int depth_;
  double param_;
  double x_min_ = 1.0;
};

enum class ThetaFamily { one_plus_log, power };

/// Slowly increasing companion theta(x) for the approximation function psi.
class ThetaFunction {
 public:
  static ThetaFunction one_plus_log() { return ThetaFunction(ThetaFamily::one_plus_log, 0.0); }

  static ThetaFunction power(double b) {
    if (!(b > 0) || b > 0.25 + 1e-15) throw precondition_error("theta pow(b): b must lie in (0, 1/4]");
    return ThetaFunction(ThetaFamily::power, b);
  }

  ThetaFamily family() const { return family_; }
  double parameter() const { return param_; }

  double operator()(double x) const {
    x = std::max(x, 1.0);
    return family_ == ThetaFamily::one_plus_log ? 1.0 + std::log(x) : std::pow(x, param_);
  }

  std::string spec() const {
    if (family_ == ThetaFamily::one_plus_log) return "one_plus_log";
    char buf[48];
    std::snprintf(buf, sizeof buf, "pow(%.17g)", param_);
    return buf;
  }

 private:
  ThetaFunction(ThetaFamily family, double param) : family_(family), param_(param) {}
  ThetaFamily family_;
  double param_;
};

inline double eval_f(const GrowthFunction& f, double x) {
  if (!(x > 0)) throw precondition_error("eval_f: x must be positive");
  return f(x);
}

/// psi(n) = 1 / (n f(n) theta(n))
inline double psi(const GrowthFunction& f, const ThetaFunction& theta, std::uint64_t n) {
  if (n == 0) throw precondition_error("psi: n must be >= 1");
  const double x = static_cast<double>(n);
  return 1.0 / (x * f(x) * theta(x));
}

/// sum_{n <= N} 1 / (n f(n)), compensated summation.
inline double series_partial_sum(const GrowthFunction& f, std::uint64_t N) {
  if (N == 0) throw precondition_error("series_partial_sum: N must be >= 1");
  double sum = 0.0, carry = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    const double x = static_cast<double>(n);
    const double term = 1.0 / (x * f(x)) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  return sum;
}

struct LowerOrder {
  double analytic;
  double numerical;
};

/// liminf log f(x) / log x. The numerical estimate takes the minimum over the
/// grid x = 2^(2^m), m = 10..40, evaluated in log space.
inline LowerOrder lower_order(const GrowthFunction& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 10; m <= 40; ++m) {
    const double log_x = std::ldexp(1.0, m) * std::log(2.0);
    best = std::min(best, f.log_at_log(log_x) / log_x);
  }
  return {f.analytic_lower_order(), best};
}

/// (1 + lambda)^-1 with lambda the analytic lower order.
inline double predicted_hausdorff_dim(const GrowthFunction& f) { return 1.0 / (1.0 + lower_order(f).analytic); }

/// Accepts "ilog(r)", "ilog_eps(r, eps)", "pow(a)"; numbers may be written p/q.
inline GrowthFunction parse_growth(std::string_view text) {
  static const std::regex ilog(R"(\s*ilog\s*\(\s*(\d+)\s*\)\s*)");
  static const std::regex ilog_eps(R"(\s*ilog_eps\s*\(\s*(\d+)\s*,\s*([^)\s]+)\s*\)\s*)");
  static const std::regex pw(R"(\s*pow\s*\(\s*([^)\s]+)\s*\)\s*)");
  const std::string s(text);
  std::smatch m;
  try {
    if (std::regex_match(s, m, ilog)) return GrowthFunction::iterated_log(std::stoi(m[1]));
    if (std::regex_match(s, m, ilog_eps)) return GrowthFunction::iterated_log_eps(std::stoi(m[1]), parse_real(m[2].str()));
    if (std::regex_match(s, m, pw)) return GrowthFunction::power(parse_real(m[1].str()));
  } catch (const precondition_error& e) {
    throw config_error("growth function '" + s + "': " + e.what());
  }
  throw config_error("unknown growth function '" + s + "' (expected ilog(r), ilog_eps(r, eps) or pow(a))");
}

inline ThetaFunction parse_theta(std::string_view text) {
  static const std::regex pw(R"(\s*pow\s*\(\s*([^)\s]+)\s*\)\s*)");
  const std::string s(text);
  if (trim(s) == "one_plus_log") return ThetaFunction::one_plus_log();
  std::smatch m;
  try {
    if (std::regex_match(s, m, pw)) return ThetaFunction::power(parse_real(m[1].str()));
  } catch (const precondition_error& e) {
    throw config_error("theta '" + s + "': " + e.what());
  }
  throw config_error("unknown theta '" + s + "' (expected one_plus_log or pow(b))");
}

}  // namespace ppclab
