#pragma once

// Closed-form Gaussian calculus used by the routing model: the standard
// normal CDF/PDF, censored expectations E[(h-A)+] and E[(A-h)+], and the
// moments of the waiting time W = max(0, e - A) for A ~ N(mu, var).

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccamr/errors.hpp"

namespace ccamr {

/// Gaussian quantity described by its first two moments.
struct NormalVar {
  double mu = 0.0;
  double var = 0.0;

  double sd() const { return std::sqrt(var); }

  friend NormalVar operator+(const NormalVar& a, const NormalVar& b) {
    return {a.mu + b.mu, a.var + b.var};
  }
  NormalVar& operator+=(const NormalVar& o) {
    mu += o.mu;
    var += o.var;
    return *this;
  }
  friend bool operator==(const NormalVar&, const NormalVar&) = default;
};

namespace gauss {

// Variances below this are treated as exactly deterministic.
inline constexpr double kDegenerateVar = 1e-18;

inline bool degenerate(const NormalVar& a) { return a.var < kDegenerateVar; }

inline double std_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Phi(z) via the complementary error function, accurate in both tails.
inline double std_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace detail {

// psi(d) = E[(Z + d)+] = d*Phi(d) + phi(d). For d > 0 the reflection
// psi(d) = d + psi(-d) avoids cancelling two O(d) terms.
inline double partial_mean(double d) {
  if (d > 0.0) return d + (std_pdf(d) - d * std_cdf(-d));
  return d * std_cdf(d) + std_pdf(d);
}

// Var[(Z + d)+] for Z standard normal.
inline double partial_var(double d) {
  const double pdf = std_pdf(d);
  if (d > 0.0) {
    const double tail = std_cdf(-d);
    const double r = pdf - d * tail;  // psi(-d)
    return 1.0 + (d * d - 1.0) * tail - d * pdf - r * r;
  }
  const double m = partial_mean(d);
  return (d * d + 1.0) * std_cdf(d) + d * pdf - m * m;
}

}  // namespace detail

/// E[(h - A)+]. Same closed form as h*Phi((h-mu)/s) + mu*Phi((mu-h)/s)
/// + s*phi((h-mu)/s) - mu, rearranged to (h-mu)*Phi(d) + s*phi(d).
inline double expected_earliness(const NormalVar& a, double h) {
  if (degenerate(a)) return std::max(0.0, h - a.mu);
  const double s = a.sd();
  return s * detail::partial_mean((h - a.mu) / s);
}

/// E[(A - h)+].
inline double expected_delay(const NormalVar& a, double h) {
  if (degenerate(a)) return std::max(0.0, a.mu - h);
  const double s = a.sd();
  return s * detail::partial_mean((a.mu - h) / s);
}

/// Mean and variance of W = max(0, e - A).
inline NormalVar waiting_moments(const NormalVar& a, double e) {
  if (degenerate(a)) return {std::max(0.0, e - a.mu), 0.0};
  const double s = a.sd();
  const double d = (e - a.mu) / s;
  const double mean = s * detail::partial_mean(d);
  double var = a.var * detail::partial_var(d);
  if (var < 0.0) {
    if (var < -1e-9) throw NumericError("negative waiting-time variance");
    var = 0.0;
  }
  return {mean, var};
}

/// P(X <= bound) for X ~ N(x.mu, x.var); a degenerate X gives 0 or 1.
inline double prob_at_most(const NormalVar& x, double bound) {
  if (degenerate(x)) return x.mu <= bound ? 1.0 : 0.0;
  return std_cdf((bound - x.mu) / x.sd());
}

}  // namespace gauss
}  // namespace ccamr
