#pragma once

// Complex-capable special functions and quadrature primitives.
//
// Everything here is a pure function of its arguments and may be called
// concurrently.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dufresne/errors.hpp"

namespace dufresne {

using complex = std::complex<double>;

namespace detail {

inline bool is_nonpositive_integer(complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

inline bool is_finite(complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

/// Principal branch of log Gamma(z), analytic on C \ (-inf, 0].
///
/// The argument is shifted with log Gamma(z) = log Gamma(z+n) - sum log(z+k)
/// until Re z >= 15, where an 8-term Stirling series is accurate to double
/// precision.
inline complex log_gamma(complex z) {
  if (!detail::is_finite(z)) throw domain_error("log_gamma: non-finite argument");
  if (detail::is_nonpositive_integer(z))
    throw pole_error("log_gamma: pole at z = " + std::to_string(z.real()));

  constexpr double shift_to = 15.0;
  complex shifted = z;
  double log_abs_sum = 0.0;
  double arg_sum = 0.0;
  complex prod{1.0, 0.0};
  while (shifted.real() < shift_to) {
    prod *= shifted;
    arg_sum += std::arg(shifted);
    if (std::abs(prod) > 1e150 || std::abs(prod) < 1e-150) {
      log_abs_sum += std::log(std::abs(prod));
      prod = complex{1.0, 0.0};
    }
    shifted += 1.0;
  }
  log_abs_sum += std::log(std::abs(prod));

  static constexpr std::array<double, 8> stirling{
      1.0 / 12.0,     -1.0 / 360.0,          1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,   -691.0 / 360360.0,     1.0 / 156.0,  -3617.0 / 122400.0};
  const complex inv = 1.0 / shifted;
  const complex inv2 = inv * inv;
  complex series{0.0, 0.0};
  complex power = inv;
  for (double c : stirling) {
    series += c * power;
    power *= inv2;
  }
  const complex large = (shifted - 0.5) * std::log(shifted) - shifted +
                        0.5 * std::log(2.0 * std::numbers::pi) + series;
  return large - complex{log_abs_sum, arg_sum};
}

inline double log_gamma(double x) { return log_gamma(complex{x, 0.0}).real(); }

/// Rising factorial z(z+1)...(z+n-1); 1 when n = 0.
inline complex pochhammer(complex z, unsigned n) {
  complex result{1.0, 0.0};
  for (unsigned k = 0; k < n; ++k) result *= z + static_cast<double>(k);
  return result;
}

inline double pochhammer(double x, unsigned n) {
  double result = 1.0;
  for (unsigned k = 0; k < n; ++k) result *= x + static_cast<double>(k);
  return result;
}

/// True when every non-real entry of `params` has its conjugate in the list
/// (matched one-to-one, within a relative tolerance).
inline bool conjugate_closed(std::span<const complex> params, double tol = 1e-12) {
  std::vector<bool> used(params.size(), false);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (used[i]) continue;
    const complex z = params[i];
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol * scale) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      if (!used[j] && std::abs(params[j] - std::conj(z)) <= tol * scale) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

struct SeriesLimits {
  double relative_threshold = 1e-15;
  int consecutive_small = 3;
  long max_terms = 100000;
  double imag_tolerance = 1e-12;
};

/// Generalized hypergeometric series pFq(num; den; z) for real z.
///
/// Parameters may be complex as long as each list is closed under
/// conjugation, which makes every term real. The series is summed directly;
/// it must either terminate (a numerator parameter is a non-positive integer)
/// or converge (p <= q, or p = q+1 with |z| < 1).
inline double pfq(std::span<const complex> num, std::span<const complex> den, double z,
                  const SeriesLimits& limits = {}) {
  if (!std::isfinite(z)) throw domain_error("pfq: non-finite argument");
  if (!conjugate_closed(num) || !conjugate_closed(den))
    throw parameter_error("pfq: complex parameters must occur in conjugate pairs");

  // A non-positive integer numerator -m truncates the series after term m.
  long terminate_at = -1;
  for (const complex& a : num) {
    if (detail::is_nonpositive_integer(a)) {
      const long m = static_cast<long>(-a.real());
      if (terminate_at < 0 || m < terminate_at) terminate_at = m;
    }
  }
  for (const complex& b : den) {
    if (detail::is_nonpositive_integer(b)) {
      const long m = static_cast<long>(-b.real());
      if (terminate_at < 0 || terminate_at > m)
        throw pole_error("pfq: denominator parameter at a non-positive integer");
    }
  }
  const std::size_t p = num.size();
  const std::size_t q = den.size();
  if (terminate_at < 0) {
    if (p > q + 1) throw domain_error("pfq: divergent series (p > q+1, non-terminating)");
    if (p == q + 1 && std::abs(z) >= 1.0)
      throw domain_error("pfq: |z| >= 1 outside the convergence disc");
  }

  complex sum{1.0, 0.0};
  complex term{1.0, 0.0};
  double largest = 1.0;
  int small_run = 0;
  for (long n = 0;; ++n) {
    if (terminate_at >= 0 && n >= terminate_at) break;
    if (n >= limits.max_terms)
      throw convergence_error("pfq: term cap reached without convergence");
    const double dn = static_cast<double>(n);
    complex ratio{z / (dn + 1.0), 0.0};
    for (const complex& a : num) ratio *= a + dn;
    for (const complex& b : den) ratio /= b + dn;
    term *= ratio;
    sum += term;
    const double mag = std::abs(term);
    largest = std::max(largest, mag);
    if (!std::isfinite(mag) || !detail::is_finite(sum))
      throw overflow_error("pfq: series overflow");
    if (terminate_at < 0) {
      if (mag <= limits.relative_threshold * std::abs(sum)) {
        if (++small_run >= limits.consecutive_small) break;
      } else {
        small_run = 0;
      }
    }
  }
  if (std::abs(sum.imag()) > limits.imag_tolerance * largest)
    throw parameter_error("pfq: non-negligible imaginary residue");
  return sum.real();
}

inline double pfq(std::initializer_list<complex> num, std::initializer_list<complex> den,
                  double z, const SeriesLimits& limits = {}) {
  return pfq(std::span<const complex>(num.begin(), num.size()),
             std::span<const complex>(den.begin(), den.size()), z, limits);
}

// Quadrature -----------------------------------------------------------------

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, in (-1, 1)
  std::vector<double> weights;  // positive, sum to 2
  int order = 0;

  /// Integral of f over [a, b] with the rule mapped affinely.
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return half * acc;
  }
};

/// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int order) {
  if (order < 2 || order > 512) throw domain_error("gauss_legendre: order must be in [2, 512]");
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) {
        // one more evaluation of dp at the converged node
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest node
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Adaptive integral over a finite interval (double-exponential rule).
template <typename F>
double integrate_finite(F&& f, double a, double b, double tol = 1e-12) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), a, b, tol);
}

/// Adaptive integral over (a, +inf).
template <typename F>
double integrate_half_line(F&& f, double a = 0.0, double tol = 1e-12) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(std::forward<F>(f), a, std::numeric_limits<double>::infinity(), tol);
}

// Confluent functions -------------------------------------------------------

/// Tricomi U(a, b, x) for a > 0, x > 0 from its Laplace-type integral
/// U = 1/Gamma(a) int_0^inf e^{-xt} t^{a-1} (1+t)^{b-a-1} dt.
inline double hypergeometric_u(double a, double b, double x) {
  if (!(a > 0.0) || !(x > 0.0) || !std::isfinite(b))
    throw domain_error("hypergeometric_u: requires a > 0 and x > 0");
  const double lga = log_gamma(a);
  auto integrand = [=](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-x * t + (a - 1.0) * std::log(t) + (b - a - 1.0) * std::log1p(t) - lga);
  };
  // The split keeps the t^{a-1} endpoint behaviour and the e^{-xt} tail in
  // separate rules.
  return integrate_finite(integrand, 0.0, 1.0, 1e-13) + integrate_half_line(integrand, 1.0, 1e-13);
}

/// Whittaker W_{kappa,mu}(x) = e^{-x/2} x^{mu+1/2} U(mu-kappa+1/2, 1+2mu, x),
/// supported where the U integral converges (mu - kappa + 1/2 > 0).
inline double whittaker_w(double kappa, double mu, double x) {
  const double a = mu - kappa + 0.5;
  if (!(x > 0.0) || !(a > 0.0) || !std::isfinite(kappa) || !std::isfinite(mu))
    throw domain_error("whittaker_w: unsupported parameters (need x > 0, mu - kappa + 1/2 > 0)");
  return std::exp(-0.5 * x + (mu + 0.5) * std::log(x)) * hypergeometric_u(a, 1.0 + 2.0 * mu, x);
}

}  // namespace dufresne
