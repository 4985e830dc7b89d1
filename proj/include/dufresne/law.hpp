#pragma once

// Dufresne laws D(a; b), defined through their Mellin transform
//   E[X^s] = prod_j Gamma(a_j+s)/Gamma(a_j) / prod_i Gamma(b_i+s)/Gamma(b_i),
// optionally convolved additively with independent unit-scale gamma
// variables.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dufresne/errors.hpp"
#include "dufresne/random.hpp"
#include "dufresne/special_fn.hpp"

namespace dufresne {

/// Realization of a real Dufresne law as
///   prod Beta(a_i, b_i) * prod Gamma(g_j) + sum Gamma(v_k).
struct SamplerPlan {
  std::vector<std::pair<double, double>> beta_factors;
  std::vector<double> gamma_factors;
  std::vector<double> additive_gamma;

  double additive_shape() const {
    return std::accumulate(additive_gamma.begin(), additive_gamma.end(), 0.0);
  }
};

class Law {
 public:
  Law() = default;

  /// Throws parameter_error when a list is not closed under conjugation or
  /// holds non-finite values, and when a gamma shape is not positive.
  Law(std::vector<complex> numerator, std::vector<complex> denominator,
      std::vector<double> gamma_shapes = {})
      : num_(std::move(numerator)), den_(std::move(denominator)), gamma_(std::move(gamma_shapes)) {
    for (const auto* list : {&num_, &den_}) {
      for (const complex& z : *list)
        if (!detail::is_finite(z)) throw parameter_error("Law: non-finite parameter");
      if (!conjugate_closed(*list))
        throw parameter_error("Law: complex parameters must occur in conjugate pairs");
    }
    for (double u : gamma_)
      if (!(u > 0.0) || !std::isfinite(u))
        throw parameter_error("Law: additive gamma shapes must be positive");
  }

  static Law real(const std::vector<double>& numerator, const std::vector<double>& denominator,
                  std::vector<double> gamma_shapes = {}) {
    std::vector<complex> n(numerator.begin(), numerator.end());
    std::vector<complex> d(denominator.begin(), denominator.end());
    return Law(std::move(n), std::move(d), std::move(gamma_shapes));
  }

  const std::vector<complex>& numerator() const { return num_; }
  const std::vector<complex>& denominator() const { return den_; }
  const std::vector<double>& gamma_shapes() const { return gamma_; }

  double additive_shape() const { return std::accumulate(gamma_.begin(), gamma_.end(), 0.0); }

  bool all_real() const {
    auto real = [](const complex& z) { return z.imag() == 0.0; };
    return std::all_of(num_.begin(), num_.end(), real) &&
           std::all_of(den_.begin(), den_.end(), real);
  }

  /// Numerator real parts positive (a genuine product of gamma/beta type
  /// variables). Moments and Laplace transforms are available regardless.
  bool is_proper() const {
    return std::all_of(num_.begin(), num_.end(), [](const complex& z) { return z.real() > 0.0; });
  }

  bool operator==(const Law&) const = default;

 private:
  std::vector<complex> num_;
  std::vector<complex> den_;
  std::vector<double> gamma_;
};

namespace detail {

// Removes numerator/denominator pairs that are equal (their ratio is 1).
inline std::pair<std::vector<complex>, std::vector<complex>> cancel_common(
    const std::vector<complex>& num, const std::vector<complex>& den) {
  std::vector<complex> n = num;
  std::vector<complex> d;
  for (const complex& b : den) {
    auto it = std::find_if(n.begin(), n.end(), [&](const complex& a) {
      return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b));
    });
    if (it != n.end())
      n.erase(it);
    else
      d.push_back(b);
  }
  return {std::move(n), std::move(d)};
}

inline double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace detail

/// Mellin transform E[X^s] through log-gamma ratios.
///
/// With additive gamma components only integer s >= 0 is supported; the
/// binomial convolution is then evaluated with log-gamma ratios as well.
inline double mellin(const Law& law, double s) {
  auto dufresne_part = [&](double t) {
    complex acc{0.0, 0.0};
    for (const complex& a : law.numerator()) {
      acc += log_gamma(a + t) - log_gamma(a);
    }
    for (const complex& b : law.denominator()) {
      if (detail::is_nonpositive_integer(b + t)) throw pole_error("mellin: b_i + s at a pole");
      acc -= log_gamma(b + t) - log_gamma(b);
    }
    // Conjugate pairs make the imaginary part vanish modulo 2*pi.
    const double turns = std::round(acc.imag() / (2.0 * std::numbers::pi));
    const double residue = acc.imag() - turns * 2.0 * std::numbers::pi;
    const double value = std::exp(acc.real()) * std::cos(residue);
    if (std::abs(std::sin(residue)) > 1e-10)
      throw parameter_error("mellin: non-real value (non-conjugate parameters)");
    return value;
  };

  if (law.gamma_shapes().empty()) {
    const double v = dufresne_part(s);
    if (!std::isfinite(v)) throw overflow_error("mellin: overflow");
    return v;
  }
  if (s < 0.0 || s != std::round(s))
    throw domain_error("mellin: additive gamma components need integer s >= 0");
  const unsigned n = static_cast<unsigned>(s);
  const double shape = law.additive_shape();
  const double lg_shape = log_gamma(shape);
  double total = 0.0;
  for (unsigned k = 0; k <= n; ++k) {
    const double gamma_moment = std::exp(log_gamma(shape + (n - k)) - lg_shape);
    total += detail::binomial(n, k) * dufresne_part(k) * gamma_moment;
  }
  if (!std::isfinite(total)) throw overflow_error("mellin: overflow");
  return total;
}

/// Integer moment E[X^n] through Pochhammer products (and the binomial
/// convolution with the additive gamma part).
inline double moment(const Law& law, unsigned n) {
  if (n > 60) throw domain_error("moment: order above 60 is not supported");
  auto pure = [&](unsigned m) {
    complex v{1.0, 0.0};
    for (const complex& a : law.numerator()) v *= pochhammer(a, m);
    for (const complex& b : law.denominator()) {
      const complex pb = pochhammer(b, m);
      if (pb == complex{0.0, 0.0}) throw pole_error("moment: denominator Pochhammer vanishes");
      v /= pb;
    }
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v)))
      throw parameter_error("moment: non-real moment");
    return v.real();
  };
  double result;
  if (law.gamma_shapes().empty()) {
    result = pure(n);
  } else {
    const double shape = law.additive_shape();
    result = 0.0;
    for (unsigned k = 0; k <= n; ++k)
      result += detail::binomial(n, k) * pure(k) * pochhammer(shape, n - k);
  }
  if (!std::isfinite(result)) throw overflow_error("moment: overflow");
  return result;
}

/// Laplace transform E[exp(-sX)] for s >= 0.
///
/// Gamma components contribute (1+s)^{-u}; the Dufresne part is the series
/// pFq(a; b; -s) after cancelling equal numerator/denominator entries.
inline double laplace(const Law& law, double s, const SeriesLimits& limits = {}) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw domain_error("laplace: requires finite s >= 0");
  double factor = std::pow(1.0 + s, -law.additive_shape());
  auto [num, den] = detail::cancel_common(law.numerator(), law.denominator());
  if (den.empty()) {
    if (num.empty()) return factor;
    if (num.size() == 1) return factor * std::pow(1.0 + s, -num.front().real());
    throw domain_error("laplace: product of gamma variables has no convergent series form");
  }
  return factor * pfq(num, den, -s, limits);
}

// Sampling ---------------------------------------------------------------------

/// Builds the beta/gamma realization of a real law. Each denominator b is
/// paired with a distinct numerator a < b, giving Beta(a, b-a); unpaired
/// numerators become Gamma factors. Among admissible pairings the one
/// maximizing min(b - a) is chosen.
inline SamplerPlan make_sampler_plan(const Law& law) {
  if (!law.all_real()) throw not_samplable_error("sampler: complex-parameter laws are not samplable");
  auto [n, d] = detail::cancel_common(law.numerator(), law.denominator());
  std::vector<double> num;
  std::vector<double> den;
  for (const complex& z : n) num.push_back(z.real());
  for (const complex& z : d) den.push_back(z.real());
  for (double a : num)
    if (!(a > 0.0)) throw not_samplable_error("sampler: numerator parameters must be positive");
  if (den.size() > num.size())
    throw not_samplable_error("sampler: more denominator than numerator parameters");

  // Assignment den[i] -> num[perm[i]]; exhaustive for small lists.
  std::vector<std::size_t> perm(num.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<std::vector<std::size_t>> best;
  double best_gap = -1.0;
  auto consider = [&](const std::vector<std::size_t>& p) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < den.size(); ++i) gap = std::min(gap, den[i] - num[p[i]]);
    if (gap > 0.0 && gap > best_gap) {
      best_gap = gap;
      best = p;
    }
  };
  if (num.size() <= 8) {
    std::sort(perm.begin(), perm.end());
    do {
      consider(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    // greedy: largest denominators take the smallest free numerators
    std::vector<std::size_t> order(den.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> by_num(num.size());
    std::iota(by_num.begin(), by_num.end(), 0);
    std::sort(by_num.begin(), by_num.end(), [&](auto x, auto y) { return num[x] < num[y]; });
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return den[x] < den[y]; });
    std::vector<std::size_t> p(num.size());
    for (std::size_t i = 0; i < order.size(); ++i) p[order[i]] = by_num[i];
    std::vector<bool> used(num.size(), false);
    for (std::size_t i = 0; i < order.size(); ++i) used[by_num[i]] = true;
    std::size_t fill = den.size();
    for (std::size_t j = 0; j < num.size(); ++j)
      if (!used[j]) p[fill++] = j;
    consider(p);
  }
  if (!best) throw not_samplable_error("sampler: no pairing with b - a > 0 for every denominator");

  SamplerPlan plan;
  std::vector<bool> paired(num.size(), false);
  for (std::size_t i = 0; i < den.size(); ++i) {
    const std::size_t j = (*best)[i];
    paired[j] = true;
    plan.beta_factors.emplace_back(num[j], den[i] - num[j]);
  }
  for (std::size_t j = 0; j < num.size(); ++j)
    if (!paired[j]) plan.gamma_factors.push_back(num[j]);
  plan.additive_gamma = law.gamma_shapes();
  return plan;
}

/// Mellin transform implied by a plan (integer s only when additive parts exist).
inline double plan_mellin(const SamplerPlan& plan, double s) {
  std::vector<double> num;
  std::vector<double> den;
  for (auto [a, b] : plan.beta_factors) {
    num.push_back(a);
    den.push_back(a + b);
  }
  for (double g : plan.gamma_factors) num.push_back(g);
  return mellin(Law::real(num, den, plan.additive_gamma), s);
}

inline double draw(const SamplerPlan& plan, Stream& stream) {
  double x = 1.0;
  for (auto [a, b] : plan.beta_factors) x *= b == 1.0 ? stream.beta_a1(a) : stream.beta(a, b);
  for (double g : plan.gamma_factors) x *= stream.gamma(g);
  const double v = plan.additive_shape();
  if (v > 0.0) x += stream.gamma(v);
  return x;
}

/// i.i.d. draws from a samplable law.
inline std::vector<double> sample(const Law& law, Stream& stream, std::size_t count) {
  const SamplerPlan plan = make_sampler_plan(law);
  std::vector<double> out(count);
  for (double& x : out) x = draw(plan, stream);
  return out;
}

// Densities ----------------------------------------------------------------

namespace detail {

inline double log_gamma_density(double shape, double x) {
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - x - log_gamma(shape);
}

inline double log_beta_fn(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Density of the multiplicative part prod Beta * prod Gamma of a plan.
inline double product_density(const SamplerPlan& plan, double x) {
  if (!(x > 0.0)) return 0.0;
  const auto& betas = plan.beta_factors;
  const auto& gammas = plan.gamma_factors;
  if (betas.size() > 1 || gammas.size() > 1 || (betas.empty() && gammas.empty()))
    throw unsupported_error("density: only Beta, Gamma or Beta x Gamma products are supported");
  if (betas.empty()) return std::exp(log_gamma_density(gammas.front(), x));
  const auto [a, b] = betas.front();
  const double lb = log_beta_fn(a, b);
  if (gammas.empty()) {
    if (x >= 1.0) return 0.0;
    return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lb);
  }
  const double g = gammas.front();
  // f(x) = int_0^1 f_Beta(t) f_Gamma(x/t) dt/t; with t = e^{-v} this is
  // int_0^inf f_Beta(e^{-v}) f_Gamma(x e^v) dv. The gamma factor peaks near
  // v* = log(max(g,1)/x), so the half line is split there.
  auto integrand = [=](double v) {
    if (!(v > 0.0)) return 0.0;
    const double lv = -(a - 1.0) * v + (b - 1.0) * std::log(-std::expm1(-v)) - lb +
                      log_gamma_density(g, x * std::exp(v));
    return std::isnan(lv) ? 0.0 : std::exp(lv);
  };
  const double split = std::log(std::max(g, 1.0)) - std::log(x);
  if (split <= 0.0) return integrate_half_line(integrand, 0.0, 1e-12);
  return integrate_finite(integrand, 0.0, split, 1e-12) + integrate_half_line(integrand, split, 1e-12);
}

}  // namespace detail

/// Density of a real law realizable as Beta, Gamma or Beta x Gamma, plus an
/// optional additive gamma component (handled by a convolution integral).
inline double density(const Law& law, double x) {
  if (!law.all_real()) throw unsupported_error("density: complex-parameter law");
  if (!(x > 0.0)) return 0.0;
  SamplerPlan plan;
  try {
    plan = make_sampler_plan(law);
  } catch (const not_samplable_error& e) {
    throw unsupported_error(std::string("density: ") + e.what());
  }
  const double v = plan.additive_shape();
  if (v <= 0.0) return detail::product_density(plan, x);
  if (plan.beta_factors.empty() && plan.gamma_factors.size() == 1)
    return std::exp(detail::log_gamma_density(plan.gamma_factors.front() + v, x));
  SamplerPlan product = plan;
  product.additive_gamma.clear();
  // tc is the distance to the nearer endpoint, which keeps x - y accurate
  // where the (x - y)^{v-1} factor is singular.
  auto integrand = [&](double y, double tc) {
    if (y <= 0.0 || y >= x) return 0.0;
    const double rest = (y > 0.5 * x && tc > 0.0) ? tc : x - y;
    if (!(rest > 0.0)) return 0.0;
    return detail::product_density(product, y) * std::exp(detail::log_gamma_density(v, rest));
  };
  return integrate_finite(integrand, 0.0, x, 1e-10);
}

}  // namespace dufresne
