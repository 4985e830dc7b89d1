#pragma once

// Stationary law of the chain X_n = A_n (X_{n-1} + B_n) with
// A = prod_j Beta(alpha_j, 1) and B ~ Gamma(u).

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dufresne/errors.hpp"
#include "dufresne/law.hpp"
#include "dufresne/param_solver.hpp"
#include "dufresne/special_fn.hpp"

namespace dufresne {

struct ChainSpec {
  std::vector<double> alphas;
  double u = 1.0;

  ChainSpec() = default;
  ChainSpec(std::vector<double> a, double shape) : alphas(std::move(a)), u(shape) { validate(); }

  void validate() const {
    if (alphas.empty()) throw domain_error("ChainSpec: at least one alpha is required");
    for (double a : alphas)
      if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("ChainSpec: alphas must be positive");
    if (!(u > 0.0) || !std::isfinite(u)) throw domain_error("ChainSpec: u must be positive");
  }

  int k() const { return static_cast<int>(alphas.size()); }

  /// E[A^n] = prod alpha_j / (alpha_j + n).
  double mean_a_power(double n) const {
    double m = 1.0;
    for (double a : alphas) m *= a / (a + n);
    return m;
  }

  /// E[log A] = -sum 1/alpha_j (always negative: the chain is contracting).
  double mean_log_a() const {
    double s = 0.0;
    for (double a : alphas) s -= 1.0 / a;
    return s;
  }

  bool operator==(const ChainSpec&) const = default;
};

/// Moments m_0..m_n of the fixed point X = A(X+B), from
///   m_n (1 - E[A^n]) = E[A^n] sum_{j<n} C(n,j) m_j (u)_{n-j}.
inline std::vector<double> moment_oracle(const ChainSpec& spec, int n_max) {
  if (n_max < 0 || n_max > 60) throw domain_error("moment_oracle: order must be in [0, 60]");
  std::vector<double> m(n_max + 1, 0.0);
  m[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double ea = spec.mean_a_power(n);
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += detail::binomial(n, j) * m[j] * pochhammer(spec.u, static_cast<unsigned>(n - j));
    m[n] = ea * acc / (1.0 - ea);
    if (!std::isfinite(m[n]) || !(m[n] > 0.0)) throw overflow_error("moment_oracle: overflow at order " + std::to_string(n));
  }
  return m;
}

struct StationaryModel {
  ChainSpec spec;
  std::optional<Law> law;        // present on closed-form branches
  std::optional<double> rho;     // u = 2, k = 2
  std::optional<RootSet> roots;  // u = 1, k >= 3
  std::vector<double> moments;   // oracle moments m_0..m_N
};

inline constexpr int default_moment_count = 40;

/// Rho of the u = 2 branch: the root of p^2 - p - alpha beta that is <= 0.
inline double u2_rho(double alpha, double beta) { return 0.5 * (1.0 - std::sqrt(1.0 + 4.0 * alpha * beta)); }

inline StationaryModel solve_stationary(const ChainSpec& spec, int moment_count = default_moment_count) {
  spec.validate();
  StationaryModel model;
  model.spec = spec;
  model.moments = moment_oracle(spec, moment_count);
  const int k = spec.k();
  std::vector<complex> num(spec.alphas.begin(), spec.alphas.end());
  if (spec.u == 1.0) {
    if (k == 1) {
      model.law = Law(num, {});
    } else if (k == 2) {
      model.law = Law(num, {complex{spec.alphas[0] + spec.alphas[1] + 1.0, 0.0}});
    } else {
      RootSet roots = solve_c(spec.alphas);
      model.law = Law(num, roots.roots);
      model.roots = std::move(roots);
    }
  } else if (spec.u == 2.0 && k == 2) {
    const double a = spec.alphas[0];
    const double b = spec.alphas[1];
    const double rho = u2_rho(a, b);
    model.rho = rho;
    model.law = Law({complex{a + rho, 0.0}, complex{b + rho, 0.0}}, {complex{a + b + 1.0, 0.0}}, {-rho});
  }
  return model;
}

// ODE -------------------------------------------------------------------------

/// sum_j coefficient[j](s) * Phi^{(j)}(s) = 0; coefficient[j] multiplies the
/// j-th derivative.
struct OdeSpec {
  int order = 0;
  std::vector<std::function<double(double)>> coefficients;
};

inline OdeSpec ode_spec(const ChainSpec& spec) {
  spec.validate();
  const int k = spec.k();
  OdeSpec ode;
  if (k == 2) {
    const double a = spec.alphas[0];
    const double b = spec.alphas[1];
    const double u = spec.u;
    ode.order = 2;
    ode.coefficients.resize(3);
    // ((1+s)^u - 1)/s has the removable value u at s = 0
    ode.coefficients[0] = [=](double s) {
      const double ratio = std::abs(s) < 1e-8 ? u + 0.5 * u * (u - 1.0) * s : std::expm1(u * std::log1p(s)) / s;
      return a * b * ratio;
    };
    ode.coefficients[1] = [=](double s) { return (a + b + 1.0) * std::pow(1.0 + s, u); };
    ode.coefficients[2] = [=](double s) { return std::pow(1.0 + s, u) * s; };
    return ode;
  }
  if (spec.u != 1.0) throw unsupported_error("ode_spec: k >= 3 requires u = 1");
  const auto t = ode_coefficients<double>(spec.alphas);
  ode.order = k;
  ode.coefficients.resize(k + 1);
  ode.coefficients[0] = [c = t[k]](double) { return c; };
  for (int r = 0; r < k; ++r) {
    const int power = k - 1 - r;
    ode.coefficients[k - r] = [c = t[r], power](double s) { return (1.0 + s) * c * std::pow(s, power); };
  }
  return ode;
}

namespace detail {

// Central difference for the j-th derivative with the binomial stencil
// (second-order accurate), then Richardson extrapolation over `levels`
// halvings.
template <typename F>
double derivative(F&& f, double s, int order, double h, int levels = 3) {
  if (order == 0) return f(s);
  auto central = [&](double step) {
    double acc = 0.0;
    for (int i = 0; i <= order; ++i) {
      const double offset = (0.5 * order - i) * step;
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binomial(order, i) * f(s + offset);
    }
    return acc / std::pow(step, order);
  };
  std::vector<double> table;
  for (int l = 0; l < levels; ++l) table.push_back(central(h / std::pow(2.0, l)));
  for (int l = 1; l < levels; ++l) {
    const double factor = std::pow(4.0, l);
    for (int i = levels - 1; i >= l; --i) table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
  }
  return table.back();
}

inline double derivative_step(int order) {
  switch (order) {
    case 0: return 0.0;
    case 1: return 1e-3;
    case 2: return 4e-3;
    case 3: return 1e-2;
    default: return 2e-2;
  }
}

}  // namespace detail

struct OdeResidual {
  double residual = 0.0;      // |sum of terms| / max |term|
  double largest_term = 0.0;
};

/// Plugs finite-difference derivatives of phi into the ODE at s.
template <typename F>
OdeResidual ode_residual(const OdeSpec& ode, F&& phi, double s) {
  double total = 0.0;
  double largest = 0.0;
  for (int j = 0; j <= ode.order; ++j) {
    const double term = ode.coefficients[j](s) * detail::derivative(phi, s, j, detail::derivative_step(j));
    total += term;
    largest = std::max(largest, std::abs(term));
  }
  return {largest > 0.0 ? std::abs(total) / largest : std::abs(total), largest};
}

/// j-th derivative of the Laplace transform of a closed-form law, exactly:
/// E[X^j e^{-sX}] = m_j times the transform of the size-biased law, whose
/// parameters are all shifted by j. Additive gamma parts enter by Leibniz.
inline double laplace_derivative(const Law& law, double s, int order) {
  const Law core(law.numerator(), law.denominator());
  double g = 0.0;
  for (double shape : law.gamma_shapes()) g += shape;
  auto core_derivative = [&](int j) {
    if (j == 0) return laplace(core, s);
    std::vector<complex> num = core.numerator();
    std::vector<complex> den = core.denominator();
    for (auto& a : num) a += static_cast<double>(j);
    for (auto& b : den) b += static_cast<double>(j);
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    return sign * moment(core, static_cast<unsigned>(j)) * laplace(Law(num, den), s);
  };
  if (g == 0.0) return core_derivative(order);
  double total = 0.0;
  for (int i = 0; i <= order; ++i) {
    const int rest = order - i;
    const double sign = rest % 2 == 0 ? 1.0 : -1.0;
    const double gamma_part = sign * pochhammer(g, static_cast<unsigned>(rest)) * std::pow(1.0 + s, -g - rest);
    total += detail::binomial(order, i) * core_derivative(i) * gamma_part;
  }
  return total;
}

/// ODE residual with exact derivatives of a closed-form transform.
inline OdeResidual ode_residual_exact(const OdeSpec& ode, const Law& law, double s) {
  double total = 0.0;
  double largest = 0.0;
  for (int j = 0; j <= ode.order; ++j) {
    const double term = ode.coefficients[j](s) * laplace_derivative(law, s, j);
    total += term;
    largest = std::max(largest, std::abs(term));
  }
  return {largest > 0.0 ? std::abs(total) / largest : std::abs(total), largest};
}

struct TaylorValue {
  double value = 0.0;
  double error_estimate = 0.0;  // magnitude of the last included term
  bool diverging = false;       // terms grew over the tail
};

/// Phi(s) = sum_n (-s)^n m_n / n! from moments m_0..m_N.
inline TaylorValue phi_taylor(std::span<const double> moments, double s) {
  if (moments.size() < 31) throw domain_error("phi_taylor: at least 30 moments are required");
  if (s < 0.0 || s > 0.5) throw domain_error("phi_taylor: s must lie in [0, 0.5]");
  TaylorValue out;
  double factor = 1.0;  // (-s)^n / n!
  double previous = 0.0;
  std::vector<double> terms;
  for (std::size_t n = 0; n < moments.size(); ++n) {
    if (n > 0) factor *= -s / static_cast<double>(n);
    terms.push_back(factor * moments[n]);
  }
  for (double t : terms) out.value += t;
  out.error_estimate = std::abs(terms.back());
  const std::size_t tail = terms.size() - 5;
  previous = std::abs(terms[tail - 1]);
  out.diverging = std::abs(terms.back()) > previous && std::abs(terms.back()) > 1e-300;
  return out;
}

inline TaylorValue phi_taylor(const StationaryModel& model, double s) { return phi_taylor(model.moments, s); }

/// Laplace transform of the stationary law: closed form when available,
/// otherwise the Taylor series of the oracle moments.
inline double stationary_laplace(const StationaryModel& model, double s) {
  if (model.law) return laplace(*model.law, s);
  return phi_taylor(model, s).value;
}

}  // namespace dufresne
