#pragma once

// Denominator parameters of the stationary law for B ~ Gamma(1).
//
// With A = prod_j Beta(alpha_j, 1) the Laplace transform satisfies
//   (1+s) prod_j (theta + alpha_j) Phi = e_k(alpha) Phi,   theta = s d/ds,
// which is the pFq(alpha; c; -s) equation exactly when
//   theta prod_i (theta + c_i - 1) = prod_j (theta + alpha_j) - e_k(alpha).
// Expanding both sides in ordinary derivatives (theta^m = sum_j S(m,j) s^j D^j)
// gives a unit-triangular linear system in the symmetric functions of the
// c_i - 1; the c_i are then the roots of a single real polynomial.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dufresne/errors.hpp"
#include "dufresne/special_fn.hpp"

namespace dufresne {

// Combinatorial tables ------------------------------------------------------

/// Stirling numbers of the second kind S(n, j) for 0 <= j <= n <= order.
template <typename T = long long>
class CoefficientTable {
 public:
  explicit CoefficientTable(int order) : order_(order), rows_(order + 1) {
    for (int n = 0; n <= order; ++n) {
      rows_[n].assign(n + 1, T(0));
      rows_[n][n] = T(1);
      for (int j = 1; j < n; ++j) rows_[n][j] = T(j) * rows_[n - 1][j] + rows_[n - 1][j - 1];
    }
  }

  int order() const { return order_; }

  /// S(n, j); zero outside the triangle.
  T entry(int j, int n) const {
    if (n < 0 || n > order_ || j < 0 || j > n) return T(0);
    return rows_[n][j];
  }

  /// Column n read from j = n down to j = 1.
  std::vector<T> column(int n) const {
    std::vector<T> out;
    for (int j = n; j >= 1; --j) out.push_back(entry(j, n));
    return out;
  }

 private:
  int order_;
  std::vector<std::vector<T>> rows_;
};

template <typename T>
T binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return T(0);
  T r(1);
  for (int i = 1; i <= k; ++i) r = r * T(n - k + i) / T(i);
  return r;
}

/// e_0, ..., e_n of the values.
template <typename T>
std::vector<T> elementary_symmetric(std::span<const T> xs) {
  std::vector<T> e(xs.size() + 1, T(0));
  e[0] = T(1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t r = i + 1; r >= 1; --r) e[r] = e[r] + e[r - 1] * xs[i];
  return e;
}

// ODE identification ----------------------------------------------------------

/// Coefficients T_0..T_k of
///   (1+s) sum_{r<k} T_r s^{k-1-r} Phi^{(k-r)} + T_k Phi = 0,
/// with T_r = sum_{m<=r} S(k-m, k-r) e_m(alpha) and T_k = e_k(alpha).
template <typename T>
std::vector<T> ode_coefficients(std::span<const T> alphas) {
  const int k = static_cast<int>(alphas.size());
  const auto e = elementary_symmetric<T>(alphas);
  const CoefficientTable<T> table(k);
  std::vector<T> coeffs(k + 1, T(0));
  for (int r = 0; r < k; ++r) {
    T acc(0);
    for (int m = 0; m <= r; ++m) acc = acc + table.entry(k - r, k - m) * e[m];
    coeffs[r] = acc;
  }
  coeffs[k] = e[k];
  return coeffs;
}

/// e_1(c), ..., e_{k-1}(c) for the unknown denominator parameters.
template <typename T>
std::vector<T> symmetric_functions_of_c(std::span<const T> alphas) {
  const int k = static_cast<int>(alphas.size());
  const auto derived = ode_coefficients<T>(alphas);
  const CoefficientTable<T> table(k);
  // Canonical side: coefficient r equals sum_{m<=r} S(k-m, k-r) e_m(c-1).
  // Unit diagonal, so forward substitution.
  std::vector<T> shifted(k, T(0));
  shifted[0] = T(1);
  for (int r = 1; r < k; ++r) {
    T acc = derived[r];
    for (int m = 0; m < r; ++m) acc = acc - table.entry(k - r, k - m) * shifted[m];
    shifted[r] = acc;
  }
  // c = 1 + d over k-1 parameters: e_r(c) = sum_j C(k-1-j, r-j) e_j(d).
  std::vector<T> out;
  for (int r = 1; r < k; ++r) {
    T acc(0);
    for (int j = 0; j <= r; ++j) acc = acc + binomial_coefficient<T>(k - 1 - j, r - j) * shifted[j];
    out.push_back(acc);
  }
  return out;
}

/// Monic coefficients (descending powers) of prod_i (xi - c_i).
template <typename T>
std::vector<T> parameter_polynomial_coefficients(std::span<const T> alphas) {
  const auto e = symmetric_functions_of_c<T>(alphas);
  std::vector<T> coeffs{T(1)};
  for (std::size_t r = 0; r < e.size(); ++r) coeffs.push_back(r % 2 == 0 ? T(0) - e[r] : e[r]);
  return coeffs;
}

struct ParameterPolynomial {
  std::vector<double> coefficients;      // monic, descending powers
  std::vector<double> symmetric_values;  // e_1(c), ..., e_{k-1}(c)

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

inline ParameterPolynomial parameter_polynomial(std::span<const double> alphas) {
  if (alphas.empty()) throw domain_error("parameter_polynomial: need at least one alpha");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a)) throw domain_error("parameter_polynomial: alphas must be positive");
  return {parameter_polynomial_coefficients<double>(alphas), symmetric_functions_of_c<double>(alphas)};
}

/// Row k-1 of the integer coefficient table for all alphas equal to `alpha`.
inline std::vector<long long> integer_parameter_polynomial(int k, long long alpha = 1) {
  const std::vector<long long> alphas(k, alpha);
  return parameter_polynomial_coefficients<long long>(alphas);
}

// Polynomial evaluation and root containers -------------------------------------

namespace detail {

struct HornerResult {
  complex value;
  complex derivative;
  double magnitude;  // sum |a_i| |z|^i, the rounding scale of value
};

inline HornerResult horner(std::span<const double> coeffs, complex z) {
  complex p{0.0, 0.0};
  complex dp{0.0, 0.0};
  double mag = 0.0;
  const double az = std::abs(z);
  for (double c : coeffs) {
    dp = dp * z + p;
    p = p * z + c;
    mag = mag * az + std::abs(c);
  }
  return {p, dp, mag};
}

}  // namespace detail

/// |P(z)| / sum |a_i||z|^i (backward-error style residual).
inline double normalized_residual(std::span<const double> coeffs, complex z) {
  const auto h = detail::horner(coeffs, z);
  return h.magnitude > 0.0 ? std::abs(h.value) / h.magnitude : std::abs(h.value);
}

enum class RootMethod { linear, quadratic, cardano, ferrari, aberth };

inline std::string to_string(RootMethod m) {
  switch (m) {
    case RootMethod::linear: return "linear";
    case RootMethod::quadratic: return "quadratic";
    case RootMethod::cardano: return "cardano";
    case RootMethod::ferrari: return "ferrari";
    case RootMethod::aberth: return "aberth";
  }
  return "unknown";
}

struct RootSet {
  std::vector<complex> roots;
  RootMethod method = RootMethod::aberth;
  std::vector<double> residuals;  // normalized_residual per root
  std::string notes;              // report-only remarks (closed-form deviations, validity)
  int iterations = 0;
};

namespace detail {

inline complex polish(std::span<const double> coeffs, complex z, int steps = 3) {
  double best = normalized_residual(coeffs, z);
  for (int i = 0; i < steps && best > 0.0; ++i) {
    const auto h = horner(coeffs, z);
    if (std::abs(h.derivative) == 0.0) break;
    const complex next = z - h.value / h.derivative;
    const double r = normalized_residual(coeffs, next);
    if (!(r < best)) break;
    z = next;
    best = r;
  }
  return z;
}

// Makes the root multiset exactly closed under conjugation: near-real roots
// become real, the rest are paired with their nearest conjugate partner.
inline void enforce_conjugate_pairs(std::vector<complex>& roots, double tol = 1e-9) {
  std::vector<std::size_t> upper;
  std::vector<std::size_t> lower;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double scale = std::max(1.0, std::abs(roots[i]));
    if (std::abs(roots[i].imag()) <= tol * scale)
      roots[i] = complex{roots[i].real(), 0.0};
    else if (roots[i].imag() > 0.0)
      upper.push_back(i);
    else
      lower.push_back(i);
  }
  std::vector<bool> taken(lower.size(), false);
  for (std::size_t i : upper) {
    std::size_t best = lower.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (taken[j]) continue;
      const double d = std::abs(roots[lower[j]] - std::conj(roots[i]));
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    if (best == lower.size()) {
      roots[i] = complex{roots[i].real(), 0.0};
      continue;
    }
    taken[best] = true;
    const complex& a = roots[i];
    const complex& b = roots[lower[best]];
    const complex mean{0.5 * (a.real() + b.real()), 0.5 * (a.imag() - b.imag())};
    roots[i] = mean;
    roots[lower[best]] = std::conj(mean);
  }
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!taken[j]) roots[lower[j]] = complex{roots[lower[j]].real(), 0.0};
}

inline void sort_roots(std::vector<complex>& roots) {
  std::sort(roots.begin(), roots.end(), [](const complex& a, const complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

inline RootSet finish(std::span<const double> coeffs, std::vector<complex> roots, RootMethod method) {
  for (auto& z : roots) z = polish(coeffs, z);
  enforce_conjugate_pairs(roots);
  sort_roots(roots);
  RootSet out;
  out.method = method;
  out.roots = std::move(roots);
  for (const auto& z : out.roots) out.residuals.push_back(normalized_residual(coeffs, z));
  return out;
}

inline std::vector<double> monic(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs.front() == 0.0) throw domain_error("polynomial: leading coefficient is zero");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  const double lead = out.front();
  for (double& c : out) c /= lead;
  return out;
}

inline double max_residual(const std::vector<complex>& roots, std::span<const double> coeffs) {
  double worst = 0.0;
  for (const auto& z : roots) worst = std::max(worst, normalized_residual(coeffs, z));
  return worst;
}

inline complex cube_root_of_unity(int power) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(power % 3) / 3.0;
  return {std::cos(angle), std::sin(angle)};
}

// Cardano for the monic depressed cubic y^3 + p y + q; u v = -p/3 enforced.
inline std::array<complex, 3> depressed_cubic(double p, double q) {
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  complex u;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // take the radicand of larger magnitude for stability
    const double rad = -q / 2.0 + (q <= 0.0 ? s : -s);
    u = complex{std::cbrt(rad), 0.0};
  } else {
    u = std::pow(complex{-q / 2.0, std::sqrt(-disc)}, 1.0 / 3.0);
  }
  complex v = std::abs(u) == 0.0 ? complex{0.0, 0.0} : -p / (3.0 * u);
  std::array<complex, 3> y;
  for (int k = 0; k < 3; ++k) y[k] = cube_root_of_unity(k) * u + cube_root_of_unity(3 - k) * v;
  return y;
}

inline std::vector<complex> standard_cubic(std::span<const double> m) {
  const double b = m[1], c = m[2], d = m[3];
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const auto y = depressed_cubic(p, q);
  return {y[0] - b / 3.0, y[1] - b / 3.0, y[2] - b / 3.0};
}

}  // namespace detail

/// Cubic roots. The closed form is first evaluated as
///   xi^3 - A xi^2 + (B-A) xi - C,  p = B-A-A^2/3,  q = -2A^3/27 - C + A(B-A)/3,
///   xi_k = A/3 + j^k cbrt(-q/2 + sqrt(D)) + j^{|k-3|} cbrt(-q/2 - sqrt(D)),
/// with independent cube roots; if that misses the residual target the
/// u v = -p/3 convention is used instead and the switch is noted.
inline RootSet cardano(std::span<const double> coefficients) {
  if (coefficients.size() != 4) throw domain_error("cardano: expects 4 coefficients");
  const auto m = detail::monic(coefficients);
  const double A = -m[1];
  const double B = m[2] + A;
  const double C = -m[3];
  const double p = B - A - A * A / 3.0;
  const double q = -2.0 * A * A * A / 27.0 - C + A * (B - A) / 3.0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  complex u;
  complex v;
  if (disc >= 0.0) {
    u = complex{std::cbrt(-q / 2.0 + std::sqrt(disc)), 0.0};
    v = complex{std::cbrt(-q / 2.0 - std::sqrt(disc)), 0.0};
  } else {
    u = std::pow(complex{-q / 2.0, std::sqrt(-disc)}, 1.0 / 3.0);
    v = std::pow(complex{-q / 2.0, -std::sqrt(-disc)}, 1.0 / 3.0);
  }
  std::vector<complex> roots;
  for (int k = 0; k < 3; ++k)
    roots.push_back(A / 3.0 + detail::cube_root_of_unity(k) * u + detail::cube_root_of_unity(std::abs(k - 3)) * v);
  std::string notes;
  if (detail::max_residual(roots, m) > 1e-9) {
    roots = detail::standard_cubic(m);
    notes = "stated cube-root pairing failed the residual check; used u*v = -p/3";
  }
  RootSet out = detail::finish(m, std::move(roots), RootMethod::cardano);
  out.notes = notes;
  return out;
}

/// Quartic roots. The stated resolvent route is tried first; when it misses
/// the residual target (its q and r carry sign slips) the standard Ferrari
/// reduction with the largest real resolvent root is used and noted.
inline RootSet ferrari(std::span<const double> coefficients) {
  if (coefficients.size() != 5) throw domain_error("ferrari: expects 5 coefficients");
  const auto m = detail::monic(coefficients);
  const double A = -m[1];
  const double B = m[2] + 3.0 * A;
  const double C = -m[3] + B - 2.0 * A;
  const double D = m[4];

  std::vector<complex> roots;
  {
    const double p = B - 3.0 * A - 3.0 * A * A / 8.0;
    const double q = A * A * A / 8.0 + A * (B - 3.0 * A) / 2.0 + C - B + 2.0 * A;
    const double r = -3.0 * A * A * A * A / 256.0 + (B - 3.0 * A) * A * A / 16.0 +
                     (C - B + 2.0 * A) * A / 4.0 + D;
    const double p1 = -r - p * p / 12.0;
    const double q1 = -p * p * p / 108.0 + (4.0 * r * p - q * q) / 8.0 - p * r / 6.0;
    const auto w = detail::depressed_cubic(p1, q1);
    double zeta = -std::numeric_limits<double>::infinity();
    for (const auto& z : w)
      if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) zeta = std::max(zeta, z.real() + p / 6.0);
    if (std::isfinite(zeta)) {
      const complex outer = 0.5 * std::sqrt(complex{2.0 * zeta - p, 0.0});
      const complex inner = std::sqrt(complex{zeta * zeta - r, 0.0});
      for (int k = 0; k < 4; ++k) {
        const double s1 = (k % 2 == 0) ? 1.0 : -1.0;
        const double s2 = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        roots.push_back(A / 4.0 + outer + s1 * std::sqrt(zeta / 2.0 - p / 4.0 + s2 * inner));
      }
    }
  }
  std::string notes;
  if (roots.size() != 4 || detail::max_residual(roots, m) > 1e-9) {
    notes = "stated resolvent form failed the residual check; used standard Ferrari";
    roots.clear();
    const double b3 = m[1], b2 = m[2], b1 = m[3], b0 = m[4];
    const double p = b2 - 3.0 * b3 * b3 / 8.0;
    const double q = b3 * b3 * b3 / 8.0 - b3 * b2 / 2.0 + b1;
    const double r = -3.0 * b3 * b3 * b3 * b3 / 256.0 + b3 * b3 * b2 / 16.0 - b3 * b1 / 4.0 + b0;
    const double shift = -b3 / 4.0;
    const double scale = std::max({1.0, std::abs(p), std::sqrt(std::abs(r))});
    if (std::abs(q) <= 1e-14 * scale * std::sqrt(scale)) {
      const complex disc = std::sqrt(complex{p * p - 4.0 * r, 0.0});
      for (const complex& y2 : {(-p + disc) / 2.0, (-p - disc) / 2.0}) {
        const complex y = std::sqrt(y2);
        roots.push_back(shift + y);
        roots.push_back(shift - y);
      }
    } else {
      // resolvent m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0
      const std::array<double, 4> res{1.0, p, p * p / 4.0 - r, -q * q / 8.0};
      auto candidates = detail::standard_cubic(res);
      double best = -std::numeric_limits<double>::infinity();
      for (auto& z : candidates) {
        z = detail::polish(res, z);
        if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) best = std::max(best, z.real());
      }
      const complex mm{best, 0.0};
      const complex root2m = std::sqrt(2.0 * mm);
      for (double s : {1.0, -1.0}) {
        const complex inner = std::sqrt(-(2.0 * p + 2.0 * mm + s * std::sqrt(2.0) * q / std::sqrt(mm)));
        roots.push_back(shift + (s * root2m + inner) / 2.0);
        roots.push_back(shift + (s * root2m - inner) / 2.0);
      }
    }
  }
  RootSet out = detail::finish(m, std::move(roots), RootMethod::ferrari);
  out.notes = notes;
  return out;
}

inline RootSet quadratic_roots(std::span<const double> coefficients) {
  if (coefficients.size() != 3) throw domain_error("quadratic: expects 3 coefficients");
  const auto m = detail::monic(coefficients);
  const double b = m[1], c = m[2];
  const double disc = b * b - 4.0 * c;
  std::vector<complex> roots;
  if (disc >= 0.0) {
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    roots = {complex{q, 0.0}, complex{q == 0.0 ? 0.0 : c / q, 0.0}};
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    roots = {complex{-b / 2.0, im}, complex{-b / 2.0, -im}};
  }
  return detail::finish(m, std::move(roots), RootMethod::quadratic);
}

struct AberthOptions {
  int max_iterations = 200;
  double residual_target = 1e-11;
};

/// Aberth-Ehrlich simultaneous iteration from the given initial guesses.
inline RootSet aberth(std::span<const double> coefficients, std::vector<complex> z,
                      const AberthOptions& options = {}) {
  const auto m = detail::monic(coefficients);
  const std::size_t n = m.size() - 1;
  if (n < 1) throw domain_error("aberth: degree must be at least 1");
  if (z.size() != n) throw domain_error("aberth: need one initial guess per root");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (z[i] == z[j]) throw domain_error("aberth: initial guesses must be pairwise distinct");

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double largest_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto h = detail::horner(m, z[i]);
      if (std::abs(h.value) == 0.0) continue;
      const complex ratio = h.value / h.derivative;
      complex repulsion{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      const complex step = ratio / (1.0 - ratio * repulsion);
      if (!detail::is_finite(step)) continue;
      z[i] -= step;
      largest_step = std::max(largest_step, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    if (largest_step <= 1e-15 && detail::max_residual(z, m) <= options.residual_target) {
      ++iter;
      break;
    }
  }
  RootSet out = detail::finish(m, std::move(z), RootMethod::aberth);
  out.iterations = iter;
  const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
  if (worst > options.residual_target) {
    std::ostringstream msg;
    msg << "aberth: no convergence after " << iter << " iterations; residuals:";
    for (double r : out.residuals) msg << ' ' << r;
    throw convergence_error(msg.str());
  }
  return out;
}

inline RootSet aberth(const ParameterPolynomial& poly, std::vector<complex> initial,
                      const AberthOptions& options = {}) {
  return aberth(poly.coefficients, std::move(initial), options);
}

/// Circle of radius mean(alpha) centred at mean(alpha)+1, with a slight
/// angular offset and radial jitter so no guess sits on the real axis.
inline std::vector<complex> circle_initial_guesses(std::span<const double> alphas, int degree) {
  double mean = 0.0;
  for (double a : alphas) mean += a;
  mean /= static_cast<double>(alphas.size());
  std::vector<complex> z;
  for (int i = 0; i < degree; ++i) {
    const double angle = 2.0 * std::numbers::pi * (i + 0.25) / degree + 0.05 * i / degree;
    const double radius = mean * (1.0 + 0.01 * i);
    z.push_back(complex{mean + 1.0, 0.0} + std::polar(radius, angle));
  }
  return z;
}

/// Sequential recipe: sort alphas, start root 1 at alpha_1 and root i at
/// max(c_{i-1}, alpha_i); each root is refined by Newton on the polynomial
/// deflated (implicitly) by the roots found so far.
inline std::vector<complex> sequential_initial_guesses(std::span<const double> coefficients,
                                                       std::span<const double> alphas) {
  const auto m = detail::monic(coefficients);
  const int degree = static_cast<int>(m.size()) - 1;
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<complex> found;
  for (int i = 0; i < degree; ++i) {
    const double base = sorted[std::min<std::size_t>(i, sorted.size() - 1)];
    const double start = found.empty() ? base : std::max(found.back().real(), base);
    complex z{start, 0.1 * (i + 1)};
    for (int it = 0; it < 100; ++it) {
      const auto h = detail::horner(m, z);
      if (std::abs(h.value) == 0.0) break;
      complex logd = h.derivative / h.value;
      for (const auto& r : found) logd -= 1.0 / (z - r);
      const complex step = 1.0 / logd;
      if (!detail::is_finite(step)) break;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    for (const auto& r : found)
      if (std::abs(z - r) < 1e-12) z += complex{1e-3, 1e-3};
    found.push_back(z);
  }
  return found;
}

/// Sign alternations in the coefficient sequence (zeros skipped).
inline int descartes_sign_bound(std::span<const double> coefficients) {
  int changes = 0;
  int last = 0;
  for (double c : coefficients) {
    const int sign = (c > 0.0) - (c < 0.0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

inline int descartes_sign_bound(const ParameterPolynomial& poly) {
  return descartes_sign_bound(poly.coefficients);
}

/// Largest distance between two root multisets under a greedy nearest match,
/// relative to max(1, |root|).
inline double root_set_distance(const std::vector<complex>& a, const std::vector<complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& x : a) {
    std::size_t best = b.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]) / std::max(1.0, std::abs(x));
      if (d < dist) {
        dist = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, dist);
  }
  return worst;
}

namespace detail {

/// Newton on G(x) = prod (x + alpha_j) - prod alpha_j with x = 1 - c. The
/// product form avoids the cancellation of the expanded coefficients, which
/// limits root accuracy once the alphas are small and k is large.
inline complex polish_product_form(std::span<const double> alphas, complex c, int steps = 4) {
  double g0 = 1.0;
  for (double a : alphas) g0 *= a;
  auto eval = [&](complex x, complex& deriv) {
    complex f{1.0, 0.0};
    complex log_deriv{0.0, 0.0};
    for (double a : alphas) {
      f *= x + a;
      log_deriv += 1.0 / (x + a);
    }
    deriv = f * log_deriv;
    return f - g0;
  };
  complex x = 1.0 - c;
  complex d;
  double best = std::abs(eval(x, d));
  for (int i = 0; i < steps && best > 0.0; ++i) {
    const complex step = eval(x, d) / d;
    if (!is_finite(step)) break;
    complex trial_d;
    const double trial = std::abs(eval(x - step, trial_d));
    if (!(trial < best)) break;
    x -= step;
    best = trial;
  }
  return 1.0 - x;
}

}  // namespace detail

/// Report-only comparison of solved parameters against the sorted alphas:
/// each real root and each complex pair (real part and modulus) is checked
/// against the alphas with the maximum removed.
inline std::string validity_diagnostic(std::span<const double> alphas, const std::vector<complex>& roots) {
  std::vector<double> sorted(alphas.begin(), alphas.end());
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) sorted.pop_back();
  std::ostringstream out;
  std::size_t slot = 0;
  bool all_ok = true;
  for (const auto& c : roots) {
    if (c.imag() < 0.0) continue;
    const double ref = slot < sorted.size() ? sorted[slot] : 0.0;
    const bool ok = c.imag() == 0.0 ? c.real() > ref : (c.real() > ref && std::abs(c) > ref);
    all_ok = all_ok && ok;
    ++slot;
  }
  out << (all_ok ? "real parts/moduli exceed the sorted non-maximal alphas"
                 : "some real part/modulus does not exceed its sorted alpha");
  return out.str();
}

/// Unknown denominator parameters c_1..c_{k-1} for B ~ Gamma(1).
///
/// Degree 1 and 2 use direct formulas, 3 Cardano, 4 Ferrari, >= 5 Aberth.
/// For degrees 2..4 Aberth runs as well and both must agree within 1e-9.
inline RootSet solve_c(std::span<const double> alphas) {
  const ParameterPolynomial poly = parameter_polynomial(alphas);
  const int degree = poly.degree();
  const std::span<const double> coeffs(poly.coefficients);

  auto run_aberth = [&]() {
    try {
      return aberth(poly, circle_initial_guesses(alphas, degree));
    } catch (const convergence_error&) {
      return aberth(poly, sequential_initial_guesses(coeffs, alphas));
    }
  };

  RootSet out;
  if (degree == 0) {
    out.method = RootMethod::linear;
  } else if (degree == 1) {
    out = detail::finish(coeffs, {complex{-coeffs[1], 0.0}}, RootMethod::linear);
  } else if (degree >= 5) {
    out = run_aberth();
  } else {
    out = degree == 2 ? quadratic_roots(coeffs) : degree == 3 ? cardano(coeffs) : ferrari(coeffs);
    const RootSet check = run_aberth();
    if (root_set_distance(out.roots, check.roots) > 1e-9)
      throw solver_disagreement_error("solve_c: closed form and Aberth disagree");
  }
  if (degree >= 2) {
    for (auto& z : out.roots) z = detail::polish_product_form(alphas, z);
    detail::enforce_conjugate_pairs(out.roots);
    detail::sort_roots(out.roots);
    out.residuals.clear();
    for (const auto& z : out.roots) out.residuals.push_back(normalized_residual(coeffs, z));
  }
  std::string diag = validity_diagnostic(alphas, out.roots);
  out.notes = out.notes.empty() ? diag : out.notes + "; " + diag;
  return out;
}

}  // namespace dufresne
