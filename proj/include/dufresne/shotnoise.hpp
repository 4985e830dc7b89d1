#pragma once

// Monte Carlo engines for the affine chain, the shot-noise process and its
// triggered (period-k) variant, plus empirical-vs-analytic comparison.
//
// Every replica owns Stream::derive(seed, replica); outputs are indexed by
// replica, so they are bit-identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dufresne/errors.hpp"
#include "dufresne/law.hpp"
#include "dufresne/random.hpp"
#include "dufresne/stationary.hpp"
#include "json.hpp"

namespace dufresne {

/// Terminal X_steps of X_n = A_n (X_{n-1} + B_n), X_0 = 0, one per replica.
inline std::vector<double> simulate_chain(const ChainSpec& spec, int steps, std::size_t replicas,
                                          std::uint64_t seed, unsigned threads = 0) {
  spec.validate();
  if (steps < 1 || replicas < 1) throw domain_error("simulate_chain: steps and replicas must be >= 1");
  std::vector<double> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Stream stream = Stream::derive(seed, i);
    double x = 0.0;
    for (int n = 0; n < steps; ++n) {
      double a = 1.0;
      for (double alpha : spec.alphas) a *= stream.beta_a1(alpha);
      x = a * (x + stream.gamma(spec.u));
    }
    out[i] = x;
  });
  return out;
}

/// Z(t_max) = sum_{T_i <= t_max} B_i exp(-p (t_max - T_i)) over Poisson(lambda)
/// arrivals, B_i ~ Gamma(b_shape), one value per replica.
inline std::vector<double> simulate_shot_noise(double lambda, double p, double b_shape, double t_max,
                                               std::uint64_t seed, std::size_t replicas, unsigned threads = 0) {
  if (!(lambda > 0.0) || !(p > 0.0) || !(b_shape > 0.0))
    throw domain_error("simulate_shot_noise: rate, decay and shape must be positive");
  if (!(std::exp(-p * t_max) < 1e-8)) throw domain_error("simulate_shot_noise: t_max too short for burn-in");
  std::vector<double> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Stream stream = Stream::derive(seed, i);
    double z = 0.0;
    double t = 0.0;
    for (;;) {
      const double dt = stream.exponential() / lambda;
      if (t + dt > t_max) {
        z *= std::exp(-p * (t_max - t));
        break;
      }
      t += dt;
      z = z * std::exp(-p * dt) + stream.gamma(b_shape);
    }
    out[i] = z;
  });
  return out;
}

struct ShotNoiseConfig {
  double lambda = 1.0;
  std::vector<double> decays;  // p_1..p_k, applied in rotation
  double b_shape = 1.0;
  int cycles = 100;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  int record_every = 0;  // 0: terminal value only; otherwise every n-th cycle after burn-in
  double burn_in = 0.2;

  void validate() const {
    if (!(lambda > 0.0) || decays.empty() || !(b_shape > 0.0))
      throw domain_error("ShotNoiseConfig: lambda, decays and b_shape must be positive");
    for (double p : decays)
      if (!(p > 0.0)) throw domain_error("ShotNoiseConfig: decays must be positive");
    if (cycles < 100) throw domain_error("ShotNoiseConfig: at least 100 cycles are required");
    if (replicas < 1) throw domain_error("ShotNoiseConfig: replicas must be >= 1");
  }

  /// Chain parameters: lambda/p_j (or p_j/lambda under the alternate convention).
  ChainSpec chain_spec(bool flip_convention = false) const {
    std::vector<double> alphas;
    for (double p : decays) alphas.push_back(flip_convention ? p / lambda : lambda / p);
    return ChainSpec(alphas, b_shape);
  }
};

/// Triggered shot noise: a jump B ~ Gamma(b_shape) enters at the first
/// arrival of each cycle, and the j-th inter-arrival interval of the cycle
/// decays at rate p_j. The process is observed at cycle ends, just before the
/// next jump.
inline std::vector<double> simulate_triggered(const ShotNoiseConfig& config, unsigned threads = 0) {
  config.validate();
  const int burn = static_cast<int>(std::ceil(config.burn_in * config.cycles));
  std::vector<int> record_at;
  if (config.record_every <= 0) {
    record_at.push_back(config.cycles);
  } else {
    for (int c = burn + config.record_every; c <= config.cycles; c += config.record_every) record_at.push_back(c);
  }
  const std::size_t per_path = record_at.size();
  std::vector<double> out(config.replicas * per_path);
  parallel_for(config.replicas, threads, [&](std::size_t i) {
    Stream stream = Stream::derive(config.seed, i);
    double z = 0.0;
    std::size_t next = 0;
    for (int c = 1; c <= config.cycles; ++c) {
      z += stream.gamma(config.b_shape);
      for (double p : config.decays) z *= std::exp(-p * stream.exponential() / config.lambda);
      if (next < per_path && record_at[next] == c) out[i * per_path + next++] = z;
    }
  });
  return out;
}

// Statistics ---------------------------------------------------------------------

struct EmpiricalMoment {
  int order = 0;
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Sample moments n = 1..max_order with delete-one jackknife standard errors.
inline std::vector<EmpiricalMoment> empirical_moments(const std::vector<double>& samples, int max_order = 4) {
  const std::size_t n = samples.size();
  if (n < 2) throw domain_error("empirical_moments: need at least two samples");
  std::vector<EmpiricalMoment> out;
  std::vector<double> powers(n);
  for (int k = 1; k <= max_order; ++k) {
    for (std::size_t i = 0; i < n; ++i) powers[i] = std::pow(samples[i], k);
    const double total = pairwise_sum(powers);
    const double mean = total / static_cast<double>(n);
    // leave-one-out means: (total - x_i)/(n-1)
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double loo = (total - powers[i]) / static_cast<double>(n - 1);
      dev[i] = (loo - mean) * (loo - mean);
    }
    const double var = static_cast<double>(n - 1) / static_cast<double>(n) * pairwise_sum(dev);
    out.push_back({k, mean, std::sqrt(var)});
  }
  return out;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw domain_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Large-sample critical value c(alpha) sqrt((n+m)/(n m)), c = sqrt(-ln(alpha/2)/2).
inline double ks_critical(std::size_t n, std::size_t m, double alpha = 0.01) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

struct SimReport {
  std::size_t sample_count = 0;
  std::vector<EmpiricalMoment> empirical_moments;
  std::vector<double> reference_moments;  // analytic (or second-sample) values, same orders
  std::vector<double> z_scores;
  std::optional<double> ks_statistic;
  std::optional<double> ks_critical;
  nlohmann::json seeds = nlohmann::json::object();

  double max_abs_z() const {
    double m = 0.0;
    for (double z : z_scores) m = std::max(m, std::abs(z));
    return m;
  }
  bool ks_passed() const { return !ks_statistic || *ks_statistic < *ks_critical; }
};

inline nlohmann::json to_json(const SimReport& r) {
  nlohmann::json moments = nlohmann::json::array();
  for (std::size_t i = 0; i < r.empirical_moments.size(); ++i) {
    const auto& m = r.empirical_moments[i];
    nlohmann::json entry{{"n", m.order}, {"value", m.value}, {"stderr", m.stderr_}};
    if (i < r.reference_moments.size()) entry["reference"] = r.reference_moments[i];
    if (i < r.z_scores.size()) entry["z"] = r.z_scores[i];
    moments.push_back(entry);
  }
  nlohmann::json j{{"sample_count", r.sample_count}, {"empirical_moments", moments}, {"seeds", r.seeds}};
  j["ks_statistic"] = r.ks_statistic ? nlohmann::json(*r.ks_statistic) : nlohmann::json(nullptr);
  j["ks_critical"] = r.ks_critical ? nlohmann::json(*r.ks_critical) : nlohmann::json(nullptr);
  return j;
}

inline constexpr std::size_t reference_draws = 1000000;

/// Samples against an analytic law: moment z-scores for n = 1..4 and, when
/// the law is samplable, a two-sample KS test against 10^6 direct draws.
inline SimReport compare(const std::vector<double>& samples, const Law& reference, std::uint64_t reference_seed,
                         int max_order = 4) {
  if (samples.size() < 1000) throw domain_error("compare: at least 1000 samples are required");
  SimReport r;
  r.sample_count = samples.size();
  r.empirical_moments = empirical_moments(samples, max_order);
  for (const auto& m : r.empirical_moments) {
    const double ref = moment(reference, m.order);
    r.reference_moments.push_back(ref);
    r.z_scores.push_back((m.value - ref) / m.stderr_);
  }
  if (reference.all_real()) {
    try {
      Stream stream(reference_seed);
      const auto direct = sample(reference, stream, reference_draws);
      r.ks_statistic = ks_two_sample(samples, direct);
      r.ks_critical = ks_critical(samples.size(), direct.size());
      r.seeds["reference"] = reference_seed;
    } catch (const not_samplable_error&) {
      // moment z-scores only
    }
  }
  return r;
}

/// Samples against oracle moments (for chains without a closed-form law).
inline SimReport compare(const std::vector<double>& samples, const std::vector<double>& oracle_moments,
                         int max_order = 4) {
  if (samples.size() < 1000) throw domain_error("compare: at least 1000 samples are required");
  SimReport r;
  r.sample_count = samples.size();
  r.empirical_moments = empirical_moments(samples, max_order);
  for (const auto& m : r.empirical_moments) {
    const double ref = oracle_moments.at(m.order);
    r.reference_moments.push_back(ref);
    r.z_scores.push_back((m.value - ref) / m.stderr_);
  }
  return r;
}

/// Two sample sets: KS statistic plus z-scores of the moment differences.
inline SimReport compare_samples(const std::vector<double>& samples, const std::vector<double>& other,
                                 int max_order = 4) {
  if (samples.size() < 1000 || other.size() < 1000)
    throw domain_error("compare: at least 1000 samples are required");
  SimReport r;
  r.sample_count = samples.size();
  r.empirical_moments = empirical_moments(samples, max_order);
  const auto theirs = empirical_moments(other, max_order);
  for (std::size_t i = 0; i < theirs.size(); ++i) {
    r.reference_moments.push_back(theirs[i].value);
    const double se = std::hypot(r.empirical_moments[i].stderr_, theirs[i].stderr_);
    r.z_scores.push_back(se > 0.0 ? (r.empirical_moments[i].value - theirs[i].value) / se : 0.0);
  }
  r.ks_statistic = ks_two_sample(samples, other);
  r.ks_critical = ks_critical(samples.size(), other.size());
  return r;
}

}  // namespace dufresne
