#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dufresne/law.hpp"
#include "dufresne/shotnoise.hpp"
#include "dufresne/stationary.hpp"
#include "dufresne/verifier.hpp"
#include "oracle.hpp"

using namespace dufresne;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Law u2_law(double a, double b) {
  const double rho = u2_rho(a, b);
  return Law::real({a + rho, b + rho}, {a + b + 1.0}, {-rho});
}

std::vector<Law> sample_laws() {
  return {
      Law::real({1.0, 1.0}, {3.0}),
      Law::real({2.0, 3.0}, {6.0}),
      Law::real({0.4}, {}),
      Law::real({1.0, 2.0}, {4.0}),
      Law({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {{3.0, 0.0}, {2.0, 1.0}, {2.0, -1.0}}),
      Law({{0.7, 0.0}, {1.3, 0.0}, {2.2, 0.0}}, {{3.1, 0.8}, {3.1, -0.8}}),
      u2_law(1.0, 1.0),
      u2_law(1.2, 1.0),
      u2_law(0.5, 3.0),
  };
}

}  // namespace

TEST(Mellin, GammaMoments) { EXPECT_LT(rel(mellin(Law::real({2.0}, {}), 3.0), 24.0), 1e-13); }

TEST(Mellin, IdenticalListsCancel) {
  const Law law = Law::real({1.7, 0.4}, {0.4, 1.7});
  for (double s : {0.0, 0.5, 1.0, 2.3, 7.0}) EXPECT_NEAR(mellin(law, s), 1.0, 1e-13);
}

TEST(Mellin, FirstMomentOfOneOneThree) { EXPECT_LT(rel(mellin(Law::real({1.0, 1.0}, {3.0}), 1.0), 1.0 / 3.0), 1e-13); }

TEST(Mellin, FractionalOrderAgainstGammaFunction) {
  // E[X^s] for X ~ Gamma(a) is Gamma(a+s)/Gamma(a)
  const double a = 1.7;
  for (double s : {0.25, 0.5, 1.5, 3.3})
    EXPECT_LT(rel(mellin(Law::real({a}, {}), s), std::tgamma(a + s) / std::tgamma(a)), 1e-12);
}

TEST(Mellin, AdditiveGammaRequiresIntegerOrder) {
  EXPECT_THROW(mellin(u2_law(1.0, 1.0), 0.5), domain_error);
  EXPECT_NO_THROW(mellin(u2_law(1.0, 1.0), 3.0));
}

TEST(Mellin, PoleDetected) { EXPECT_THROW(mellin(Law::real({1.0}, {-2.0}), 1.0), pole_error); }

TEST(Law, RejectsUnpairedComplexParameters) {
  EXPECT_THROW(Law({{1.0, 1.0}}, {}), parameter_error);
  EXPECT_THROW(Law::real({1.0}, {}, {-0.5}), parameter_error);
  EXPECT_THROW(Law::real({std::nan("")}, {}), parameter_error);
}

TEST(Moment, PochhammerValues) {
  EXPECT_DOUBLE_EQ(moment(Law::real({2.0}, {}), 2), 6.0);
  EXPECT_LT(rel(moment(Law::real({1.0, 1.0}, {3.0}), 2), 1.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(moment(Law::real({2.0}, {}), 0), 1.0);
}

TEST(Moment, UTwoLawMatchesRecursion) {
  const Law law = u2_law(1.0, 1.0);
  const auto m = oracle::stationary_moments({1.0, 1.0}, 2.0, 5);
  EXPECT_LT(rel(moment(law, 1), static_cast<double>(m[1])), 1e-12);
}

TEST(Moment, ComplexParametersGiveRealMoments) {
  const Law law({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {{3.0, 0.0}, {2.0, 1.0}, {2.0, -1.0}});
  for (unsigned n = 1; n <= 20; ++n)
    EXPECT_LT(rel(moment(law, n), static_cast<double>(oracle::pochhammer_ratio(law.numerator(), law.denominator(), n))),
              1e-13);
}

TEST(Moment, OverflowDetected) {
  EXPECT_THROW(moment(Law::real({1e30}, {}), 20), overflow_error);
  EXPECT_THROW(moment(Law::real({1.0}, {}), 61), domain_error);
}

TEST(Moment, EqualsMellinAtIntegers) {
  for (const Law& law : sample_laws())
    for (unsigned n = 1; n <= 20; ++n) EXPECT_LT(rel(moment(law, n), mellin(law, n)), 1e-10) << n;
}

TEST(Laplace, GammaClosedForm) { EXPECT_LT(rel(laplace(Law::real({2.0}, {}), 1.0), 0.25), 1e-15); }

TEST(Laplace, NormalizedAtZero) {
  for (const Law& law : sample_laws()) EXPECT_NEAR(laplace(law, 0.0), 1.0, 1e-15);
}

TEST(Laplace, UTwoLawAgainstTaylorSeries) {
  const double rho = u2_rho(1.0, 1.0);
  const double s = 0.5;
  const double closed = std::pow(1.0 + s, rho) * pfq({1.0 + rho, 1.0 + rho}, {3.0}, -s);
  EXPECT_LT(rel(laplace(u2_law(1.0, 1.0), s), closed), 1e-13);
  const auto m = oracle::stationary_moments({1.0, 1.0}, 2.0, 40);
  long double series = 0.0L;
  long double factor = 1.0L;
  for (int n = 0; n <= 40; ++n) {
    if (n > 0) factor *= -s / n;
    series += factor * m[n];
  }
  EXPECT_LT(rel(closed, static_cast<double>(series)), 1e-9);
}

TEST(Laplace, CompletelyMonotone) {
  const double h = 0.02;
  for (const Law& law : sample_laws()) {
    for (double s = 0.0; s <= 0.8 - 3 * h + 1e-12; s += 0.05) {
      const double f0 = laplace(law, s);
      const double f1 = laplace(law, s + h);
      const double f2 = laplace(law, s + 2 * h);
      const double f3 = laplace(law, s + 3 * h);
      EXPECT_LT(f1 - f0, 0.0);
      EXPECT_GT(f2 - 2 * f1 + f0, 0.0);
      EXPECT_LT(f3 - 3 * f2 + 3 * f1 - f0, 0.0);
    }
  }
}

TEST(Laplace, NegativeArgumentRejected) { EXPECT_THROW(laplace(Law::real({1.0}, {}), -0.1), domain_error); }

TEST(Density, UnitExponential) { EXPECT_LT(rel(density(Law::real({1.0}, {}), 1.0), std::exp(-1.0)), 1e-14); }

TEST(Density, NormalizesForOneTwoFour) {
  const Law law = Law::real({1.0, 2.0}, {4.0});
  const double mass = dufresne::detail::integrate_positive_axis([&](double x) { return density(law, x); });
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Density, FirstMomentByQuadrature) {
  const Law law = Law::real({2.0, 3.0}, {6.0});
  const double m1 = dufresne::detail::integrate_positive_axis([&](double x) { return x * density(law, x); });
  EXPECT_NEAR(m1, 1.0, 1e-6);
}

TEST(Density, QuadratureMomentsMatchMellin) {
  for (const Law& law : {Law::real({1.0, 1.0}, {3.0}), Law::real({2.5, 0.8}, {4.3})}) {
    const double mass = dufresne::detail::integrate_positive_axis([&](double x) { return density(law, x); });
    EXPECT_NEAR(mass, 1.0, 1e-6);
    for (unsigned n : {1u, 2u}) {
      const double q = dufresne::detail::integrate_positive_axis(
          [&](double x) { return std::pow(x, n) * density(law, x); });
      EXPECT_LT(rel(q, moment(law, n)), 1e-5) << n;
    }
  }
}

TEST(Density, AdditiveGammaComponentNormalizes) {
  const Law law = u2_law(1.2, 1.0);
  const double mass = dufresne::detail::integrate_positive_axis([&](double x) { return density(law, x); }, 1e-9);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(Density, ConvolutionAgainstIndependentOracle) {
  const Law law = Law::real({2.5, 0.8}, {4.3});
  for (double x : {0.05, 0.3, 1.0, 3.0}) EXPECT_LT(rel(density(law, x), oracle::beta_gamma_density(2.5, 0.8, x)), 1e-6);
}

TEST(Density, ComplexParametersUnsupported) {
  const Law law({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {{2.5, 0.8660254037844386}, {2.5, -0.8660254037844386}});
  EXPECT_THROW(density(law, 1.0), unsupported_error);
}

TEST(Sample, UnitExponentialMean) {
  Stream stream(1);
  const auto x = sample(Law::real({1.0}, {}), stream, 100000);
  const auto m = empirical_moments(x, 1);
  EXPECT_LT(std::abs(m[0].value - 1.0), 4.0 * m[0].stderr_);
}

TEST(Sample, BetaTimesGammaFirstMoment) {
  Stream stream(2);
  const auto x = sample(Law::real({1.0, 1.0}, {3.0}), stream, 100000);
  const auto m = empirical_moments(x, 1);
  EXPECT_LT(std::abs(m[0].value - 1.0 / 3.0), 4.0 * m[0].stderr_);
}

TEST(Sample, UTwoLawInsideSamplableRegion) {
  const Law law = u2_law(1.2, 1.0);
  const SamplerPlan plan = make_sampler_plan(law);
  for (auto [a, b] : plan.beta_factors) EXPECT_GT(b, 0.0);
  Stream stream(3);
  const auto x = sample(law, stream, 200000);
  const auto m = empirical_moments(x, 1);
  EXPECT_LT(std::abs(m[0].value - moment(law, 1)), 4.0 * m[0].stderr_);
}

TEST(Sample, OutsideSamplableRegionStillHasMoments) {
  // max >= min + 1 puts min + rho below zero
  const Law law = u2_law(0.5, 3.0);
  EXPECT_FALSE(law.is_proper());
  EXPECT_THROW(make_sampler_plan(law), not_samplable_error);
  const auto m = oracle::stationary_moments({0.5, 3.0}, 2.0, 10);
  for (unsigned n = 1; n <= 10; ++n) EXPECT_LT(rel(moment(law, n), static_cast<double>(m[n])), 1e-10);
}

TEST(Sample, ComplexLawNotSamplable) {
  const Law law({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {{2.5, 0.8660254037844386}, {2.5, -0.8660254037844386}});
  Stream stream(4);
  EXPECT_THROW(sample(law, stream, 10), not_samplable_error);
}

TEST(Sample, PairingMaximizesSmallestGap) {
  // gaps (3-1, 2.5-2) = (2, 0.5) versus (3-2, 2.5-1) = (1, 1.5): the second wins
  const SamplerPlan plan = make_sampler_plan(Law::real({1.0, 2.0}, {3.0, 2.5}));
  double smallest = 1e9;
  for (auto [a, b] : plan.beta_factors) smallest = std::min(smallest, b);
  EXPECT_DOUBLE_EQ(smallest, 1.0);
  EXPECT_LT(std::abs(plan_mellin(plan, 1.7) - mellin(Law::real({1.0, 2.0}, {3.0, 2.5}), 1.7)), 1e-13);
}

TEST(Sample, MomentsWithinFiveStandardErrors) {
  const std::vector<Law> laws{Law::real({1.0, 1.0}, {3.0}), Law::real({2.0, 0.7, 1.5}, {3.5, 2.0}), u2_law(1.0, 1.0)};
  std::uint64_t seed = 100;
  for (const Law& law : laws) {
    Stream stream(seed++);
    const auto x = sample(law, stream, 1000000);
    for (const auto& m : empirical_moments(x, 4))
      EXPECT_LT(std::abs(m.value - moment(law, m.order)), 5.0 * m.stderr_) << m.order;
  }
}
