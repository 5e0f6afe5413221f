#include <gtest/gtest.h>

#include <cmath>

#include "oscsing/errors.hpp"
#include "oscsing/kernel.hpp"

namespace oscsing {
namespace {

// int_{0.5}^{1} exp(-i t^-2) / t dt = (Ci(4) - Ci(1) - i (Si(4) - Si(1))) / 2,
// evaluated with mpmath at 30 digits.
const cdouble kHalfSupportTransform(-0.23919281039394927315, -0.40606003429093502158);

// int_{|x| >= 2 rho(1/y)} |K(x - y) - K(x)| dx for Power(3), eps = 1e-3,
// beta = 0, y = 1e-3: mpmath quad over 400 panels on [R, 1] plus the exact
// tail log(1 / (1 - y)).
constexpr double kSmoothnessAtMilli = 0.042423655694319629871;

KernelSpec power3(double eps, double beta) { return {PhasePair::power(3.0), eps, beta}; }

TEST(KernelEval, UnitPointAndSupport) {
  const auto k = power3(0.1, 0.0);
  const cdouble v = kernel_eval(k, 1.0);
  EXPECT_NEAR(v.real(), std::cos(1.0), 1e-15);
  EXPECT_NEAR(v.imag(), -std::sin(1.0), 1e-15);
  EXPECT_EQ(kernel_eval(k, 0.05), cdouble(0.0, 0.0));
  EXPECT_EQ(kernel_eval(k, 1.0 + 1e-12), cdouble(0.0, 0.0));
  EXPECT_EQ(kernel_eval(k, -0.5), cdouble(0.0, 0.0));
}

TEST(KernelEval, ModulationVanishesAtOne) {
  const cdouble a = kernel_eval(power3(0.1, 1.0), 1.0);
  EXPECT_NEAR(a.real(), std::cos(1.0), 1e-15);
  EXPECT_NEAR(a.imag(), -std::sin(1.0), 1e-15);
}

TEST(KernelEval, ModulusIsReciprocalIndependentOfBeta) {
  for (const auto& p : {PhasePair::power(2.0), PhasePair::power(3.0), PhasePair::exp_flat()}) {
    for (double beta : {0.0, 1.0, -4.0, 8.0}) {
      const KernelSpec k{p, 1e-2, beta};
      for (double x : {1e-2, 0.013, 0.2, 0.77, 1.0}) {
        EXPECT_NEAR(std::abs(kernel_eval(k, x)), 1.0 / x, 1e-12 / x) << p.name() << " beta=" << beta;
      }
    }
  }
}

TEST(KernelEval, MatchesComplexPowerDefinition) {
  const auto p = PhasePair::power(3.0);
  const KernelSpec k{p, 1e-3, 2.5};
  for (double x : {1e-3, 0.02, 0.5}) {
    const cdouble expected = std::exp(cdouble(0.0, p.gamma(x))) * std::pow(cdouble(x, 0.0), cdouble(-1.0, -2.5)) *
                             std::pow(cdouble(p.psi(x), 0.0), cdouble(0.0, 2.5));
    EXPECT_LT(std::abs(kernel_eval(k, x) - expected), 1e-10 * std::abs(expected)) << x;
  }
}

TEST(KernelSpecValidate, RejectsBadTruncation) {
  EXPECT_THROW(power3(0.0, 0.0).validate(), DomainError);
  EXPECT_THROW(power3(1.5, 0.0).validate(), DomainError);
  EXPECT_THROW(power3(0.1, std::nan("")).validate(), DomainError);
  EXPECT_NO_THROW(power3(1.0, 0.0).validate());
}

TEST(KernelFourier, DegenerateSupportIsZero) {
  const auto r = kernel_fourier(power3(1.0, 0.0), 10.0);
  EXPECT_EQ(r.value, cdouble(0.0, 0.0));
}

TEST(KernelFourier, HalfSupportAtZeroFrequency) {
  const auto r = kernel_fourier(power3(0.5, 0.0), 0.0);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value - kHalfSupportTransform), 1e-10);
}

TEST(KernelFourier, MatchesAdaptiveOracle) {
  QuadConfig tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-12;
  for (double beta : {0.0, 3.0}) {
    const auto k = power3(1e-2, beta);
    for (double xi : {-40.0, 5.0, 300.0}) {
      const auto r = kernel_fourier(k, xi);
      const auto oracle = integrate_adaptive(
          [&](double t) { return kernel_eval(k, t) * std::exp(cdouble(0.0, -xi * t)); }, k.eps, 1.0, tight);
      ASSERT_TRUE(r.converged);
      EXPECT_LT(std::abs(r.value - oracle.value), 1e-8) << "beta=" << beta << " xi=" << xi;
    }
  }
}

TEST(KernelFourier, ConjugateSymmetryUnderPhaseReflection) {
  // With beta = 0, conj(K^(-xi)) is the transform at xi of the kernel built
  // from -gamma; compare against the explicit reflected integral.
  const auto k = power3(1e-2, 0.0);
  for (double xi : {7.0, 250.0}) {
    const auto minus = kernel_fourier(k, -xi);
    const auto reflected = integrate_oscillatory([](double t) { return cdouble(1.0 / t, 0.0); },
                                                 [&](double t) { return -k.phase.gamma(t) - xi * t; },
                                                 [&](double t) { return -k.phase.gamma1(t) - xi; }, k.eps, 1.0);
    EXPECT_EQ(std::conj(minus.value), reflected.value) << xi;
  }
}

TEST(KernelFourier, DecaySlopeFollowsStationaryPhase) {
  const auto k = power3(1e-3, 0.0);
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  const int n = 16;
  for (int i = 0; i < n; ++i) {
    const double xi = std::pow(10.0, 2.0 + 2.0 * i / (n - 1));
    const double y = std::log(std::abs(kernel_fourier(k, xi).value));
    const double x = std::log(xi);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.0 / 3.0, 0.1);
}

TEST(DecayBound, ClosedForms) {
  EXPECT_NEAR(decay_bound(power3(1e-3, 0.0), 2000.0), 1.0 / (std::sqrt(6e4) * 0.1), 1e-12);
  EXPECT_NEAR(decay_bound(power3(1e-3, 3.0), 2000.0), 4.0 / (std::sqrt(6e4) * 0.1), 1e-12);
  EXPECT_NEAR(decay_bound(power3(1e-3, 3.0), -2000.0), 4.0 / (std::sqrt(6e4) * 0.1), 1e-12);
  EXPECT_DOUBLE_EQ(decay_bound(power3(1e-3, 0.0), 0.5), 1.0);
  EXPECT_DOUBLE_EQ(decay_bound(power3(1e-3, -2.0), 1.0), 3.0);
}

TEST(SmoothnessIntegral, ZeroShiftIsExactlyZero) {
  const auto r = smoothness_integral(power3(1e-3, 0.0), 0.0);
  EXPECT_EQ(r.value, cdouble(0.0, 0.0));
  EXPECT_TRUE(r.converged);
}

TEST(SmoothnessIntegral, RegressionAtMilliShift) {
  const auto r = smoothness_integral(power3(1e-3, 0.0), 1e-3);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.value.real(), kSmoothnessAtMilli, 1e-8 * kSmoothnessAtMilli);
  EXPECT_EQ(r.value.imag(), 0.0);
}

TEST(SmoothnessIntegral, SymmetricInShiftDirectionForWindow) {
  // The excluded window |x| < 2 rho(1/|y|) and the integrand's support make
  // negative shifts well defined and finite.
  const auto r = smoothness_integral(power3(1e-3, 0.0), -1e-3);
  ASSERT_TRUE(r.converged);
  EXPECT_GT(r.value.real(), 0.0);
  EXPECT_TRUE(std::isfinite(r.value.real()));
}

TEST(SmoothnessIntegral, BoundedAcrossShifts) {
  for (double beta : {0.0, 4.0}) {
    const auto k = power3(1e-3, beta);
    double lo = INFINITY;
    double hi = 0.0;
    for (double y : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const auto r = smoothness_integral(k, y);
      ASSERT_TRUE(r.converged);
      const double v = r.value.real() / (1.0 + std::fabs(beta));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    EXPECT_LE(hi, 50.0 * lo) << beta;
  }
}

TEST(SmoothnessIntegral, RejectsShiftBeyondEta) {
  EXPECT_THROW(smoothness_integral(power3(1e-3, 0.0), 1.0), DomainError);
  EXPECT_THROW(smoothness_integral(power3(1e-3, 0.0), 0.2, {}, 0.1), DomainError);
  EXPECT_NO_THROW(smoothness_integral(power3(1e-3, 0.0), 0.05, {}, 0.1));
}

}  // namespace
}  // namespace oscsing
