#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oscsing/decomposition.hpp"
#include "oscsing/errors.hpp"

namespace oscsing {
namespace {

SampledFunction indicator(double lo, double hi, double x_min, double x_max, double h) {
  auto f = SampledFunction::on_grid(x_min, x_max, h);
  for (std::size_t i = 0; i < f.size(); ++i) f.samples[i] = (f.x(i) >= lo && f.x(i) <= hi) ? 1.0 : 0.0;
  return f;
}

SampledFunction random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto f = SampledFunction::zeros(0.0, 1.0 / static_cast<double>(n), n);
  for (auto& v : f.samples) v = cdouble(g(rng), g(rng));
  return f;
}

TEST(MaximalFunction, IndicatorExample) {
  const double h = 1.0 / 64.0;
  const auto f = indicator(0.0, 1.0, -4.0, 4.0, h);
  const auto m = maximal_function(f);
  EXPECT_EQ(m.mode, MaximalMode::Exact);
  const auto at = [&](double x) { return m.mf.samples[static_cast<std::size_t>(std::llround((x - f.x0) / h))].real(); };
  EXPECT_NEAR(at(2.0), 0.5, 2.0 * h);
  EXPECT_NEAR(at(-1.0), 0.5, 2.0 * h);
  EXPECT_DOUBLE_EQ(at(0.5), 1.0);
  EXPECT_NEAR(at(4.0), 0.25, 2.0 * h);
}

TEST(MaximalFunction, DominatesModulus) {
  const auto f = random_signal(1500, 7);
  for (std::size_t threshold : {std::size_t{1} << 14, std::size_t{0}}) {
    const auto m = maximal_function(f, threshold);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_GE(m.mf.samples[i].real(), std::abs(f.samples[i]));
  }
}

TEST(MaximalFunction, ConstantIsFixed) {
  auto f = SampledFunction::zeros(0.0, 0.01, 300);
  for (auto& v : f.samples) v = cdouble(0.0, -2.5);
  for (std::size_t threshold : {std::size_t{1} << 14, std::size_t{0}}) {
    const auto m = maximal_function(f, threshold);
    for (const auto& v : m.mf.samples) EXPECT_NEAR(v.real(), 2.5, 1e-12);
  }
}

TEST(MaximalFunction, DyadicModeWithinFactorFourOfExact) {
  const auto f = random_signal(2000, 11);
  const auto exact = maximal_function(f);
  const auto dyadic = maximal_function(f, 0);
  EXPECT_EQ(exact.mode, MaximalMode::Exact);
  EXPECT_EQ(dyadic.mode, MaximalMode::Dyadic);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double e = exact.mf.samples[i].real();
    const double d = dyadic.mf.samples[i].real();
    EXPECT_LE(d, e * (1.0 + 1e-12)) << i;
    EXPECT_GE(4.0 * d, e) << i;
  }
}

TEST(MaximalFunction, ExactMatchesBruteForce) {
  const auto f = random_signal(120, 3);
  const auto m = maximal_function(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double best = 0.0;
    for (std::size_t p = 0; p <= i; ++p) {
      double s = 0.0;
      for (std::size_t q = p; q < f.size(); ++q) {
        s += std::abs(f.samples[q]);
        if (q >= i) best = std::max(best, s / static_cast<double>(q - p + 1));
      }
    }
    EXPECT_NEAR(m.mf.samples[i].real(), best, 1e-12 * best);
  }
}

TEST(SuperlevelSet, PadsRunsByHalfCell) {
  auto v = SampledFunction::zeros(0.0, 0.1, 10);
  for (std::size_t i : {2, 3, 4, 7}) v.samples[i] = 2.0;
  const auto o = superlevel_set(v, 1.0);
  ASSERT_EQ(o.components().size(), 2u);
  EXPECT_NEAR(o.components()[0].lo, 0.15, 1e-15);
  EXPECT_NEAR(o.components()[0].hi, 0.45, 1e-15);
  EXPECT_NEAR(o.components()[1].lo, 0.65, 1e-15);
  EXPECT_NEAR(o.components()[1].hi, 0.75, 1e-15);
  EXPECT_TRUE(superlevel_set(v, 2.0).empty());
}

TEST(Mollify, PreservesGridMass) {
  const auto b = random_signal(800, 5);
  for (double scale : {8.0 / 800.0, 0.05, 0.2}) {
    const auto m = mollify(b, scale);
    EXPECT_LT(std::abs(m.integral() - b.integral()), 1e-8 * b.l1_norm()) << scale;
    EXPECT_NEAR(m.x0, b.x0 - std::ceil(scale / b.h) * b.h, 1e-12);
  }
}

TEST(Mollify, ContractsL1) {
  const auto b = random_signal(800, 9);
  for (double scale : {0.01, 0.1}) EXPECT_LE(mollify(b, scale).l1_norm(), b.l1_norm() * (1.0 + 1e-12));
}

TEST(Mollify, RejectsCoarseGrid) {
  const auto b = random_signal(100, 1);
  EXPECT_THROW(mollify(b, 4.0 * b.h), GridTooCoarse);
  EXPECT_THROW(mollify(b, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(mollify(b, 8.0 * b.h));
}

struct CzCase {
  PhasePair phase = PhasePair::power(2.0);
  GrowthWitness witness = growth_witness(PhasePair::power(2.0));
  SampledFunction f = delta_family(100.0, -0.5, 0.5, std::ldexp(1.0, -14));
};

TEST(CzDecompose, InvariantsOnConcentratedMass) {
  const CzCase c;
  const auto d = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness);
  ASSERT_TRUE(d.cover.has_value());
  ASSERT_FALSE(d.bad_parts.empty());
  EXPECT_EQ(d.bad_parts.size(), d.cover->size());
  EXPECT_LT(d.reconstruction_error, 1e-12);
  EXPECT_LT(d.max_mean_ratio, 1e-10);
  EXPECT_DOUBLE_EQ(d.alpha_prime, 1.0);
  EXPECT_NEAR(d.f_l1, 1.0, 1e-12);

  // Grid points outside omega are untouched.
  for (std::size_t i = 0; i < c.f.size(); ++i) {
    if (!d.omega.contains(c.f.x(i))) EXPECT_EQ(d.g.samples[i], c.f.samples[i]) << i;
  }
  // Every part lives on its enlarged interval, inside omega.
  for (const auto& p : d.bad_parts) {
    EXPECT_GE(p.b.x0, p.star.lo - 1e-12);
    EXPECT_LE(p.b.x_last(), p.star.hi + 1e-12);
    EXPECT_TRUE(d.omega.contains(p.star.lo) && d.omega.contains(p.star.hi));
    EXPECT_NEAR(p.l1, p.b.l1_norm(), 1e-15);
    ASSERT_TRUE(p.mollified.has_value());
  }
}

TEST(CzDecompose, ModulationShrinksThreshold) {
  const CzCase c;
  const auto d = cz_decompose(c.f, 3.0, 2.0, c.phase, c.witness);
  EXPECT_DOUBLE_EQ(d.alpha_prime, 1.0);
  const auto ref = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness);
  ASSERT_EQ(d.omega.components().size(), ref.omega.components().size());
  EXPECT_EQ(d.omega.components()[0].lo, ref.omega.components()[0].lo);
  EXPECT_EQ(d.bad_parts.size(), ref.bad_parts.size());
}

TEST(CzDecompose, SmallFunctionHasNoBadParts) {
  CzCase c;
  for (auto& v : c.f.samples) v *= 1e-4;
  const auto d = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness);
  EXPECT_TRUE(d.omega.empty());
  EXPECT_TRUE(d.bad_parts.empty());
  EXPECT_EQ(d.g.samples, c.f.samples);
  EXPECT_EQ(d.kappa_prime, 0.0);
}

TEST(CzDecompose, EmptyScaleRangeLeavesOmegaUncovered) {
  CzCase c;
  c.f = delta_family(100.0, -0.5, 0.5, std::ldexp(1.0, -12));
  CZOptions opt;
  opt.k_min = 12;
  opt.k_max = 9;
  const auto d = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness, opt);
  ASSERT_TRUE(d.cover.has_value());
  EXPECT_EQ(d.cover->size(), 0u);
  EXPECT_NEAR(d.cover->uncovered_measure, d.omega.measure(), 0.0);
  EXPECT_EQ(d.g.samples, c.f.samples);
}

TEST(CzDecompose, PartBudgetIsEnforced) {
  const CzCase c;
  CZOptions opt;
  opt.max_parts = 10;
  EXPECT_THROW(cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness, opt), TooManyIntervals);
}

TEST(CzDecompose, RejectsNonPositiveThreshold) {
  const CzCase c;
  EXPECT_THROW(cz_decompose(c.f, 0.0, 0.0, c.phase, c.witness), std::invalid_argument);
}

TEST(CzDecompose, Deterministic) {
  const CzCase c;
  const auto a = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness);
  const auto b = cz_decompose(c.f, 1.0, 0.0, c.phase, c.witness);
  EXPECT_EQ(a.g.samples, b.g.samples);
  EXPECT_EQ(a.kappa_prime, b.kappa_prime);
}

}  // namespace
}  // namespace oscsing
