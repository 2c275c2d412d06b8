#include "torusconj/trig.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace torusconj {
namespace {

TrigPoly random_poly(std::mt19937_64& rng, int deg, bool zero_mean = false) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  TrigPoly f;
  f.constant = zero_mean ? 0.0 : coef(rng);
  f.cos_coeffs.resize(deg);
  f.sin_coeffs.resize(deg);
  for (int k = 0; k < deg; ++k) {
    f.cos_coeffs[k] = coef(rng);
    f.sin_coeffs[k] = coef(rng);
  }
  return f;
}

TEST(TrigPoly, EvalMatchesDirectFormula) {
  TrigPoly f;
  f.constant = 0.25;
  f.cos_coeffs = {0.5, 0.0, -0.3};
  f.sin_coeffs = {0.0, 0.7};
  for (double t : {0.0, 0.1, 0.37, 0.99, -0.4, 2.13}) {
    double expected = 0.25 + 0.5 * std::cos(kTwoPi * t) -
                      0.3 * std::cos(3 * kTwoPi * t) +
                      0.7 * std::sin(2 * kTwoPi * t);
    EXPECT_NEAR(f.eval(t), expected, 1e-14);
  }
  EXPECT_EQ(f.degree(), 3);
  EXPECT_DOUBLE_EQ(f.mean(), 0.25);
}

TEST(TrigPoly, ShiftEvaluatesAtShiftedArgument) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    TrigPoly f = random_poly(rng, 6);
    double delta = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    TrigPoly g = f.shifted(delta);
    for (double t : {0.0, 0.21, 0.5, 0.83}) {
      EXPECT_NEAR(g.eval(t), f.eval(t + delta), 1e-13);
    }
  }
}

TEST(TrigPoly, ReflectionEvaluatesAtNegatedArgument) {
  std::mt19937_64 rng(4);
  TrigPoly f = random_poly(rng, 5);
  TrigPoly g = f.reflected();
  for (double t : {0.0, 0.11, 0.77}) EXPECT_NEAR(g.eval(t), f.eval(-t), 1e-14);
}

TEST(TrigPoly, ArithmeticIsCoefficientwise) {
  std::mt19937_64 rng(5);
  TrigPoly f = random_poly(rng, 3), g = random_poly(rng, 7);
  TrigPoly d = f - g;
  TrigPoly neg = -f;
  for (double t : {0.05, 0.5, 0.91}) {
    EXPECT_NEAR(d.eval(t), f.eval(t) - g.eval(t), 1e-14);
    EXPECT_NEAR(neg.eval(t), -f.eval(t), 1e-15);
  }
}

TEST(TrigPoly, BoundsAreHonest) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    TrigPoly f = random_poly(rng, 8);
    double sup = f.sup_bound(), lip = f.lipschitz_bound();
    double prev = f.eval(0.0);
    for (int i = 1; i <= 4096; ++i) {
      double t = static_cast<double>(i) / 4096;
      double v = f.eval(t);
      EXPECT_LE(std::fabs(v), sup + 1e-12);
      EXPECT_LE(std::fabs(v - prev), lip / 4096 + 1e-12);
      prev = v;
    }
  }
}

TEST(SampledFunction, InterpolatesNodesExactlyAndWraps) {
  auto f = SampledFunction::from_function(
      [](double t) { return std::sin(kTwoPi * t) + 2.0 * t * (1.0 - t); }, 64, 10.0);
  for (int i = 0; i < 64; ++i) {
    double t = static_cast<double>(i) / 64;
    EXPECT_NEAR(f.eval(t), std::sin(kTwoPi * t) + 2.0 * t * (1.0 - t), 1e-15);
  }
  // midpoint of the wrap segment interpolates between v[63] and v[0]
  double expected = 0.5 * (f.values[63] + f.values[0]);
  EXPECT_NEAR(f.eval(63.5 / 64.0), expected, 1e-15);
  EXPECT_NEAR(f.eval(-0.25), f.eval(0.75), 1e-15);
  EXPECT_THROW(SampledFunction({1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(SampledFunction({1.0, 2.0}, -1.0), std::invalid_argument);
}

TEST(SampledFunction, ReflectionIsExactOnNodes) {
  auto f = SampledFunction::from_function(
      [](double t) { return std::cos(kTwoPi * t) + 0.2 * std::sin(2 * kTwoPi * t); },
      128, 10.0);
  SampledFunction g = f.reflected();
  for (int i = 0; i < 128; ++i) {
    double t = static_cast<double>(i) / 128;
    EXPECT_NEAR(g.eval(t), f.eval(-t), 1e-14) << t;
  }
}

TEST(RealFunction, VariantDispatch) {
  TrigPoly p;
  p.cos_coeffs = {0.4};
  RealFunction rf(p);
  EXPECT_TRUE(rf.is_trig());
  EXPECT_NEAR(rf.eval(0.2), 0.4 * std::cos(kTwoPi * 0.2), 1e-15);
  RealFunction rs(SampledFunction({0.0, 1.0, 0.0, -1.0}, 8.0));
  EXPECT_FALSE(rs.is_trig());
  EXPECT_NEAR(rs.eval(0.25), 1.0, 1e-15);
  EXPECT_NEAR(rs.negated().eval(0.25), -1.0, 1e-15);
}

TEST(Subtract, TrigPairIsExactSampledPairIsClose) {
  std::mt19937_64 rng(9);
  TrigPoly f = random_poly(rng, 4), g = random_poly(rng, 6);
  RealFunction d = subtract(RealFunction(f), RealFunction(g));
  ASSERT_TRUE(d.is_trig());
  for (double t : {0.3, 0.6}) EXPECT_NEAR(d.eval(t), f.eval(t) - g.eval(t), 1e-14);

  auto gs = SampledFunction::from_function([&](double t) { return g.eval(t); },
                                           1 << 13, g.lipschitz_bound());
  RealFunction dm = subtract(RealFunction(f), RealFunction(gs));
  ASSERT_FALSE(dm.is_trig());
  double tol = (f.lipschitz_bound() + g.lipschitz_bound()) / (1 << 13);
  for (double t : {0.123, 0.456, 0.789})
    EXPECT_NEAR(dm.eval(t), f.eval(t) - g.eval(t), tol);
}

TEST(FourierCoeffs, PureToneIsRecoveredExactly) {
  TrigPoly tone;
  tone.constant = 0.25;
  tone.cos_coeffs = {0.0, 0.0, 0.4};
  tone.sin_coeffs = {0.0, 0.0, 0.0, 0.0, -0.7};
  auto s = SampledFunction::from_function([&](double t) { return tone.eval(t); },
                                          4096, tone.lipschitz_bound());
  FourierResult fr = fourier_coeffs(s, 16);
  EXPECT_NEAR(fr.poly.constant, 0.25, 1e-13);
  for (int k = 1; k <= 16; ++k) {
    EXPECT_NEAR(fr.poly.cos_coeff(k), tone.cos_coeff(k), 1e-13) << k;
    EXPECT_NEAR(fr.poly.sin_coeff(k), tone.sin_coeff(k), 1e-13) << k;
  }
  EXPECT_GT(fr.tail_bound, 0.0);
}

TEST(FourierCoeffs, RejectsModesAtNyquist) {
  auto s = SampledFunction::from_function([](double t) { return std::cos(kTwoPi * t); },
                                          64, 7.0);
  EXPECT_THROW(fourier_coeffs(s, 32), std::invalid_argument);
  EXPECT_NO_THROW(fourier_coeffs(s, 31));
}

TEST(TrigGridEvaluator, MatchesPointwiseEval) {
  std::mt19937_64 rng(12);
  TrigPoly f = random_poly(rng, 9);
  const std::size_t n = 1024;
  TrigGridEvaluator ev(n);
  auto vals = ev.eval(f);
  ASSERT_EQ(vals.size(), n);
  for (std::size_t i = 0; i < n; i += 37) {
    double t = static_cast<double>(i) / static_cast<double>(n);
    EXPECT_NEAR(vals[i], f.eval(t), 1e-12);
  }
}

TEST(CircleValuedMap, LiftAndDegree) {
  TrigPoly phase;
  phase.sin_coeffs = {0.1};
  CircleValuedMap g(3, RealFunction(phase));
  EXPECT_NEAR(g.lift(0.25), 0.75 + 0.1 * std::sin(kTwoPi * 0.25), 1e-15);
  EXPECT_NEAR(g.eval(CirclePoint(0.5)).value(), wrap_unit(1.5 + 0.0), 1e-12);
  EXPECT_GE(g.lipschitz_bound(), 3.0);
}

// Partial sums of sin/cos at an irrational angle stay uniformly bounded by
// the closed-form Dirichlet-kernel bounds; these are the summation estimates
// the coboundary machinery leans on.
TEST(TrigSums, PartialSumsObeyDirichletBounds) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> th(0.05, 0.95);
  std::uniform_int_distribution<int> len(10, 10000);
  std::uniform_int_distribution<int> mode(-4, 4);
  std::uniform_real_distribution<double> tt(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double theta = th(rng);  // angle in radians, in (0, pi)
    int n = len(rng);
    double bound = 1.0 / std::sin(0.5 * theta);
    double s = 0.0, c = 0.0;
    for (int k = 1; k <= n; ++k) {
      s += std::sin(k * theta);
      c += std::cos(k * theta);
      EXPECT_LE(std::fabs(s), bound + 1e-9);
      EXPECT_LE(std::fabs(c), bound + 1e-9);
    }
    int m = mode(rng);
    double t = kTwoPi * tt(rng);
    double shifted = 0.0;
    for (int k = 0; k <= n; ++k) shifted += std::sin(m * t + k * theta);
    EXPECT_LE(std::fabs(shifted), 1.0 + 2.0 * bound + 1e-9);
  }
}

}  // namespace
}  // namespace torusconj
