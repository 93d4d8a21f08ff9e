#include <gtest/gtest.h>

#include <random>

#include "kstab/exactnum.hpp"

using namespace kstab;

namespace {

Rational R(long long p, long long q = 1) { return make_rational(p, q); }

// (a + b s)^2
Poly square(const Rational& a, const Rational& b) {
  Poly l({a, b});
  return l * l;
}

PiecewisePoly dh_a() { return {{R(-1), R(0), R(2)}, {square(2, 1), square(2, -1)}}; }
PiecewisePoly dh_b() {
  return {{R(-3), R(-2), R(1), R(3)},
          {square(3, 1) * R(1, 2), square(5, 1) * R(1, 18), square(3, -1) * R(1, 2)}};
}

}  // namespace

TEST(Rational, ParseForms) {
  EXPECT_EQ(parse_rational("5/18"), R(5, 18));
  EXPECT_EQ(parse_rational("-7"), R(-7));
  EXPECT_EQ(parse_rational("10/4"), R(5, 2));
  EXPECT_EQ(parse_rational("-0.125"), R(-1, 8));
  EXPECT_EQ(parse_rational(" 3 / -6 "), R(-1, 2));
  EXPECT_EQ(parse_rational("1.04275"), R(104275, 100000));
  EXPECT_EQ(parse_rational("010/08"), R(5, 4));
  EXPECT_EQ(parse_rational("0.0"), R(0));
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
  EXPECT_EQ(to_string(R(6, -4)), "-3/2");
  EXPECT_EQ(to_string(R(4, 2)), "2");
}

TEST(Poly, TrimAndArithmetic) {
  Poly p({R(1), R(2), R(0)});
  EXPECT_EQ(p.degree(), 1);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ((p * p)(R(3)), R(49));
  EXPECT_EQ(p.derivative(), Poly::constant(2));
  EXPECT_EQ(square(2, 1).compose_affine(R(1), R(-2)), Poly::monomial(1, 2));
}

TEST(Integrate, HandOracles) {
  EXPECT_EQ(integrate(square(2, 1), R(-1), R(0)), R(7, 3));
  EXPECT_EQ(integrate(Poly::constant(1), R(0), R(1)), R(1));
  EXPECT_EQ(integrate(square(2, -1), R(0), R(2)), R(8, 3));
  EXPECT_EQ(integrate(square(2, -1), R(1), R(1)), R(0));
}

TEST(Integrate, AdditiveOverSplits) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-9, 9);
  for (int it = 0; it < 30; ++it) {
    Poly p({R(d(rng)), R(d(rng), 3), R(d(rng), 7), R(d(rng), 5)});
    Rational a = R(d(rng), 4), b = a + R(std::abs(d(rng)) + 1, 3);
    Rational c = a + (b - a) * R(std::abs(d(rng)), 10);
    EXPECT_EQ(integrate(p, a, b), integrate(p, a, c) + integrate(p, c, b));
  }
}

TEST(PwMass, BothDensities) {
  EXPECT_EQ(pw_mass(dh_a()), R(5));
  EXPECT_EQ(pw_mass(dh_b()), R(5));
  EXPECT_EQ(pw_mass(PiecewisePoly()), R(0));
}

TEST(PiecewisePoly, RightPieceConvention) {
  PiecewisePoly f({R(0), R(1), R(2)}, {Poly::constant(1), Poly::constant(3)});
  EXPECT_EQ(f(R(0)), R(1));
  EXPECT_EQ(f(R(1)), R(3));
  EXPECT_EQ(f(R(2)), R(3));
  EXPECT_EQ(f(R(5, 2)), R(0));
  EXPECT_EQ(f.eval<double>(1.0), 3.0);
  EXPECT_THROW(PiecewisePoly({R(0), R(0)}, {Poly::constant(1)}), std::invalid_argument);
}

TEST(PiecewisePoly, RefineKeepsFunction) {
  auto f = dh_a();
  auto g = f.refined({R(-1, 2), R(1), R(7, 4), R(9)});
  EXPECT_EQ(g.size(), 5u);
  EXPECT_EQ(pw_mass(g), R(5));
  for (int k = -8; k <= 16; ++k) EXPECT_EQ(f(R(k, 8)), g(R(k, 8)));
}

TEST(ExpWeight, Trivial) {
  EXPECT_NEAR(expweight_integral<double>(Poly::constant(1), 0.0, R(0), R(1)), 1.0, 1e-16);
  EXPECT_NEAR(expweight_integral<double>(Poly::constant(1), 1.0, R(0), R(1)), 1.0 - std::exp(-1.0), 1e-15);
  Quad v = expweight_integral<Quad>(Poly::constant(1), Quad(1), R(0), R(1));
  Quad want = 1 - exp(Quad(-1));
  EXPECT_LT(static_cast<double>(abs(v - want)), 1e-30);
}

TEST(ExpWeight, ZeroXiMatchesIntegrate) {
  for (const auto& p : {square(2, 1), square(5, 1) * R(1, 18), Poly({R(1), R(-3), R(2), R(7)})}) {
    long double exact = to_real<long double>(integrate(p, R(-2), R(3)));
    long double got = expweight_integral<long double>(p, 0.0L, R(-2), R(3));
    EXPECT_LE(std::abs(got - exact), 1e-15L * std::abs(exact));
  }
}

TEST(ExpWeight, BranchesAgreeAtThreshold) {
  // Just below the threshold the Taylor branch is used, just above the closed form.
  const Quad lo = Quad(kTaylorXiThreshold) * (1 - Quad(1e-28));
  const Quad hi = Quad(kTaylorXiThreshold) * (1 + Quad(1e-28));
  for (const auto& p : {square(2, 1), square(2, -1), Poly({R(1), R(-3), R(2), R(7)})}) {
    for (auto [a, b] : {std::pair{R(-1), R(0)}, std::pair{R(0), R(2)}, std::pair{R(-3), R(3)}}) {
      Quad f_lo = expweight_integral<Quad>(p, lo, a, b);
      Quad f_hi = expweight_integral<Quad>(p, hi, a, b);
      Quad scale = abs(f_lo) + 1;
      EXPECT_LT(static_cast<double>(abs(f_lo - f_hi) / scale), 1e-20);
    }
  }
}

TEST(ExpWeight, AgreesWithQuadratureAtLargeXi) {
  // Simpson reference on a fine grid.
  auto p = square(2, -1);
  for (double xi : {-7.5, -1.2, 0.3, 2.0, 11.0}) {
    const int n = 20000;
    long double h = 2.0L / n, acc = 0;
    for (int i = 0; i <= n; ++i) {
      long double s = i * h;
      long double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      acc += w * p.eval<long double>(s) * std::exp(-xi * s);
    }
    acc *= h / 3;
    long double got = expweight_integral<long double>(p, static_cast<long double>(xi), R(0), R(2));
    EXPECT_NEAR(static_cast<double>(got / acc), 1.0, 1e-12) << xi;
  }
}

TEST(ExpWeight, AnalyticDerivativeMatchesFiniteDifference) {
  std::mt19937 rng(2023);
  std::uniform_int_distribution<int> c(-6, 6);
  std::uniform_real_distribution<double> x(-2.0, 2.0);
  for (int it = 0; it < 20; ++it) {
    Poly p({R(c(rng)), R(c(rng), 2), R(c(rng), 3)});
    if (p.is_zero()) p = Poly::constant(1);
    Rational a = R(c(rng), 2), b = a + R(std::abs(c(rng)) + 1, 2);
    Quad xi = Quad(x(rng));
    Quad analytic = expweight_integral<Quad>(-(p * Poly::identity()), xi, a, b);
    Quad h = Quad(1e-6);
    Quad fd = (expweight_integral<Quad>(p, xi + h, a, b) - expweight_integral<Quad>(p, xi - h, a, b)) / (2 * h);
    Quad scale = abs(analytic) > 1e-6 ? abs(analytic) : Quad(1);
    EXPECT_LT(static_cast<double>(abs(fd - analytic) / scale), 1e-8);
  }
}

TEST(ExpWeight, SolitonWeightedMassOfDensityA) {
  Quad bv = pw_expweight<Quad>(dh_a(), Quad("0.2737918510108124"));
  EXPECT_NEAR(static_cast<double>(bv), 4.94383, 5e-5);
}
