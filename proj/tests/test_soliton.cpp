#include <gtest/gtest.h>

#include "kstab/soliton.hpp"

using namespace kstab;

namespace {

Rational R(long long p, long long q = 1) { return make_rational(p, q); }
Poly sq(long long a, long long b) { return Poly({R(a), R(b)}) * Poly({R(a), R(b)}); }

DHMeasure dh_a() { return {PiecewisePoly({R(-1), R(0), R(2)}, {sq(2, 1), sq(2, -1)})}; }
DHMeasure dh_b() {
  return {PiecewisePoly({R(-3), R(-2), R(1), R(3)}, {sq(3, 1) * R(1, 2), sq(5, 1) * R(1, 18), sq(3, -1) * R(1, 2)})};
}
DHMeasure dh_sym() { return {PiecewisePoly({R(-1), R(0), R(1)}, {sq(1, 1), sq(1, -1)})}; }

// Independent oracle: 40-digit root of the closed-form first moment (computer algebra, offline).
const char* kXiA = "0.27379184887668864";
const char* kEtaB = "0.15464282383660627";

double d(const Quad& q) { return static_cast<double>(q); }

}  // namespace

TEST(HValue, AtZeroIsLogMass) {
  EXPECT_NEAR(d(h_value<Quad>(dh_a(), Quad(0))), std::log(5.0), 1e-15);
  EXPECT_NEAR(d(h_value<Quad>(dh_b(), Quad(0))), std::log(5.0), 1e-15);
}

TEST(HValue, AtPrintedXi) {
  EXPECT_NEAR(d(h_value<Quad>(dh_a(), Quad("0.2737918510108124"))), std::log(4.94383), 1e-4);
}

TEST(HValue, SymmetricDensity) {
  for (double x : {0.1, 0.7, 2.5}) EXPECT_NEAR(d(h_value<Quad>(dh_sym(), Quad(x)) - h_value<Quad>(dh_sym(), Quad(-x))), 0.0, 1e-28);
}

TEST(MinimizeH, DensityA) {
  auto c = minimize_h<Quad>(dh_a());
  EXPECT_NEAR(d(c.xi0 - Quad(kXiA)), 0.0, 1e-15);
  EXPECT_LE(d(c.residual), kSolitonTol);
  EXPECT_LT(c.lo, c.xi0);
  EXPECT_LT(c.xi0, c.hi);
  EXPECT_LE(d(c.hi - c.lo), 2 * kBracketWidth);
}

TEST(MinimizeH, DensityB) {
  auto c = minimize_h<Quad>(dh_b());
  EXPECT_NEAR(d(c.xi0 - Quad(kEtaB)), 0.0, 1e-15);
  EXPECT_LE(d(c.residual), kSolitonTol);
}

TEST(MinimizeH, LongDoubleAgrees) {
  auto q = minimize_h<Quad>(dh_a());
  auto l = minimize_h<long double>(dh_a());
  EXPECT_NEAR(static_cast<double>(l.xi0), d(q.xi0), 1e-14);
}

TEST(MinimizeH, SymmetricIsZero) {
  auto c = minimize_h<Quad>(dh_sym());
  EXPECT_NEAR(d(c.xi0), 0.0, kSolitonTol);
}

TEST(MinimizeH, OneSidedSupportHasNoBracket) {
  DHMeasure m{PiecewisePoly({R(1), R(2)}, {Poly::constant(1)})};
  EXPECT_THROW(minimize_h<Quad>(m), NoBracket);
  EXPECT_THROW(minimize_h<Quad>(DHMeasure{}), NoBracket);
}

TEST(MinimizeH, RefinementInvariant) {
  auto base = minimize_h<Quad>(dh_a());
  DHMeasure fine{dh_a().density.refined({R(-1, 3), R(1, 7), R(3, 2), R(19, 10)})};
  auto c = minimize_h<Quad>(fine);
  EXPECT_LE(d(abs(c.xi0 - base.xi0)), 2 * kSolitonTol);
}

TEST(MinimizeH, RescalingDividesXi) {
  for (auto dh : {dh_a(), dh_b()}) {
    auto base = minimize_h<Quad>(dh);
    DHMeasure scaled{dh.density.pushforward_scale(R(2))};
    EXPECT_EQ(pw_mass(scaled.density), pw_mass(dh.density));
    auto c = minimize_h<Quad>(scaled);
    EXPECT_NEAR(d(c.xi0 - base.xi0 / 2), 0.0, 4 * kSolitonTol);
  }
}

TEST(HSecond, StrictlyConvex) {
  for (auto dh : {dh_a(), dh_b()})
    for (int i = 0; i < 20; ++i) {
      Quad xi = Quad(-1) + Quad(2) * i / 19;
      Quad h2 = h_second<Quad>(dh, xi);
      EXPECT_GT(h2, 0);
      // Analytic H'' against a central difference of the analytic H'.
      Quad h = Quad(1e-8);
      Quad fd = (h_prime<Quad>(dh, xi + h) - h_prime<Quad>(dh, xi - h)) / (2 * h);
      EXPECT_NEAR(d(fd / h2), 1.0, 1e-8);
    }
}

TEST(MakeWeight, Normalizations) {
  auto a = make_weight(dh_a(), minimize_h<Quad>(dh_a()));
  EXPECT_NEAR(d(a.bv), 4.94383, 5e-5);
  auto zero = make_weight(dh_a(), Quad(0));
  EXPECT_EQ(zero.bv, Quad(5));
  auto b = make_weight(dh_b(), minimize_h<Quad>(dh_b()));
  EXPECT_NEAR(d(b.bv), 4.9226628412935603, 1e-14);
  EXPECT_NEAR(d(a(Quad(1))), std::exp(-d(a.xi0)), 1e-16);
}
