#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kstab/okounkov.hpp"

using namespace kstab;

namespace {

Rational R(long long p, long long q = 1) { return make_rational(p, q); }
Vec3 V(int a, int b, int c) { return {R(a), R(b), R(c)}; }

std::vector<Vec3> points_a() {
  return {V(3, 0, 2), V(2, 0, 1), V(2, 1, 1), V(2, 0, 2), V(2, 1, 2), V(1, 0, 0), V(1, 1, 0), V(1, 0, 1), V(1, 1, 1),
          V(1, 2, 0), V(1, 2, 1), V(1, 0, 2), V(1, 1, 2), V(1, 2, 2), V(0, 0, 0), V(0, 1, 0), V(0, 0, 1), V(0, 1, 1)};
}

std::vector<Vec3> points_b() {
  return {V(6, 3, 0), V(5, 2, 0), V(5, 2, 1), V(5, 2, 2), V(4, 2, 0), V(4, 1, 0), V(4, 1, 0), V(4, 1, 2), V(4, 1, 3),
          V(4, 1, 4), V(3, 1, 0), V(3, 1, 1), V(3, 1, 2), V(2, 1, 0), V(1, 0, 0), V(1, 0, 1), V(1, 0, 2), V(0, 0, 0)};
}

Poly sq(long long a, long long b) { return Poly({R(a), R(b)}) * Poly({R(a), R(b)}); }

// sqrt(f2) >= lam sqrt(f1) + (1-lam) sqrt(f3), decided exactly.
bool sqrt_concave(const Rational& f1, const Rational& f2, const Rational& f3, const Rational& lam) {
  Rational mu = 1 - lam;
  Rational lhs = f2 - lam * lam * f1 - mu * mu * f3;
  if (lhs < 0) return false;
  return lhs * lhs >= 4 * lam * lam * mu * mu * f1 * f3;
}

}  // namespace

TEST(ConvexHull, BodyAVertices) {
  auto body = shift_axis(convex_hull(points_a()), R(-1));
  std::vector<Vec3> want{V(-1, 0, 0), V(-1, 0, 1), V(-1, 1, 0), V(-1, 1, 1), V(0, 0, 0),
                         V(0, 0, 2),  V(0, 2, 0),  V(0, 2, 2),  V(2, 0, 2)};
  EXPECT_EQ(body.hull_vertices, want);
  EXPECT_EQ(body.axis_shift, R(-1));
}

TEST(ConvexHull, BodyBVertices) {
  auto body = shift_axis(convex_hull(points_b()), R(-3));
  std::vector<Vec3> want{V(-3, 0, 0), V(-2, 0, 0), V(-2, 0, 2), V(1, 1, 0), V(1, 1, 4), V(3, 3, 0)};
  EXPECT_EQ(body.hull_vertices, want);
}

TEST(ConvexHull, SimplexIsItsOwnHull) {
  std::vector<Vec3> s{V(0, 0, 0), V(1, 0, 0), V(0, 1, 0), V(0, 0, 1)};
  std::sort(s.begin(), s.end());
  EXPECT_EQ(convex_hull(s).hull_vertices, s);
  EXPECT_EQ(convex_hull(s).facets.size(), 4u);
}

TEST(ConvexHull, CoplanarThrows) {
  EXPECT_THROW(convex_hull({V(0, 0, 0), V(1, 0, 0), V(0, 1, 0), V(1, 1, 0), V(2, 3, 0)}), DegenerateBody);
  EXPECT_THROW(convex_hull({V(0, 0, 0), V(1, 0, 0), V(0, 1, 0)}), DegenerateBody);
}

TEST(ShiftAxis, RangesAndIdentity) {
  auto a = convex_hull(points_a());
  auto sa = shift_axis(a, R(-1));
  EXPECT_EQ(sa.hull_vertices.front()[0], R(-1));
  EXPECT_EQ(sa.hull_vertices.back()[0], R(2));
  auto id = shift_axis(a, R(0));
  EXPECT_EQ(id.hull_vertices, a.hull_vertices);
  EXPECT_EQ(id.facets, a.facets);
  auto sb = shift_axis(convex_hull(points_b()), R(-3));
  EXPECT_EQ(sb.hull_vertices.front()[0], R(-3));
  EXPECT_EQ(sb.hull_vertices.back()[0], R(3));
}

TEST(DH, BodyADensity) {
  auto dh = dh_from_body(shift_axis(convex_hull(points_a()), R(-1)));
  EXPECT_EQ(dh.density.breakpoints(), (std::vector<Rational>{R(-1), R(0), R(2)}));
  EXPECT_EQ(dh.density.piece(0), sq(2, 1));
  EXPECT_EQ(dh.density.piece(1), sq(2, -1));
  EXPECT_EQ(pw_mass(dh.density), R(30, 6));
}

TEST(DH, BodyBDensity) {
  auto dh = dh_from_body(shift_axis(convex_hull(points_b()), R(-3)));
  EXPECT_EQ(dh.density.breakpoints(), (std::vector<Rational>{R(-3), R(-2), R(1), R(3)}));
  EXPECT_EQ(dh.density.piece(0), sq(3, 1) * R(1, 2));
  EXPECT_EQ(dh.density.piece(1), sq(5, 1) * R(1, 18));
  EXPECT_EQ(dh.density.piece(2), sq(3, -1) * R(1, 2));
  EXPECT_EQ(pw_mass(dh.density), R(30, 6));
}

TEST(DH, UnitCube) {
  std::vector<Vec3> cube;
  for (int i = 0; i < 8; ++i) cube.push_back(V(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  auto dh = dh_from_body(convex_hull(cube));
  EXPECT_EQ(dh.density.size(), 1u);
  EXPECT_EQ(dh.density.piece(0), Poly::constant(1));
}

TEST(DH, ContinuousAcrossBreakpoints) {
  for (auto body : {shift_axis(convex_hull(points_a()), R(-1)), shift_axis(convex_hull(points_b()), R(-3))}) {
    auto f = dh_from_body(body).density;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
      const auto& b = f.breakpoints()[i + 1];
      EXPECT_EQ(f.piece(i)(b), f.piece(i + 1)(b));
    }
  }
}

TEST(DH, SqrtDensityIsConcave) {
  std::mt19937 rng(11);
  for (auto body : {shift_axis(convex_hull(points_a()), R(-1)), shift_axis(convex_hull(points_b()), R(-3))}) {
    auto f = dh_from_body(body).density;
    Rational lo = f.lower(), w = f.upper() - f.lower();
    std::uniform_int_distribution<int> d(0, 997);
    for (int it = 0; it < 100; ++it) {
      Rational s1 = lo + w * R(d(rng), 997), s3 = lo + w * R(d(rng), 997);
      if (s1 == s3) continue;
      Rational lam = R(d(rng), 997);
      Rational s2 = lam * s1 + (1 - lam) * s3;
      EXPECT_TRUE(sqrt_concave(f(s1), f(s2), f(s3), lam));
    }
  }
}
