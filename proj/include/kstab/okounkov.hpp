#pragma once

// Exact 3-D convex hulls of valuation images and their slice-area (DH) densities.

#include <array>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"

namespace kstab {

using Vec3 = std::array<Rational, 3>;
using Vec2 = std::array<Rational, 2>;

/// Supporting plane normal . x <= offset.
struct Facet {
  Vec3 normal;
  Rational offset;
  friend bool operator<(const Facet& a, const Facet& b) {
    return std::tie(a.normal, a.offset) < std::tie(b.normal, b.offset);
  }
  friend bool operator==(const Facet& a, const Facet& b) { return a.normal == b.normal && a.offset == b.offset; }
};

struct LatticeBody {
  std::vector<Vec3> points;         // deduplicated, sorted
  std::vector<Vec3> hull_vertices;  // sorted lexicographically
  std::vector<Facet> facets;
  Rational axis_shift = 0;
};

struct DHMeasure {
  PiecewisePoly density;
  Rational lambda_min() const { return density.lower(); }
  Rational lambda_max() const { return density.upper(); }
};

namespace detail {

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Rational dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline bool is_zero(const Vec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

// Scale so the first nonzero entry has absolute value 1 (sign kept: orientation matters).
inline Facet normalized(Vec3 n, Rational off) {
  Rational lead = 0;
  for (const auto& c : n)
    if (c != 0) {
      lead = abs(c);
      break;
    }
  for (auto& c : n) c /= lead;
  return {n, off / lead};
}

inline int rank3(const std::vector<Vec3>& vs) {
  // Gaussian elimination on copies.
  std::vector<Vec3> m = vs;
  int rank = 0;
  for (int col = 0; col < 3 && rank < static_cast<int>(m.size()); ++col) {
    std::size_t piv = m.size();
    for (std::size_t r = static_cast<std::size_t>(rank); r < m.size(); ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == m.size()) continue;
    std::swap(m[piv], m[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[static_cast<std::size_t>(rank)][col];
      for (int c = 0; c < 3; ++c) m[r][c] -= f * m[static_cast<std::size_t>(rank)][c];
    }
    ++rank;
  }
  return rank;
}

inline Rational cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain, collinear points dropped.
inline std::vector<Vec2> hull2(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline Rational shoelace(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0;
  Rational a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return abs(a) / 2;
}

// Quadratic through (x_i, y_i), i = 0..2, by Lagrange interpolation.
inline Poly lagrange3(const std::array<Rational, 3>& x, const std::array<Rational, 3>& y) {
  Poly acc;
  for (int i = 0; i < 3; ++i) {
    Poly term = Poly::constant(y[static_cast<std::size_t>(i)]);
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      term = term * Poly({-x[static_cast<std::size_t>(j)], Rational(1)}) *
             (1 / (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]));
    }
    acc += term;
  }
  return acc;
}

}  // namespace detail

/// Exact convex hull by facet enumeration over point triples.
inline LatticeBody convex_hull(const std::vector<Vec3>& input) {
  using namespace detail;
  LatticeBody body;
  std::set<Vec3> uniq(input.begin(), input.end());
  body.points.assign(uniq.begin(), uniq.end());
  const auto& P = body.points;
  if (P.size() < 4) throw DegenerateBody("need at least 4 distinct points");
  {
    std::vector<Vec3> diffs;
    for (std::size_t i = 1; i < P.size(); ++i) diffs.push_back(sub(P[i], P[0]));
    if (rank3(diffs) < 3) throw DegenerateBody("points are coplanar");
  }
  std::set<Facet> facets;
  const std::size_t n = P.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        Vec3 nrm = cross(sub(P[j], P[i]), sub(P[k], P[i]));
        if (is_zero(nrm)) continue;
        Rational off = dot(nrm, P[i]);
        bool pos = false, neg = false;
        for (const auto& q : P) {
          Rational v = dot(nrm, q) - off;
          if (v > 0) pos = true;
          if (v < 0) neg = true;
          if (pos && neg) break;
        }
        if (pos && neg) continue;
        if (pos) {
          for (auto& c : nrm) c = -c;
          off = -off;
        }
        facets.insert(normalized(nrm, off));
      }
  body.facets.assign(facets.begin(), facets.end());
  for (const auto& p : P) {
    std::vector<Vec3> normals;
    for (const auto& f : body.facets)
      if (dot(f.normal, p) == f.offset) normals.push_back(f.normal);
    if (normals.size() >= 3 && rank3(normals) == 3) body.hull_vertices.push_back(p);
  }
  return body;
}

/// Translate every point by delta along axis 0.
inline LatticeBody shift_axis(const LatticeBody& body, const Rational& delta) {
  LatticeBody out = body;
  for (auto& p : out.points) p[0] += delta;
  for (auto& v : out.hull_vertices) v[0] += delta;
  for (auto& f : out.facets) f.offset += f.normal[0] * delta;
  out.axis_shift += delta;
  return out;
}

/// Area of the slice {x0 = s}, exact.
inline Rational slice_area(const LatticeBody& body, const Rational& s) {
  using namespace detail;
  const auto& V = body.hull_vertices;
  std::vector<Vec2> pts;
  for (const auto& v : V)
    if (v[0] == s) pts.push_back({v[1], v[2]});
  // Hull edges: vertex pairs sharing two independent facets.
  for (std::size_t i = 0; i < V.size(); ++i)
    for (std::size_t j = i + 1; j < V.size(); ++j) {
      const Vec3 &a = V[i], &b = V[j];
      if (!((a[0] < s && s < b[0]) || (b[0] < s && s < a[0]))) continue;
      std::vector<Vec3> shared;
      for (const auto& f : body.facets)
        if (dot(f.normal, a) == f.offset && dot(f.normal, b) == f.offset) shared.push_back(f.normal);
      if (shared.size() < 2 || rank3(shared) < 2) continue;
      Rational lam = (s - a[0]) / (b[0] - a[0]);
      pts.push_back({a[1] + lam * (b[1] - a[1]), a[2] + lam * (b[2] - a[2])});
    }
  return shoelace(hull2(pts));
}

/// Slice-area density along axis 0: exact piecewise quadratic.
inline DHMeasure dh_from_body(const LatticeBody& body) {
  if (body.hull_vertices.size() < 4) throw DegenerateBody("body is not full-dimensional");
  std::set<Rational> xs;
  for (const auto& v : body.hull_vertices) xs.insert(v[0]);
  std::vector<Rational> bps(xs.begin(), xs.end());
  std::vector<Poly> pieces;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const Rational &a = bps[i], &b = bps[i + 1];
    std::array<Rational, 3> x{a + (b - a) / 4, a + (b - a) / 2, a + 3 * (b - a) / 4};
    std::array<Rational, 3> y{slice_area(body, x[0]), slice_area(body, x[1]), slice_area(body, x[2])};
    Poly q = detail::lagrange3(x, y);
    Rational probe = a + (b - a) / 3;
    if (q(probe) != slice_area(body, probe)) throw DegenerateBody("slice area is not quadratic on a piece");
    pieces.push_back(std::move(q));
  }
  DHMeasure m{PiecewisePoly(std::move(bps), std::move(pieces))};
  for (std::size_t i = 0; i < m.density.size(); ++i) {
    const auto& p = m.density.piece(i);
    const Rational &a = m.density.breakpoints()[i], &b = m.density.breakpoints()[i + 1];
    std::vector<Rational> probes{a, b};
    if (p.degree() == 2) {
      Rational crit = -p.coeff(1) / (2 * p.coeff(2));
      if (crit > a && crit < b) probes.push_back(crit);
    }
    for (const auto& x : probes)
      if (p(x) < 0) throw DegenerateBody("negative slice density");
  }
  return m;
}

}  // namespace kstab
