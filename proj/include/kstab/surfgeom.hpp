#pragma once

// Zariski decomposition on surfaces with an exact intersection form, and the
// chamber partition of a two-parameter divisor family.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"

namespace kstab {

using Matrix = std::vector<std::vector<Rational>>;
using DivisorClass = std::vector<Rational>;

namespace linalg {

/// Solves A x = b exactly; nullopt when A is singular.
inline std::optional<std::vector<Rational>> solve(Matrix A, std::vector<Rational> b) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (A[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      Rational f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

inline Rational det(Matrix A) {
  const std::size_t n = A.size();
  Rational d = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (A[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(A[piv], A[col]);
      d = -d;
    }
    d *= A[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (A[r][col] == 0) continue;
      Rational f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  return d;
}

/// Sylvester: every leading minor of -A is positive.
inline bool negative_definite(const Matrix& A) {
  for (std::size_t k = 1; k <= A.size(); ++k) {
    Matrix m(k, std::vector<Rational>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[i][j] = -A[i][j];
    if (det(m) <= 0) return false;
  }
  return true;
}

}  // namespace linalg

// ---------------------------------------------------------------------------
// Lattice and classes

struct NamedCurve {
  std::string name;
  DivisorClass cls;
};

struct NSLattice {
  std::vector<std::string> class_names;
  Matrix gram;
  std::vector<NamedCurve> curves;  // the curves allowed in negative parts

  std::size_t rank() const { return class_names.size(); }

  Rational dot(const DivisorClass& a, const DivisorClass& b) const {
    Rational acc = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < rank(); ++j) acc += a[i] * gram[i][j] * b[j];
    }
    return acc;
  }

  std::optional<std::size_t> curve_index(const std::string& name) const {
    for (std::size_t i = 0; i < curves.size(); ++i)
      if (curves[i].name == name) return i;
    return std::nullopt;
  }

  void validate() const {
    if (gram.size() != rank()) throw ParseError("gram size does not match class count");
    for (std::size_t i = 0; i < rank(); ++i) {
      if (gram[i].size() != rank()) throw ParseError("gram is not square");
      for (std::size_t j = 0; j < rank(); ++j)
        if (gram[i][j] != gram[j][i]) throw ParseError("gram is not symmetric");
    }
    for (const auto& c : curves)
      if (c.cls.size() != rank()) throw ParseError("curve " + c.name + " has wrong length");
  }
};

inline DivisorClass axpy(const Rational& a, const DivisorClass& x, DivisorClass y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  return y;
}

inline std::string format_class(const NSLattice& lat, const DivisorClass& d) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0) continue;
    if (!first) os << " + ";
    os << "(" << to_string(d[i]) << ")" << lat.class_names[i];
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// Zariski decomposition

struct ZariskiResult {
  DivisorClass positive;
  std::vector<std::pair<std::size_t, Rational>> negative;  // (curve index, coefficient > 0)
  Rational volume;

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (const auto& [i, c] : negative) s.push_back(i);
    return s;
  }
};

inline Matrix support_gram(const NSLattice& lat, const std::vector<std::size_t>& S) {
  Matrix G(S.size(), std::vector<Rational>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < S.size(); ++j) G[i][j] = lat.dot(lat.curves[S[i]].cls, lat.curves[S[j]].cls);
  return G;
}

/// Throws std::logic_error when a decomposition breaks its defining properties.
inline void check_zariski_postconditions(const NSLattice& lat, const DivisorClass& D, const ZariskiResult& z) {
  DivisorClass sum = z.positive;
  for (const auto& [i, c] : z.negative) {
    if (c <= 0) throw std::logic_error("zariski: nonpositive negative-part coefficient");
    sum = axpy(c, lat.curves[i].cls, sum);
    if (lat.dot(z.positive, lat.curves[i].cls) != 0) throw std::logic_error("zariski: P not orthogonal to supp N");
  }
  if (sum != D) throw std::logic_error("zariski: P + N != D");
  for (const auto& c : lat.curves)
    if (lat.dot(z.positive, c.cls) < 0) throw std::logic_error("zariski: P meets " + c.name + " negatively");
  if (!z.negative.empty() && !linalg::negative_definite(support_gram(lat, z.support())))
    throw std::logic_error("zariski: support Gram not negative definite");
  if (z.volume != lat.dot(z.positive, z.positive)) throw std::logic_error("zariski: volume != P.P");
}

inline ZariskiResult zariski(const NSLattice& lat, const DivisorClass& D) {
  if (D.size() != lat.rank()) throw ParseError("class length does not match lattice rank");
  std::vector<std::size_t> S;
  for (std::size_t i = 0; i < lat.curves.size(); ++i)
    if (lat.dot(D, lat.curves[i].cls) < 0) S.push_back(i);
  ZariskiResult z;
  for (;;) {
    z.positive = D;
    z.negative.clear();
    if (!S.empty()) {
      Matrix G = support_gram(lat, S);
      std::vector<Rational> rhs;
      for (auto i : S) rhs.push_back(lat.dot(D, lat.curves[i].cls));
      auto c = linalg::solve(G, rhs);
      if (!c) throw SingularGram("support Gram matrix is singular");
      if (!linalg::negative_definite(G)) throw NotPseudoEffective("support Gram is not negative definite");
      for (std::size_t k = 0; k < S.size(); ++k) {
        if ((*c)[k] < 0) throw NotPseudoEffective("negative coefficient on " + lat.curves[S[k]].name);
        if ((*c)[k] == 0) continue;
        z.positive = axpy(-(*c)[k], lat.curves[S[k]].cls, z.positive);
        z.negative.emplace_back(S[k], (*c)[k]);
      }
    }
    std::vector<std::size_t> grow;
    for (std::size_t i = 0; i < lat.curves.size(); ++i)
      if (std::find(S.begin(), S.end(), i) == S.end() && lat.dot(z.positive, lat.curves[i].cls) < 0) grow.push_back(i);
    if (grow.empty()) break;
    if (S.size() + grow.size() > lat.curves.size()) throw NotPseudoEffective("negative locus exhausted all curves");
    S.insert(S.end(), grow.begin(), grow.end());
    std::sort(S.begin(), S.end());
  }
  z.volume = lat.dot(z.positive, z.positive);
  if (z.volume < 0) throw NotPseudoEffective("P.P < 0");
#ifdef KSTAB_CHECK_POSTCONDITIONS
  check_zariski_postconditions(lat, D, z);
#endif
  return z;
}

// ---------------------------------------------------------------------------
// Affine families

/// c + cs*s + ct*t
struct Affine2 {
  Rational c = 0, cs = 0, ct = 0;
  Rational operator()(const Rational& s, const Rational& t) const { return c + cs * s + ct * t; }
  friend Affine2 operator+(const Affine2& a, const Affine2& b) { return {a.c + b.c, a.cs + b.cs, a.ct + b.ct}; }
  friend Affine2 operator-(const Affine2& a, const Affine2& b) { return {a.c - b.c, a.cs - b.cs, a.ct - b.ct}; }
  friend Affine2 operator*(const Rational& k, const Affine2& a) { return {k * a.c, k * a.cs, k * a.ct}; }
  friend bool operator==(const Affine2& a, const Affine2& b) { return a.c == b.c && a.cs == b.cs && a.ct == b.ct; }
  bool is_zero() const { return c == 0 && cs == 0 && ct == 0; }
};

inline std::string to_string(const Affine2& a) {
  std::ostringstream os;
  os << to_string(a.c);
  if (a.cs != 0) os << (a.cs > 0 ? " + " : " - ") << to_string(abs(a.cs)) << "*s";
  if (a.ct != 0) os << (a.ct > 0 ? " + " : " - ") << to_string(abs(a.ct)) << "*t";
  return os.str();
}

/// base + s*ds + t*dt
struct AffineClass {
  DivisorClass base, ds, dt;
  DivisorClass at(const Rational& s, const Rational& t) const {
    DivisorClass out = base;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * ds[i] + t * dt[i];
    return out;
  }
};

/// Curve carried along with coefficient affine in (s,t) but not part of the mobile class.
struct FixedCurve {
  std::string curve;
  Affine2 coeff;
};

/// One s-interval of a family: D(s,t) on {s0 <= s <= s1, 0 <= t <= t_max(s)}.
struct FamilyPiece {
  Rational s0, s1;
  AffineClass cls;
  Affine2 t_max;  // ct must be 0
  std::vector<FixedCurve> fixed;

  bool contains(const Rational& s, const Rational& t) const {
    return s >= s0 && s <= s1 && t >= 0 && t <= t_max(s, 0);
  }
};

struct DivisorFamily {
  std::vector<FamilyPiece> pieces;

  Rational s_min() const { return pieces.front().s0; }
  Rational s_max() const { return pieces.back().s1; }

  /// Piece owning s; interior boundaries go to the right piece.
  std::size_t locate(const Rational& s) const {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      bool last = i + 1 == pieces.size();
      if (s >= pieces[i].s0 && (s < pieces[i].s1 || (last && s == pieces[i].s1))) return i;
    }
    throw OutsideRegion("s = " + to_string(s) + " outside family");
  }

  void validate(const NSLattice& lat) const {
    if (pieces.empty()) throw ParseError("family has no pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& p = pieces[i];
      if (!(p.s0 < p.s1)) throw ParseError("family piece with empty s-range");
      if (i > 0 && pieces[i - 1].s1 != p.s0) throw ParseError("family pieces are not contiguous");
      if (p.t_max.ct != 0) throw ParseError("t_max must depend on s only");
      if (p.t_max(p.s0, 0) < 0 || p.t_max(p.s1, 0) < 0) throw ParseError("t_max negative on piece");
      for (const auto* v : {&p.cls.base, &p.cls.ds, &p.cls.dt})
        if (v->size() != lat.rank()) throw ParseError("family class has wrong length");
      for (const auto& f : p.fixed)
        if (!lat.curve_index(f.curve) && f.curve.empty()) throw ParseError("fixed curve without name");
    }
  }
};

inline ZariskiResult zariski_at(const NSLattice& lat, const DivisorFamily& fam, const Rational& s, const Rational& t) {
  const auto& piece = fam.pieces[fam.locate(s)];
  if (!piece.contains(s, t))
    throw OutsideRegion("(s,t) = (" + to_string(s) + ", " + to_string(t) + ") outside family region");
  return zariski(lat, piece.cls.at(s, t));
}

inline Rational vol_at(const NSLattice& lat, const DivisorFamily& fam, const Rational& s, const Rational& t) {
  return zariski_at(lat, fam, s, t).volume;
}

// ---------------------------------------------------------------------------
// Bivariate polynomials in (s, t)

struct BiPoly {
  std::map<std::pair<int, int>, Rational> c;  // (deg s, deg t) -> coefficient

  void add(int i, int j, const Rational& v) {
    auto& x = c[{i, j}];
    x += v;
    if (x == 0) c.erase({i, j});
  }
  Rational operator()(const Rational& s, const Rational& t) const {
    Rational acc = 0;
    for (const auto& [k, v] : c) {
      Rational term = v;
      for (int a = 0; a < k.first; ++a) term *= s;
      for (int b = 0; b < k.second; ++b) term *= t;
      acc += term;
    }
    return acc;
  }
  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.c == b.c; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    BiPoly r;
    for (const auto& [ka, va] : a.c)
      for (const auto& [kb, vb] : b.c) r.add(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
  }
  friend BiPoly operator+(BiPoly a, const BiPoly& b) {
    for (const auto& [k, v] : b.c) a.add(k.first, k.second, v);
    return a;
  }
  static BiPoly from(const Affine2& a) {
    BiPoly r;
    r.add(0, 0, a.c);
    r.add(1, 0, a.cs);
    r.add(0, 1, a.ct);
    return r;
  }

  /// int_{lo(s)}^{hi(s)} p(s,t) dt as a polynomial in s.
  Poly integrate_t(const Poly& lo, const Poly& hi) const {
    Poly acc;
    for (const auto& [k, v] : c) {
      Poly sp = Poly::monomial(v / Rational(k.second + 1), static_cast<std::size_t>(k.first));
      acc += sp * (pow(hi, static_cast<unsigned>(k.second + 1)) - pow(lo, static_cast<unsigned>(k.second + 1)));
    }
    return acc;
  }
};

inline std::string to_string(const BiPoly& p) {
  if (p.c.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
    const auto& [k, v] = *it;
    os << (first ? (v < 0 ? "-" : "") : (v < 0 ? " - " : " + "));
    bool mono = k.first + k.second > 0;
    if (abs(v) != 1 || !mono) os << to_string(abs(v)) << (mono ? "*" : "");
    if (k.first) os << "s" << (k.first > 1 ? "^" + std::to_string(k.first) : "");
    if (k.first && k.second) os << "*";
    if (k.second) os << "t" << (k.second > 1 ? "^" + std::to_string(k.second) : "");
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Chamber partition

using Point2 = std::array<Rational, 2>;  // (s, t)

/// Line a*s + b*t + c = 0, scaled so b = 1, or a = 1 when b = 0.
struct Wall {
  Rational a, b, c;
  static Wall through(const Point2& p, const Point2& q) {
    Rational a = q[1] - p[1], b = p[0] - q[0];
    Rational c = -(a * p[0] + b * p[1]);
    Rational k = b != 0 ? b : a;
    return {a / k, b / k, c / k};
  }
  friend bool operator<(const Wall& x, const Wall& y) { return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c); }
  friend bool operator==(const Wall& x, const Wall& y) { return x.a == y.a && x.b == y.b && x.c == y.c; }
};

inline std::string to_string(const Wall& w) {
  if (w.b == 0) return "s = " + to_string(-w.c);
  Affine2 rhs{-w.c, -w.a, 0};
  return "t = " + to_string(rhs);
}

/// {s0 <= s <= s1, lo(s) <= t <= hi(s)}, lo and hi of degree <= 1.
struct Trapezoid {
  Rational s0, s1;
  Poly lo, hi;
};

struct Cell {
  std::size_t piece = 0;
  std::vector<std::size_t> support;  // curve indices, sorted
  std::vector<Affine2> n_coeffs;     // aligned with support
  AffineClass positive;
  std::vector<Point2> polygon;  // counter-clockwise
  BiPoly volume;
  std::vector<Trapezoid> trapezoids;
  Rational area;
};

struct Partition {
  std::vector<Cell> cells;
  std::vector<Wall> walls;  // interior chamber walls
};

namespace detail {

inline Rational cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

inline Rational polygon_area(const std::vector<Point2>& P) {
  if (P.size() < 3) return 0;
  Rational a = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto& p = P[i];
    const auto& q = P[(i + 1) % P.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return abs(a) / 2;
}

// Keeps {h >= 0} of a convex polygon.
inline std::vector<Point2> clip(const std::vector<Point2>& P, const Affine2& h) {
  std::vector<Point2> out;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const auto& a = P[i];
    const auto& b = P[(i + 1) % P.size()];
    Rational ha = h(a[0], a[1]), hb = h(b[0], b[1]);
    if (ha >= 0) out.push_back(a);
    if ((ha > 0 && hb < 0) || (ha < 0 && hb > 0)) {
      Rational lam = ha / (ha - hb);
      out.push_back({a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1])});
    }
  }
  // Drop repeated and collinear vertices.
  std::vector<Point2> clean;
  for (const auto& p : out)
    if (clean.empty() || clean.back() != p) clean.push_back(p);
  while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
  bool changed = true;
  while (changed && clean.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const auto& p = clean[(i + clean.size() - 1) % clean.size()];
      const auto& q = clean[(i + 1) % clean.size()];
      if (cross(p, clean[i], q) == 0) {
        clean.erase(clean.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return clean;
}

inline std::vector<Point2> piece_polygon(const FamilyPiece& p) {
  std::vector<Point2> poly{{p.s0, Rational(0)}, {p.s1, Rational(0)}};
  Rational h1 = p.t_max(p.s1, 0), h0 = p.t_max(p.s0, 0);
  if (h1 > 0) poly.push_back({p.s1, h1});
  if (h0 > 0) poly.push_back({p.s0, h0});
  return poly;
}

// Affine map (s,t) -> D(s,t).C
inline Affine2 dot_affine(const NSLattice& lat, const AffineClass& D, const DivisorClass& C) {
  return {lat.dot(D.base, C), lat.dot(D.ds, C), lat.dot(D.dt, C)};
}

// Vertical decomposition of a convex polygon into trapezoids with affine bounds.
inline std::vector<Trapezoid> trapezoids(const std::vector<Point2>& P) {
  std::set<Rational> xs;
  for (const auto& p : P) xs.insert(p[0]);
  std::vector<Rational> sx(xs.begin(), xs.end());
  std::vector<Trapezoid> out;
  for (std::size_t k = 0; k + 1 < sx.size(); ++k) {
    Rational mid = (sx[k] + sx[k + 1]) / 2;
    std::vector<std::pair<Rational, Poly>> hits;  // (t at mid, edge line)
    for (std::size_t i = 0; i < P.size(); ++i) {
      const auto& a = P[i];
      const auto& b = P[(i + 1) % P.size()];
      if (a[0] == b[0]) continue;
      Rational lo = std::min(a[0], b[0]), hi = std::max(a[0], b[0]);
      if (!(lo <= sx[k] && sx[k + 1] <= hi)) continue;
      Rational slope = (b[1] - a[1]) / (b[0] - a[0]);
      Poly line({a[1] - slope * a[0], slope});
      hits.emplace_back(line(mid), line);
    }
    if (hits.size() < 2) continue;
    auto mn = std::min_element(hits.begin(), hits.end(), [](auto& x, auto& y) { return x.first < y.first; });
    auto mx = std::max_element(hits.begin(), hits.end(), [](auto& x, auto& y) { return x.first < y.first; });
    if (mn->first == mx->first) continue;
    out.push_back({sx[k], sx[k + 1], mn->second, mx->second});
  }
  return out;
}

// Interior sample points of a convex polygon with varied barycentric weights.
inline std::vector<Point2> interior_samples(const std::vector<Point2>& P, std::size_t count) {
  Point2 c{0, 0};
  for (const auto& p : P) {
    c[0] += p[0];
    c[1] += p[1];
  }
  c[0] /= Rational(static_cast<long long>(P.size()));
  c[1] /= Rational(static_cast<long long>(P.size()));
  std::vector<Point2> out;
  static const long long num[] = {1, 2, 3, 5, 7, 4, 6, 8, 9, 11, 13, 10};
  for (std::size_t k = 0; out.size() < count; ++k) {
    const auto& v = P[k % P.size()];
    const auto& w = P[(k + 1) % P.size()];
    Rational lam = make_rational(num[k % 12], 17 + static_cast<long long>(k / 12));
    Rational mu = make_rational(num[(k + 5) % 12], 31 + static_cast<long long>(k / 12));
    out.push_back({c[0] + lam * (v[0] - c[0]) + mu * (w[0] - c[0]) / 2,
                   c[1] + lam * (v[1] - c[1]) + mu * (w[1] - c[1]) / 2});
  }
  return out;
}

// Bivariate quadratic through 6 points; nullopt if the points are not unisolvent.
inline std::optional<BiPoly> fit_quadratic(const std::vector<Point2>& pts, const std::vector<Rational>& vals) {
  static const int mono[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  Matrix A(6, std::vector<Rational>(6));
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      Rational v = 1;
      for (int a = 0; a < mono[j][0]; ++a) v *= pts[i][0];
      for (int b = 0; b < mono[j][1]; ++b) v *= pts[i][1];
      A[i][j] = v;
    }
  auto x = linalg::solve(A, vals);
  if (!x) return std::nullopt;
  BiPoly p;
  for (std::size_t j = 0; j < 6; ++j) p.add(mono[j][0], mono[j][1], (*x)[j]);
  return p;
}

}  // namespace detail

/// Chamber cells of one family piece.
inline std::vector<Cell> piece_cells(const NSLattice& lat, const FamilyPiece& piece, std::size_t piece_index) {
  using namespace detail;
  const auto region = piece_polygon(piece);
  const Rational region_area = polygon_area(region);
  if (region_area == 0) return {};
  std::set<std::vector<std::size_t>> tried;
  std::vector<Cell> cells;
  Rational covered = 0;
  for (int n = 6; n <= 96 && covered != region_area; n *= 2) {
    for (int i = 0; i < n && covered != region_area; ++i) {
      Rational s = piece.s0 + (piece.s1 - piece.s0) * make_rational(2 * i + 1, 2 * n);
      Rational top = piece.t_max(s, 0);
      for (int j = 0; j < n && covered != region_area; ++j) {
        Rational t = top * make_rational(2 * j + 1, 2 * n);
        auto S = zariski(lat, piece.cls.at(s, t)).support();
        if (!tried.insert(S).second) continue;
        // Negative-part coefficients as affine functions of (s,t).
        Cell cell;
        cell.piece = piece_index;
        cell.support = S;
        cell.positive = piece.cls;
        if (!S.empty()) {
          Matrix G = support_gram(lat, S);
          std::vector<Affine2> rhs;
          for (auto k : S) rhs.push_back(dot_affine(lat, piece.cls, lat.curves[k].cls));
          std::vector<Rational> b0, bs, bt;
          for (const auto& r : rhs) {
            b0.push_back(r.c);
            bs.push_back(r.cs);
            bt.push_back(r.ct);
          }
          auto x0 = linalg::solve(G, b0), xs = linalg::solve(G, bs), xt = linalg::solve(G, bt);
          if (!x0 || !xs || !xt) throw SingularGram("support Gram matrix is singular");
          for (std::size_t k = 0; k < S.size(); ++k) {
            Affine2 a{(*x0)[k], (*xs)[k], (*xt)[k]};
            cell.n_coeffs.push_back(a);
            const auto& C = lat.curves[S[k]].cls;
            cell.positive.base = axpy(-a.c, C, cell.positive.base);
            cell.positive.ds = axpy(-a.cs, C, cell.positive.ds);
            cell.positive.dt = axpy(-a.ct, C, cell.positive.dt);
          }
        }
        std::vector<Point2> poly = region;
        for (const auto& a : cell.n_coeffs) poly = clip(poly, a);
        for (std::size_t k = 0; k < lat.curves.size() && poly.size() >= 3; ++k) {
          if (std::find(S.begin(), S.end(), k) != S.end()) continue;
          poly = clip(poly, dot_affine(lat, cell.positive, lat.curves[k].cls));
        }
        cell.area = polygon_area(poly);
        if (cell.area == 0) continue;
        // Make counter-clockwise.
        if (cross(poly[0], poly[1], poly[2]) < 0) std::reverse(poly.begin(), poly.end());
        cell.polygon = poly;
        covered += cell.area;
        cells.push_back(std::move(cell));
      }
    }
  }
  if (covered != region_area)
    throw WallDetectionFailure("chambers cover " + to_string(covered) + " of area " + to_string(region_area));
  for (auto& cell : cells) {
    auto pts = interior_samples(cell.polygon, 12);
    std::optional<BiPoly> fit;
    for (std::size_t off = 0; off + 6 <= pts.size() && !fit; ++off) {
      std::vector<Point2> six(pts.begin() + static_cast<long>(off), pts.begin() + static_cast<long>(off) + 6);
      std::vector<Rational> v;
      for (const auto& p : six) v.push_back(zariski(lat, piece.cls.at(p[0], p[1])).volume);
      fit = fit_quadratic(six, v);
    }
    if (!fit) throw WallDetectionFailure("sample points are not unisolvent for a quadratic");
    for (const auto& p : interior_samples(cell.polygon, 24)) {
      if ((*fit)(p[0], p[1]) != zariski(lat, piece.cls.at(p[0], p[1])).volume)
        throw WallDetectionFailure("volume is not a single quadratic on a chamber cell");
    }
    cell.volume = *fit;
    cell.trapezoids = trapezoids(cell.polygon);
  }
  return cells;
}

inline Partition breakpoint_partition(const NSLattice& lat, const DivisorFamily& fam) {
  Partition part;
  std::set<Wall> boundary, walls;
  for (std::size_t i = 0; i < fam.pieces.size(); ++i) {
    auto region = detail::piece_polygon(fam.pieces[i]);
    for (std::size_t k = 0; k < region.size(); ++k)
      boundary.insert(Wall::through(region[k], region[(k + 1) % region.size()]));
    auto cells = piece_cells(lat, fam.pieces[i], i);
    for (auto& c : cells) part.cells.push_back(std::move(c));
  }
  for (const auto& c : part.cells)
    for (std::size_t k = 0; k < c.polygon.size(); ++k) {
      Wall w = Wall::through(c.polygon[k], c.polygon[(k + 1) % c.polygon.size()]);
      if (!boundary.count(w)) walls.insert(w);
    }
  part.walls.assign(walls.begin(), walls.end());
  return part;
}

}  // namespace kstab
