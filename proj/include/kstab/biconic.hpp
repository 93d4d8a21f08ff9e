#pragma once

// (2,2)-forms on P1 x P1: ruling components, singular points over Q or Q(sqrt d), local
// singularity types and SL2 x SL2 GIT classes.
//
// f = sum a[i][j] X^i Y^j U^(2-i) V^(2-j).

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/integer.hpp>

#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"

namespace kstab {

// ---------------------------------------------------------------------------
// Q(sqrt d)

/// a + b sqrt(d); d == 0 marks a rational value (b == 0).
struct QNum {
  Rational a = 0, b = 0;
  Integer d = 0;

  QNum() = default;
  QNum(const Rational& r) : a(r) {}  // NOLINT(google-explicit-constructor)
  QNum(int r) : a(r) {}              // NOLINT(google-explicit-constructor)
  QNum(Rational a_, Rational b_, Integer d_) : a(std::move(a_)), b(std::move(b_)), d(std::move(d_)) {
    if (b == 0) d = 0;
  }

  bool is_rational() const { return b == 0; }
  bool is_zero() const { return a == 0 && b == 0; }
};

namespace detail {

inline bool is_square(const Integer& n, Integer* root = nullptr) {
  if (n < 0) return false;
  Integer r = boost::multiprecision::sqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

// Re-expresses y in the field of x when both are irrational.
inline void unify(QNum& x, QNum& y) {
  if (x.is_rational() || y.is_rational() || x.d == y.d) {
    if (x.is_rational() && !y.is_rational()) x.d = y.d;
    if (y.is_rational() && !x.is_rational()) y.d = x.d;
    return;
  }
  // sqrt(dy) = sqrt(dx dy) / dx * sqrt(dx)
  Integer r;
  if (!is_square(x.d * y.d, &r)) throw IrrationalPoint("values lie in different quadratic fields");
  y = QNum(y.a, y.b * Rational(r) / Rational(x.d), x.d);
}

}  // namespace detail

inline QNum operator+(QNum x, QNum y) {
  detail::unify(x, y);
  return QNum(x.a + y.a, x.b + y.b, x.is_rational() ? y.d : x.d);
}
inline QNum operator-(const QNum& x) { return QNum(-x.a, -x.b, x.d); }
inline QNum operator-(const QNum& x, const QNum& y) { return x + (-y); }
inline QNum operator*(QNum x, QNum y) {
  detail::unify(x, y);
  Integer d = x.is_rational() ? y.d : x.d;
  return QNum(x.a * y.a + x.b * y.b * Rational(d), x.a * y.b + x.b * y.a, d);
}
inline QNum inverse(const QNum& x) {
  if (x.is_zero()) throw std::domain_error("QNum: division by zero");
  Rational n = x.a * x.a - x.b * x.b * Rational(x.d);
  return QNum(x.a / n, -x.b / n, x.d);
}
inline QNum operator/(const QNum& x, const QNum& y) { return x * inverse(y); }
inline bool operator==(const QNum& x, const QNum& y) {
  if (!x.is_rational() && !y.is_rational() && x.d != y.d) {
    Integer r;
    if (!detail::is_square(x.d * y.d, &r)) return false;  // irrational elements of different fields
  }
  return (x - y).is_zero();
}
inline bool operator!=(const QNum& x, const QNum& y) { return !(x == y); }

/// Square root of a rational number, adjoining sqrt if needed.
inline QNum qsqrt(const Rational& q) {
  if (q == 0) return QNum();
  Integer num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  Integer n = num * den, r;
  if (detail::is_square(n, &r)) return QNum(Rational(r) / Rational(den));
  // Pull out small square factors so equal fields get equal d.
  Integer sq = 1;
  for (Integer p = 2; p * p <= (n < 0 ? -n : n) && p < 10000; ++p)
    while (n % (p * p) == 0) {
      n /= p * p;
      sq *= p;
    }
  return QNum(0, Rational(sq) / Rational(den), n);
}

/// Square root inside the field of x; throws when a second extension would be needed.
inline QNum qsqrt(const QNum& x) {
  if (x.is_rational()) return qsqrt(x.a);
  // (u + v sqrt d)^2 = x: u^2 is a root of z^2 - a z + d b^2 / 4.
  QNum s = qsqrt(x.a * x.a - Rational(x.d) * x.b * x.b);
  if (s.is_rational())
    for (int sign : {1, -1}) {
      QNum u = qsqrt((x.a + sign * s.a) / 2);
      if (u.is_rational() && u.a != 0) return QNum(u.a, x.b / (2 * u.a), x.d);
    }
  throw IrrationalPoint("square root leaves the quadratic field");
}

inline std::string to_string(const QNum& x) {
  if (x.is_rational()) return to_string(x.a);
  std::ostringstream os;
  if (x.a != 0) os << to_string(x.a) << (x.b > 0 ? " + " : " - ");
  else if (x.b < 0) os << "-";
  Rational ab = abs(x.b);
  if (ab != 1) os << to_string(ab) << "*";
  os << "sqrt(" << x.d << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers

namespace detail {

inline std::pair<Poly, Poly> divmod(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> r(num.coeffs().begin(), num.coeffs().end());
  const int dd = den.degree();
  const Rational lead = den.coeff(static_cast<std::size_t>(dd));
  std::vector<Rational> q(r.size() > static_cast<std::size_t>(dd) ? r.size() - static_cast<std::size_t>(dd) : 1);
  for (int k = static_cast<int>(r.size()) - 1; k >= dd; --k) {
    Rational c = r[static_cast<std::size_t>(k)] / lead;
    if (c == 0) continue;
    q[static_cast<std::size_t>(k - dd)] = c;
    for (int j = 0; j <= dd; ++j) r[static_cast<std::size_t>(k - dd + j)] -= c * den.coeff(static_cast<std::size_t>(j));
  }
  return {Poly(q), Poly(r)};
}

inline Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return p * (1 / p.coeff(static_cast<std::size_t>(p.degree())));
}

inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline Poly squarefree(const Poly& p) {
  if (p.degree() <= 0) return p;
  return monic(divmod(p, gcd(p, p.derivative())).first);
}

inline QNum eval(const Poly& p, const QNum& x) {
  QNum acc;
  for (int k = p.degree(); k >= 0; --k) acc = acc * x + QNum(p.coeff(static_cast<std::size_t>(k)));
  return acc;
}

// Distinct roots of a polynomial of degree <= 2 (after squarefree reduction).
inline std::vector<QNum> small_roots(const Poly& p0) {
  if (p0.is_zero()) throw std::domain_error("roots of the zero polynomial");
  Poly p = squarefree(p0);
  if (p.degree() <= 0) return {};
  if (p.degree() == 1) return {QNum(-p.coeff(0) / p.coeff(1))};
  if (p.degree() > 2) throw IrrationalPoint("candidate polynomial of degree " + std::to_string(p.degree()));
  const Rational &a = p.coeff(2), &b = p.coeff(1), &c = p.coeff(0);
  QNum s = qsqrt(b * b - 4 * a * c);
  return {(QNum(-b) + s) / QNum(2 * a), (QNum(-b) - s) / QNum(2 * a)};
}

// Roots of alpha x^2 + beta x + gamma over the field of the coefficients.
inline std::vector<QNum> quadratic_roots(const QNum& alpha, const QNum& beta, const QNum& gamma) {
  if (alpha.is_zero()) {
    if (beta.is_zero()) {
      if (gamma.is_zero()) throw std::domain_error("quadratic_roots: zero polynomial");
      return {};
    }
    return {-gamma / beta};
  }
  QNum disc = beta * beta - QNum(4) * alpha * gamma;
  if (disc.is_zero()) return {-beta / (QNum(2) * alpha)};
  QNum s = qsqrt(disc);
  return {(-beta + s) / (QNum(2) * alpha), (-beta - s) / (QNum(2) * alpha)};
}

inline Rational binom(int n, int k) {
  static const int table[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
  return Rational(table[n][k]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Forms

using Form22 = std::array<std::array<Rational, 3>, 3>;
using LocalCoeffs = std::array<std::array<QNum, 3>, 3>;

struct BiconicForm {
  Form22 a{};

  static BiconicForm from_list(const std::vector<Rational>& v) {
    if (v.size() != 9) throw ParseError("a biconic form needs 9 coefficients");
    BiconicForm f;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(3 * i + j)];
    f.validate();
    return f;
  }
  void validate() const {
    for (const auto& row : a)
      for (const auto& x : row)
        if (x != 0) return;
    throw ParseError("biconic form is identically zero");
  }
  const Rational& operator()(int i, int j) const { return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  Rational& operator()(int i, int j) { return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
  friend bool operator==(const BiconicForm& x, const BiconicForm& y) { return x.a == y.a; }

  /// (X,U) <-> (Y,V).
  BiconicForm transposed() const {
    BiconicForm g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = (*this)(j, i);
    return g;
  }
  /// X <-> U.
  BiconicForm flip_first() const {
    BiconicForm g;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g(i, j) = (*this)(2 - i, j);
    return g;
  }
  /// Substitutes X -> alpha X + beta U, U -> gamma X + delta U.
  BiconicForm mobius_first(const Rational& alpha, const Rational& beta, const Rational& gamma, const Rational& delta) const {
    // (alpha X + beta U)^i (gamma X + delta U)^(2-i) expanded as sum_k e[i][k] X^k U^(2-k).
    Poly px({beta, alpha}), pu({delta, gamma});  // in x = X/U
    std::array<Poly, 3> e{pow(pu, 2), px * pu, pow(px, 2)};
    BiconicForm g;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k <= e[static_cast<std::size_t>(i)].degree(); ++k)
          g(k, j) += (*this)(i, j) * e[static_cast<std::size_t>(i)].coeff(static_cast<std::size_t>(k));
    return g;
  }
  BiconicForm mobius_second(const Rational& alpha, const Rational& beta, const Rational& gamma, const Rational& delta) const {
    return transposed().mobius_first(alpha, beta, gamma, delta).transposed();
  }

  /// Coefficients of X^2, X, 1 in the chart U = V = 1, as polynomials in Y.
  std::array<Poly, 3> x_coeffs() const {
    std::array<Poly, 3> c;
    for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = Poly({(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)});
    return c;
  }
  /// Discriminant in X as a polynomial in Y.
  Poly x_discriminant() const {
    auto c = x_coeffs();
    return c[1] * c[1] - Rational(4) * c[2] * c[0];
  }
};

inline std::string to_string(const BiconicForm& f) {
  std::ostringstream os;
  bool first = true;
  static const char* xs[3] = {"U^2", "X*U", "X^2"};
  static const char* ys[3] = {"V^2", "Y*V", "Y^2"};
  for (int i = 2; i >= 0; --i)
    for (int j = 2; j >= 0; --j) {
      const Rational& c = f(i, j);
      if (c == 0) continue;
      os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
      if (abs(c) != 1) os << to_string(abs(c)) << "*";
      os << xs[i] << "*" << ys[j];
      first = false;
    }
  return first ? "0" : os.str();
}

/// Taylor coefficients of f(x + X, y + Y) in the chart U = V = 1.
inline LocalCoeffs local_coefficients(const BiconicForm& f, const QNum& x, const QNum& y) {
  LocalCoeffs c;
  std::array<QNum, 3> xp{QNum(1), x, x * x}, yp{QNum(1), y, y * y};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      QNum acc;
      for (int ii = i; ii < 3; ++ii)
        for (int jj = j; jj < 3; ++jj) {
          if (f(ii, jj) == 0) continue;
          acc = acc + QNum(f(ii, jj) * detail::binom(ii, i) * detail::binom(jj, j)) * xp[static_cast<std::size_t>(ii - i)] *
                          yp[static_cast<std::size_t>(jj - j)];
        }
      c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
    }
  return c;
}

// ---------------------------------------------------------------------------
// Rulings

struct P1Point {
  bool infinite = false;  // [1:0]
  QNum value;             // X/U when finite
  friend bool operator==(const P1Point& p, const P1Point& q) {
    return p.infinite == q.infinite && (p.infinite || p.value == q.value);
  }
};

inline std::string to_string(const P1Point& p) { return p.infinite ? "[1:0]" : "[" + to_string(p.value) + ":1]"; }

struct RulingFactor {
  int family = 1;  // 1: X = r U, a member of |O(1,0)|; 2: Y = r V
  P1Point root;
  int multiplicity = 1;
};

namespace detail {

inline std::vector<RulingFactor> first_family_rulings(const BiconicForm& f, int family) {
  // X - rU divides f iff p_j(r) = a_2j r^2 + a_1j r + a_0j vanishes for j = 0, 1, 2.
  Poly g;
  int inf_mult = 2;
  bool any = false;
  for (int j = 0; j < 3; ++j) {
    Poly pj({f(0, j), f(1, j), f(2, j)});
    if (pj.is_zero()) continue;
    any = true;
    g = g.is_zero() ? monic(pj) : gcd(g, pj);
    inf_mult = std::min(inf_mult, 2 - pj.degree());
  }
  std::vector<RulingFactor> out;
  if (!any) return out;
  if (inf_mult > 0) out.push_back({family, P1Point{true, QNum()}, inf_mult});
  if (g.degree() <= 0) return out;
  Poly sf = squarefree(g);
  for (const auto& r : small_roots(sf)) {
    int m = 1;  // conjugate roots of an irreducible quadratic are simple
    if (r.is_rational()) {
      m = 0;
      for (Poly h = g; h.degree() > 0 && h(r.a) == 0; h = divmod(h, Poly({-r.a, Rational(1)})).first) ++m;
    }
    out.push_back({family, P1Point{false, r}, m});
  }
  return out;
}

}  // namespace detail

inline std::vector<RulingFactor> ruling_factors(const BiconicForm& f) {
  f.validate();
  auto out = detail::first_family_rulings(f, 1);
  for (auto& r : detail::first_family_rulings(f.transposed(), 2)) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Singular points

enum class SingTag { Ia, Ib, Ic, IIa, IIb, IIc, IId };

inline const char* to_string(SingTag t) {
  switch (t) {
    case SingTag::Ia: return "Ia";
    case SingTag::Ib: return "Ib";
    case SingTag::Ic: return "Ic";
    case SingTag::IIa: return "IIa";
    case SingTag::IIb: return "IIb";
    case SingTag::IIc: return "IIc";
    case SingTag::IId: return "IId";
  }
  return "?";
}

struct SingularPoint {
  P1Point x, y;
  SingTag tag;
};

struct NonReducedPart {
  std::string component;  // "double ruling" or "double (1,1)-curve"
  SingTag tag;
};

struct SingularityReport {
  std::vector<SingularPoint> points;
  std::vector<NonReducedPart> nonreduced;
  bool smooth() const { return points.empty() && nonreduced.empty(); }
};

/// Type of a singular point placed at the origin of the chart.
inline SingTag classify_local(const LocalCoeffs& c) {
  auto z = [&](int i, int j) { return c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero(); };
  bool ruling_x = z(0, 2);  // X = 0 lies on the curve
  bool ruling_y = z(2, 0);
  if (!ruling_x && !ruling_y) {
    QNum disc = c[1][1] * c[1][1] - QNum(4) * c[2][0] * c[0][2];
    return disc.is_zero() ? SingTag::Ib : SingTag::Ia;
  }
  if ((ruling_x && z(1, 1) && z(1, 2)) || (ruling_y && z(1, 1) && z(2, 1))) return SingTag::IId;
  if (!z(1, 1)) return SingTag::IIa;
  if (ruling_x && ruling_y) return SingTag::IIc;
  return SingTag::IIb;
}

inline bool is_reduced(const BiconicForm& f) {
  return !f.x_discriminant().is_zero() && !f.transposed().x_discriminant().is_zero();
}

namespace detail {

// Singular points with finite coordinates in the chart U = V = 1.
inline std::vector<std::pair<QNum, QNum>> affine_singular_points(const BiconicForm& f) {
  auto c = f.x_coeffs();  // A = c[2], B = c[1], C = c[0]
  Poly D = f.x_discriminant();
  std::vector<QNum> ys;
  auto add = [&](const QNum& y) {
    for (const auto& v : ys)
      if (v == y) return;
    ys.push_back(y);
  };
  Poly g = gcd(D, D.derivative());
  if (g.degree() > 0)
    for (const auto& y : small_roots(g)) add(y);
  if (!c[2].is_zero() && c[2].degree() > 0)
    for (const auto& y : small_roots(c[2])) add(y);

  auto fy = [&](const QNum& x, const QNum& y) {
    QNum acc;
    for (int i = 0; i < 3; ++i)
      for (int j = 1; j < 3; ++j) {
        QNum term = QNum(f(i, j) * j);
        for (int k = 0; k < i; ++k) term = term * x;
        if (j == 2) term = term * y;
        acc = acc + term;
      }
    return acc;
  };
  auto fval = [&](const QNum& x, const QNum& y) {
    QNum acc;
    for (int i = 0; i < 3; ++i) acc = acc + eval(c[static_cast<std::size_t>(i)], y) * (i == 0 ? QNum(1) : i == 1 ? x : x * x);
    return acc;
  };

  std::vector<std::pair<QNum, QNum>> pts;
  auto push = [&](const QNum& x, const QNum& y) {
    for (const auto& p : pts)
      if (p.first == x && p.second == y) return;
    pts.emplace_back(x, y);
  };
  for (const auto& y : ys) {
    QNum A = eval(c[2], y), B = eval(c[1], y), C = eval(c[0], y);
    if (!A.is_zero()) {
      QNum x = -B / (QNum(2) * A);
      if (fval(x, y).is_zero() && fy(x, y).is_zero()) push(x, y);
      continue;
    }
    if (!B.is_zero() || !C.is_zero()) continue;
    // The ruling Y = y is a component; singular where f_Y vanishes on it.
    QNum q2, q1, q0;
    for (int j = 1; j < 3; ++j) {
      QNum yj = j == 2 ? QNum(2) * y : QNum(1);
      q2 = q2 + QNum(f(2, j)) * yj;
      q1 = q1 + QNum(f(1, j)) * yj;
      q0 = q0 + QNum(f(0, j)) * yj;
    }
    if (q2.is_zero() && q1.is_zero() && q0.is_zero()) throw std::logic_error("double ruling in reduced branch");
    for (const auto& x : quadratic_roots(q2, q1, q0)) push(x, y);
  }
  return pts;
}

}  // namespace detail

inline SingularityReport singular_points(const BiconicForm& f) {
  f.validate();
  SingularityReport rep;
  if (!is_reduced(f)) {
    for (const auto& r : ruling_factors(f))
      if (r.multiplicity >= 2) rep.nonreduced.push_back({"double ruling " + std::string(r.family == 1 ? "X" : "Y") + " = " + to_string(r.root), SingTag::IId});
    if (rep.nonreduced.empty()) rep.nonreduced.push_back({"double (1,1)-curve", SingTag::Ic});
    return rep;
  }
  // Charts: (flip X<->U?, flip Y<->V?); keep only points at infinity in flipped directions.
  for (int fx = 0; fx < 2; ++fx)
    for (int fy = 0; fy < 2; ++fy) {
      BiconicForm g = f;
      if (fx) g = g.flip_first();
      if (fy) g = g.transposed().flip_first().transposed();
      for (const auto& [x, y] : detail::affine_singular_points(g)) {
        if ((fx && !x.is_zero()) || (fy && !y.is_zero())) continue;
        SingularPoint p;
        p.x = fx ? P1Point{true, QNum()} : P1Point{false, x};
        p.y = fy ? P1Point{true, QNum()} : P1Point{false, y};
        p.tag = classify_local(local_coefficients(g, x, y));
        rep.points.push_back(p);
      }
    }
  return rep;
}

/// Form with the point moved to ([0:1],[0:1]), as local coefficients.
inline LocalCoeffs centered_at(const BiconicForm& f, const P1Point& x, const P1Point& y) {
  BiconicForm g = f;
  if (x.infinite) g = g.flip_first();
  if (y.infinite) g = g.transposed().flip_first().transposed();
  return local_coefficients(g, x.infinite ? QNum() : x.value, y.infinite ? QNum() : y.value);
}

// ---------------------------------------------------------------------------
// Torus weights and GIT

/// First (a, b) in lexicographic order, |a|,|b| <= bound, giving every nonzero coefficient
/// weight (2i-2)a + (2j-2)b > 0.
inline std::optional<std::pair<int, int>> torus_weight_scan(const LocalCoeffs& c, int bound) {
  for (int a = -bound; a <= bound; ++a)
    for (int b = -bound; b <= bound; ++b) {
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i)
        for (int j = 0; j < 3 && ok; ++j)
          if (!c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_zero() && (2 * i - 2) * a + (2 * j - 2) * b <= 0)
            ok = false;
      if (ok) return std::make_pair(a, b);
    }
  return std::nullopt;
}

inline std::optional<std::pair<int, int>> torus_weight_scan(const BiconicForm& f, int bound) {
  LocalCoeffs c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = QNum(f(i, j));
  return torus_weight_scan(c, bound);
}

enum class GITClass { Stable, Polystable, StrictlySemistable, Unstable };

inline const char* to_string(GITClass c) {
  switch (c) {
    case GITClass::Stable: return "stable";
    case GITClass::Polystable: return "polystable";
    case GITClass::StrictlySemistable: return "strictly-semistable";
    case GITClass::Unstable: return "unstable";
  }
  return "?";
}

inline bool is_semistable(GITClass c) { return c != GITClass::Unstable; }

struct Destabilizer {
  P1Point x, y;  // point moved to the origin
  std::pair<int, int> weights;
};

struct GITVerdict {
  GITClass cls = GITClass::Stable;
  std::optional<Destabilizer> destabilizer;
  std::vector<std::string> components;
  SingularityReport singularities;
  std::string reason;
};

namespace detail {

// f = c P^2 for a binary quartic given by coefficients; returns true when it is so.
inline bool quartic_is_const_times_square(const Poly& D) {
  if (D.is_zero()) return true;
  // Homogeneous (0,4)-form: coefficient k of Y^k V^(4-k).
  std::array<Rational, 5> d{};
  for (int k = 0; k <= D.degree(); ++k) d[static_cast<std::size_t>(k)] = D.coeff(static_cast<std::size_t>(k));
  int top = 4;
  while (d[static_cast<std::size_t>(top)] == 0) --top;
  int bot = 0;
  while (d[static_cast<std::size_t>(bot)] == 0) ++bot;
  if (top % 2 || bot % 2) return false;
  // P has support [bot/2, top/2], leading coefficient 1; c = d[top].
  const Rational c = d[static_cast<std::size_t>(top)];
  std::array<Rational, 3> p{};
  const int hi = top / 2, lo = bot / 2;
  p[static_cast<std::size_t>(hi)] = 1;
  for (int k = hi - 1; k >= lo; --k) {
    // coefficient of Y^(hi + k) in P^2 is 2 p_hi p_k + sum over inner pairs
    Rational inner = 0;
    for (int i = k + 1; i < hi; ++i) {
      int jdx = hi + k - i;
      if (jdx > k && jdx < hi) inner += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(jdx)];
    }
    p[static_cast<std::size_t>(k)] = (d[static_cast<std::size_t>(hi + k)] / c - inner) / 2;
  }
  for (int k = 0; k <= 4; ++k) {
    Rational sq = 0;
    for (int i = 0; i <= 2; ++i)
      if (k - i >= 0 && k - i <= 2) sq += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(k - i)];
    if (c * sq != d[static_cast<std::size_t>(k)]) return false;
  }
  return true;
}

inline std::optional<Destabilizer> destabilize_at(const BiconicForm& f, const P1Point& x, const P1Point& y) {
  if (auto w = torus_weight_scan(centered_at(f, x, y), 4)) return Destabilizer{x, y, *w};
  return std::nullopt;
}

}  // namespace detail

inline GITVerdict git_classify(const BiconicForm& f) {
  f.validate();
  GITVerdict v;
  auto rulings = ruling_factors(f);
  int n1 = 0, n2 = 0;
  for (const auto& r : rulings) {
    (r.family == 1 ? n1 : n2) += r.multiplicity;
    v.components.push_back(std::string(r.multiplicity > 1 ? "double " : "") + "ruling " + (r.family == 1 ? "X" : "Y") +
                           " = " + to_string(r.root));
  }
  v.singularities = singular_points(f);

  // Double ruling: any point of it is destabilized.
  for (const auto& r : rulings) {
    if (r.multiplicity < 2) continue;
    v.cls = GITClass::Unstable;
    v.reason = "double ruling";
    P1Point on{false, QNum(0)};
    // A point with a rational second coordinate where the ruling is defined over Q or Q(sqrt d).
    v.destabilizer = r.family == 1 ? detail::destabilize_at(f, r.root, on) : detail::destabilize_at(f, on, r.root);
    return v;
  }
  if (!v.singularities.nonreduced.empty()) {
    v.cls = GITClass::Polystable;
    v.reason = "double smooth (1,1)-curve";
    v.components.push_back("double (1,1)-curve");
    return v;
  }
  if (v.singularities.smooth()) {
    v.cls = GITClass::Stable;
    v.reason = "smooth";
    if (rulings.empty()) v.components.push_back("smooth (2,2)-curve");
    return v;
  }
  if (n1 == 2 && n2 == 2) {
    v.cls = GITClass::Polystable;
    v.reason = "four distinct rulings";
    return v;
  }
  if (rulings.empty() && detail::quartic_is_const_times_square(f.x_discriminant())) {
    v.cls = GITClass::Polystable;
    v.reason = "two smooth (1,1)-curves";
    v.components = {"(1,1)-curve", "(1,1)-curve"};
    return v;
  }
  for (const auto& p : v.singularities.points) {
    if (p.tag == SingTag::IIb || p.tag == SingTag::IIc || p.tag == SingTag::IId) {
      v.cls = GITClass::Unstable;
      v.reason = std::string("singularity of type ") + to_string(p.tag);
      v.destabilizer = detail::destabilize_at(f, p.x, p.y);
      return v;
    }
  }
  v.cls = GITClass::StrictlySemistable;
  v.reason = rulings.empty() ? "irreducible with node or cusp" : "ruling meeting the residual curve transversally";
  if (!rulings.empty()) {
    int rx = 2 - n1, ry = 2 - n2;
    v.components.push_back("(" + std::to_string(rx) + "," + std::to_string(ry) + ")-residual");
  } else {
    v.components.push_back("singular (2,2)-curve");
  }
  return v;
}

}  // namespace kstab
