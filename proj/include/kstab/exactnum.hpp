#pragma once

// Exact rationals, univariate polynomials over Q, piecewise polynomials, and
// closed-form integrals of polynomials against e^{-xi s}.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "kstab/errors.hpp"

namespace kstab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Quad = boost::multiprecision::cpp_bin_float_quad;

// ---------------------------------------------------------------------------
// Rational helpers

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) return Rational(Integer(-num), Integer(-den));
  return Rational(Integer(num), Integer(den));
}

/// Parses "p", "p/q", or a finite decimal such as "-0.125" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw ParseError("empty rational");
  // cpp_int reads a leading 0 as octal
  auto digits = [](std::string d) {
    d.erase(0, std::min(d.find_first_not_of('0'), d.size() - 1));
    return Integer(d);
  };
  auto parse_int = [&](const std::string& part) -> Integer {
    if (part.empty() || part == "-" || part == "+") throw ParseError("bad integer in '" + s + "'");
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    for (std::size_t k = i; k < part.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(part[k]))) throw ParseError("bad integer in '" + s + "'");
    Integer v = digits(part.substr(i));
    return part[0] == '-' ? Integer(-v) : v;
  };
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = parse_int(s.substr(0, slash));
    Integer den = parse_int(s.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + s + "'");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    for (char c : frac)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad decimal '" + s + "'");
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
    Integer w = parse_int(whole);
    Integer f = frac.empty() ? Integer(0) : digits(frac);
    Integer num = (neg ? Integer(-w) : w) * scale + f;
    return Rational(neg ? Integer(-num) : num, scale);
  }
  return Rational(parse_int(s));
}

inline std::string to_string(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

template <class Real>
Real to_real(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if constexpr (std::is_floating_point_v<Real>) {
    return numerator(q).template convert_to<Real>() / denominator(q).template convert_to<Real>();
  } else {
    return Real(numerator(q)) / Real(denominator(q));
  }
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// ---------------------------------------------------------------------------
// Poly

/// Polynomial with rational coefficients, stored in ascending degree.
class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }
  explicit Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly constant(const Rational& v) { return Poly({v}); }
  static Poly monomial(const Rational& v, std::size_t k) {
    std::vector<Rational> c(k + 1);
    c[k] = v;
    return Poly(std::move(c));
  }
  static Poly identity() { return Poly({Rational(0), Rational(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }

  Rational operator()(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  template <class Real>
  Real eval(const Real& x) const {
    Real acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + to_real<Real>(*it);
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * Rational(static_cast<long long>(k));
    return Poly(std::move(d));
  }

  /// Antiderivative vanishing at 0.
  Poly antiderivative() const {
    std::vector<Rational> a(c_.size() + 1);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / Rational(static_cast<long long>(k + 1));
    return Poly(std::move(a));
  }

  /// Returns p(scale * x + shift).
  Poly compose_affine(const Rational& scale, const Rational& shift) const {
    Poly inner({shift, scale});
    Poly acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * inner + Poly::constant(*it);
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) { return *this += -o; }
  Poly& operator*=(const Rational& v) {
    for (auto& x : c_) x *= v;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend Poly operator*(Poly a, const Rational& v) { return a *= v; }
  friend Poly operator*(const Rational& v, Poly a) { return a *= v; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(r));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (std::size_t k = 0; k < p.c_.size(); ++k) {
      if (p.c_[k] == 0) continue;
      if (!first) os << " + ";
      os << "(" << to_string(p.c_[k]) << ")";
      if (k >= 1) os << "*s";
      if (k >= 2) os << "^" << k;
      first = false;
    }
    return os;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<Rational> c_;
};

inline Poly pow(const Poly& p, unsigned k) {
  Poly r = Poly::constant(1);
  for (unsigned i = 0; i < k; ++i) r = r * p;
  return r;
}

/// Exact definite integral of p over [a, b].
inline Rational integrate(const Poly& p, const Rational& a, const Rational& b) {
  Poly anti = p.antiderivative();
  return anti(b) - anti(a);
}

// ---------------------------------------------------------------------------
// Exponentially weighted integrals

/// Below this |xi| the integral is expanded as a Taylor series in xi.
inline constexpr double kTaylorXiThreshold = 0x1p-20;
inline constexpr int kTaylorTerms = 8;

namespace detail {

// J_k = int_0^h u^k e^{-xi u} du for k = 0..kmax, with xi != 0.
//
// For |xi h| > 1 the forward recurrence
//   J_k = -h^k e^{-xi h}/xi + (k/xi) J_{k-1}
// is used. Otherwise J_k = k!/xi^{k+1} e^{-x} sum_{j>k} x^j/j!, x = xi h,
// which is the same closed form with the cancelling head of the series removed.
template <class Real>
std::vector<Real> exp_moments(const Real& xi, const Real& h, int kmax) {
  using std::abs;
  using std::exp;
  std::vector<Real> J(static_cast<std::size_t>(kmax) + 1);
  const Real x = xi * h;
  const Real ex = exp(-x);
  if (abs(x) > 1) {
    J[0] = (1 - ex) / xi;
    Real hk = 1;
    for (int k = 1; k <= kmax; ++k) {
      hk *= h;
      J[static_cast<std::size_t>(k)] = -hk * ex / xi + (Real(k) / xi) * J[static_cast<std::size_t>(k) - 1];
    }
    return J;
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  // J_k = h^{k+1} e^{-x} sum_{j>=0} k! x^j / (k+1+j)!
  Real hk1 = h;
  for (int k = 0; k <= kmax; ++k) {
    Real term = Real(1) / Real(k + 1);  // k!/(k+1)!
    Real sum = term;
    for (int j = 1; j < 400; ++j) {
      term *= x / Real(k + 1 + j);
      sum += term;
      if (abs(term) <= eps * abs(sum)) break;
    }
    J[static_cast<std::size_t>(k)] = hk1 * ex * sum;
    hk1 *= h;
  }
  return J;
}

}  // namespace detail

/// int_a^b p(s) e^{-xi s} ds.
template <class Real>
Real expweight_integral(const Poly& p, const Real& xi, const Rational& a, const Rational& b) {
  using std::abs;
  using std::exp;
  if (a > b) throw std::invalid_argument("expweight_integral: a > b");
  if (p.is_zero() || a == b) return Real(0);
  if (abs(xi) < Real(kTaylorXiThreshold)) {
    // sum_n (-xi)^n/n! int p(s) s^n ds, each moment exact.
    Real acc = 0;
    Real coef = 1;
    Poly moment = p;
    for (int n = 0; n < kTaylorTerms; ++n) {
      acc += coef * to_real<Real>(integrate(moment, a, b));
      moment = moment * Poly::identity();
      coef *= -xi / Real(n + 1);
    }
    return acc;
  }
  // Shift to u = s - a so the moments are taken on [0, b - a].
  const Poly q = p.compose_affine(Rational(1), a);
  const Real h = to_real<Real>(b - a);
  const auto J = detail::exp_moments<Real>(xi, h, q.degree());
  Real acc = 0;
  for (int k = 0; k <= q.degree(); ++k) acc += to_real<Real>(q.coeff(static_cast<std::size_t>(k))) * J[static_cast<std::size_t>(k)];
  return exp(-xi * to_real<Real>(a)) * acc;
}

// ---------------------------------------------------------------------------
// PiecewisePoly

/// Polynomial pieces on [b_0, b_1), ..., [b_{n-1}, b_n]; zero outside.
class PiecewisePoly {
 public:
  PiecewisePoly() = default;
  PiecewisePoly(std::vector<Rational> breakpoints, std::vector<Poly> pieces)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
      if (!breaks_.empty()) throw std::invalid_argument("PiecewisePoly: breakpoints without pieces");
      return;
    }
    if (breaks_.size() != pieces_.size() + 1)
      throw std::invalid_argument("PiecewisePoly: need one more breakpoint than pieces");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i - 1] < breaks_[i])) throw std::invalid_argument("PiecewisePoly: breakpoints not increasing");
  }

  bool empty() const { return pieces_.empty(); }
  std::size_t size() const { return pieces_.size(); }
  const std::vector<Rational>& breakpoints() const { return breaks_; }
  const std::vector<Poly>& pieces() const { return pieces_; }
  const Poly& piece(std::size_t i) const { return pieces_.at(i); }
  const Rational& lower() const { return breaks_.front(); }
  const Rational& upper() const { return breaks_.back(); }

  /// Index of the piece whose interval contains x; interior breakpoints go right.
  std::size_t locate(const Rational& x) const {
    if (empty() || x < lower() || x > upper()) throw std::out_of_range("PiecewisePoly: point outside support");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, pieces_.size() - 1);
  }

  Rational operator()(const Rational& x) const {
    if (empty() || x < lower() || x > upper()) return 0;
    return pieces_[locate(x)](x);
  }

  template <class Real>
  Real eval(const Real& x) const {
    if (empty()) return Real(0);
    if (x < to_real<Real>(lower()) || x > to_real<Real>(upper())) return Real(0);
    std::size_t idx = 0;
    while (idx + 1 < pieces_.size() && x >= to_real<Real>(breaks_[idx + 1])) ++idx;
    return pieces_[idx].eval(x);
  }

  /// Same function with the extra breakpoints inserted (points outside the support are ignored).
  PiecewisePoly refined(const std::vector<Rational>& extra) const {
    std::vector<Rational> bs = breaks_;
    for (const auto& x : extra)
      if (x > lower() && x < upper()) bs.push_back(x);
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    std::vector<Poly> ps;
    for (std::size_t i = 0; i + 1 < bs.size(); ++i) ps.push_back(pieces_[locate(bs[i])]);
    return {std::move(bs), std::move(ps)};
  }

  /// Each piece multiplied by q.
  PiecewisePoly times(const Poly& q) const {
    std::vector<Poly> ps;
    for (const auto& p : pieces_) ps.push_back(p * q);
    return {breaks_, std::move(ps)};
  }

  /// Density of the pushforward under s -> scale * s: f(s/scale)/scale.
  PiecewisePoly pushforward_scale(const Rational& scale) const {
    if (scale <= 0) throw std::invalid_argument("pushforward_scale: scale must be positive");
    std::vector<Rational> bs;
    for (const auto& b : breaks_) bs.push_back(b * scale);
    std::vector<Poly> ps;
    for (const auto& p : pieces_) ps.push_back(p.compose_affine(1 / scale, 0) * (1 / scale));
    return {std::move(bs), std::move(ps)};
  }

  friend bool operator==(const PiecewisePoly& a, const PiecewisePoly& b) {
    return a.breaks_ == b.breaks_ && a.pieces_ == b.pieces_;
  }

 private:
  std::vector<Rational> breaks_;
  std::vector<Poly> pieces_;
};

/// Exact integral of f over its support.
inline Rational pw_mass(const PiecewisePoly& f) {
  Rational m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) m += integrate(f.piece(i), f.breakpoints()[i], f.breakpoints()[i + 1]);
  return m;
}

template <class Real>
Real pw_expweight(const PiecewisePoly& f, const Real& xi) {
  Real m = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    m += expweight_integral<Real>(f.piece(i), xi, f.breakpoints()[i], f.breakpoints()[i + 1]);
  return m;
}

}  // namespace kstab
