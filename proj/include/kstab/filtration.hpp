#pragma once

// S-invariants of surface filtrations (weighted and unweighted), refined pencils on the
// refining curve, and threefold volume curves.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"
#include "kstab/okounkov.hpp"
#include "kstab/soliton.hpp"
#include "kstab/surfgeom.hpp"

namespace kstab {

enum class WeightKind { Unit, Soliton };

/// g(s) = scale * e^{-xi0 s}; Unit is scale 1, xi0 0 and keeps exact arithmetic.
template <class Real>
struct Weight {
  bool unit = true;
  Real xi0 = 0;
  Real scale = 1;

  static Weight Unit() { return {}; }
  static Weight Exp(const Real& xi0, const Real& scale = Real(1)) { return {false, xi0, scale}; }

  Real operator()(const Real& s) const {
    using std::exp;
    return unit ? Real(1) : scale * exp(-xi0 * s);
  }
  /// int g(s) p(s) ds over [a, b].
  Real integrate(const Poly& p, const Rational& a, const Rational& b) const {
    if (unit) return to_real<Real>(kstab::integrate(p, a, b));
    return scale * expweight_integral<Real>(p, xi0, a, b);
  }
};

template <class Real>
Real bv(const DHMeasure& dh, const Weight<Real>& w) {
  if (w.unit) return to_real<Real>(pw_mass(dh.density));
  return w.scale * pw_expweight<Real>(dh.density, w.xi0);
}

struct Incidence {
  std::string curve;  // lattice curve or fixed-curve name
  std::string point;
  Rational mult;  // local intersection number with the refining curve at the point
};

struct MarkedPoint {
  std::string id;
  Rational orbifold = 0;  // coefficient c of the different at the point
};

struct SurfaceCase {
  std::string name;
  NSLattice lattice;
  DivisorFamily family;
  DHMeasure dh;
  WeightKind weight = WeightKind::Unit;
  Rational a_value = 1;
  std::string refining;  // name of the refining curve
  DivisorClass refining_class;
  std::vector<Incidence> incidence;
  std::vector<MarkedPoint> points;

  void validate() const {
    lattice.validate();
    family.validate(lattice);
    if (a_value <= 0) throw ParseError("A-value must be positive");
    if (refining_class.size() != lattice.rank()) throw ParseError("refining class has wrong length");
    for (const auto& inc : incidence) {
      if (inc.mult < 0) throw ParseError("negative incidence multiplicity");
      bool declared = false;
      for (const auto& p : points) declared |= p.id == inc.point;
      if (!declared) throw ParseError("incidence names undeclared point " + inc.point);
    }
    for (const auto& p : points)
      if (p.orbifold < 0 || p.orbifold >= 1) throw ParseError("orbifold coefficient outside [0,1)");
  }
};

/// The weight a case asks for, solving for the soliton candidate when needed.
template <class Real>
Weight<Real> resolve_weight(const SurfaceCase& c) {
  if (c.weight == WeightKind::Unit) return Weight<Real>::Unit();
  return Weight<Real>::Exp(minimize_h<Real>(c.dh).xi0);
}

/// vol(s, 0) / 2 as a piecewise polynomial over the family's s-range.
inline PiecewisePoly half_volume_at_zero(const NSLattice& lat, const DivisorFamily& fam) {
  std::vector<Rational> bps{fam.s_min()};
  std::vector<Poly> pieces;
  for (const auto& p : fam.pieces) {
    auto half = [&](const Rational& s) { return zariski(lat, p.cls.at(s, 0)).volume / 2; };
    std::array<Rational, 3> xs{p.s0, (p.s0 + p.s1) / 2, p.s1}, ys;
    for (int i = 0; i < 3; ++i) ys[i] = half(xs[i]);
    Poly q = detail::lagrange3(xs, ys);
    for (int k = 1; k <= 7; k += 2) {
      Rational s = p.s0 + (p.s1 - p.s0) * make_rational(k, 8);
      if (half(s) != q(s)) throw ValueMismatch("vol(s, 0) is not quadratic on [" + to_string(p.s0) + ", " + to_string(p.s1) + "]");
    }
    bps.push_back(p.s1);
    pieces.push_back(q);
  }
  return PiecewisePoly(std::move(bps), std::move(pieces));
}

namespace detail {

template <class Real>
Real weighted_cells(const std::vector<std::pair<Trapezoid, BiPoly>>& parts, const Weight<Real>& w) {
  Real acc = 0;
  for (const auto& [tz, f] : parts) acc += w.integrate(f.integrate_t(tz.lo, tz.hi), tz.s0, tz.s1);
  return acc;
}

inline Rational exact_cells(const std::vector<std::pair<Trapezoid, BiPoly>>& parts) {
  Rational acc = 0;
  for (const auto& [tz, f] : parts) acc += integrate(f.integrate_t(tz.lo, tz.hi), tz.s0, tz.s1);
  return acc;
}

inline std::vector<std::pair<Trapezoid, BiPoly>> volume_parts(const SurfaceCase& c) {
  std::vector<std::pair<Trapezoid, BiPoly>> parts;
  for (const auto& cell : breakpoint_partition(c.lattice, c.family).cells)
    for (const auto& tz : cell.trapezoids) parts.emplace_back(tz, cell.volume);
  return parts;
}

}  // namespace detail

/// (1/(2 Bv)) int int g(s) vol(s,t) dt ds.
template <class Real>
Real sg_divisor(const SurfaceCase& c, const Weight<Real>& w) {
  return detail::weighted_cells(detail::volume_parts(c), w) / (2 * bv(c.dh, w));
}

/// Unit weight, exact.
inline Rational sg_divisor_exact(const SurfaceCase& c) {
  return detail::exact_cells(detail::volume_parts(c)) / (2 * pw_mass(c.dh.density));
}

// ---------------------------------------------------------------------------
// Pencils on the refining curve

struct PencilCell {
  Trapezoid region;
  Affine2 degree;                         // d(s,t) = P.F
  std::map<std::string, Affine2> mult;    // base-point multiplicities
};

struct PencilCase {
  std::vector<PencilCell> cells;
  std::vector<MarkedPoint> points;
  DHMeasure dh;
  WeightKind weight = WeightKind::Unit;

  const MarkedPoint* find(const std::string& id) const {
    for (const auto& p : points)
      if (p.id == id) return &p;
    return nullptr;
  }
};

inline bool is_generic_point(const std::string& id) { return id == "generic" || id == "Generic"; }

/// Splits "p3=p4" into its components and checks each is declared.
inline std::vector<std::string> resolve_point(const PencilCase& pc, const std::string& id) {
  if (is_generic_point(id)) return {};
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto eq = id.find('=', start);
    std::string part = id.substr(start, eq == std::string::npos ? std::string::npos : eq - start);
    if (part.empty() || !pc.find(part)) throw UnknownPoint("'" + id + "'");
    if (std::find(parts.begin(), parts.end(), part) != parts.end()) throw UnknownPoint("'" + id + "' repeats " + part);
    parts.push_back(part);
    if (eq == std::string::npos) break;
    start = eq + 1;
  }
  return parts;
}

/// Orbifold coefficient of a (possibly merged) point.
inline Rational point_orbifold(const PencilCase& pc, const std::string& id) {
  Rational c = 0;
  for (const auto& p : resolve_point(pc, id)) c = std::max(c, pc.find(p)->orbifold);
  return c;
}

inline PencilCase derive_pencil(const SurfaceCase& c) {
  PencilCase pc;
  pc.points = c.points;
  pc.dh = c.dh;
  pc.weight = c.weight;
  auto contributions = [&](const std::string& curve, const Affine2& coeff, std::map<std::string, Affine2>& mult) {
    if (coeff.is_zero() || curve == c.refining) return;
    bool seen = false;
    for (const auto& inc : c.incidence) {
      if (inc.curve != curve) continue;
      seen = true;
      mult[inc.point] = mult[inc.point] + inc.mult * coeff;
    }
    if (!seen) throw MissingIncidence("curve " + curve + " has no declared point on " + c.refining);
  };
  auto part = breakpoint_partition(c.lattice, c.family);
  for (const auto& cell : part.cells) {
    std::map<std::string, Affine2> mult;
    for (const auto& p : c.points) mult[p.id] = Affine2{};
    for (std::size_t k = 0; k < cell.support.size(); ++k)
      contributions(c.lattice.curves[cell.support[k]].name, cell.n_coeffs[k], mult);
    for (const auto& f : c.family.pieces[cell.piece].fixed) contributions(f.curve, f.coeff, mult);
    Affine2 d = detail::dot_affine(c.lattice, cell.positive, c.refining_class);
    for (const auto& tz : cell.trapezoids) pc.cells.push_back({tz, d, mult});
  }
  return pc;
}

namespace detail {

inline std::vector<std::pair<Trapezoid, BiPoly>> point_parts(const PencilCase& pc, const std::string& id) {
  auto members = resolve_point(pc, id);
  std::vector<std::pair<Trapezoid, BiPoly>> parts;
  for (const auto& cell : pc.cells) {
    Affine2 m;
    for (const auto& p : members) m = m + cell.mult.at(p);
    BiPoly d = BiPoly::from(cell.degree);
    BiPoly half;
    half.add(0, 0, Rational(1, 2));
    parts.emplace_back(cell.region, BiPoly::from(m) * d + half * d * d);
  }
  return parts;
}

}  // namespace detail

/// (1/Bv) int int g(s) [m d + d^2/2] dt ds.
template <class Real>
Real sg_point(const PencilCase& pc, const std::string& id, const Weight<Real>& w) {
  return detail::weighted_cells(detail::point_parts(pc, id), w) / bv(pc.dh, w);
}

inline Rational sg_point_exact(const PencilCase& pc, const std::string& id) {
  return detail::exact_cells(detail::point_parts(pc, id)) / pw_mass(pc.dh.density);
}

// ---------------------------------------------------------------------------
// Threefold volume curves

struct VolumeCurve3D {
  PiecewisePoly volume;
  Rational total;

  void validate() const {
    if (volume.empty()) throw ParseError("empty volume curve");
    if (volume(volume.lower()) != total) throw ValueMismatch("volume at left endpoint != total");
    if (volume(volume.upper()) != 0) throw ValueMismatch("volume at right endpoint != 0");
    for (std::size_t i = 0; i < volume.size(); ++i) {
      const auto& a = volume.breakpoints()[i];
      const auto& b = volume.breakpoints()[i + 1];
      if (i + 1 < volume.size() && volume.piece(i)(b) != volume.piece(i + 1)(b))
        throw ValueMismatch("volume curve discontinuous at " + to_string(b));
      Poly dv = volume.piece(i).derivative();
      std::vector<Rational> probes{a, b};
      Poly d2 = dv.derivative();
      if (d2.degree() == 1) {
        Rational crit = -d2.coeff(0) / d2.coeff(1);
        if (crit > a && crit < b) probes.push_back(crit);
      }
      for (const auto& x : probes)
        if (dv(x) > 0) throw ValueMismatch("volume curve increases near " + to_string(x));
    }
  }
};

inline Rational s_threefold(const VolumeCurve3D& vc) { return pw_mass(vc.volume) / vc.total; }

}  // namespace kstab
