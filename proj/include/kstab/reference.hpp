#pragma once

// Hand-transcribed reference data for the verification suite: closed-form volume
// functions per built-in surface case, their chamber walls, the two DH densities,
// and the GIT classes of the moduli corpus. Kept independent of the engine.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kstab/biconic.hpp"
#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"

namespace kstab::reference {

using VolumeFn = std::function<Rational(const Rational& s, const Rational& t)>;

namespace detail {

inline Rational R(long long p, long long q = 1) { return make_rational(p, q); }
inline Rational sq(const Rational& x) { return x * x; }

inline Rational ruling(const Rational& s, const Rational& t) {
  Rational m = s < 0 ? Rational(2 + s) : Rational(2 - s);
  return 2 * (m - t) * m;
}

inline VolumeFn blowup11(int k) {
  return [k](const Rational& s, const Rational& t) -> Rational {
    if (s < 0) {
      Rational v = 2 * sq(2 + s) - t * t;
      if (t >= 2 + s) v += 2 * sq(t - 2 - s);
      return v;
    }
    if (t <= k * s) return 2 * sq(2 - s);
    Rational v = 2 * sq(2 - s) - sq(t - k * s);
    if (t >= 2 + (k - 1) * s) v += 2 * sq(t - 2 - (k - 1) * s);
    return v;
  };
}

inline VolumeFn blowup21(int k) {
  return [k](const Rational& s, const Rational& t) -> Rational {
    Rational h = R(1, 2);
    if (s < 0) {
      Rational v = 2 * sq(2 + s) - h * t * t;
      if (t >= 2 + s) v += h * sq(t - 2 - s);
      if (t >= 4 + 2 * s) v += h * sq(t - 4 - 2 * s);
      return v;
    }
    if (t <= k * s) return 2 * sq(2 - s);
    Rational v = 2 * sq(2 - s) - h * sq(t - k * s);
    if (t >= 2 + (k - 1) * s) v += h * sq(t - 2 - (k - 1) * s);
    if (t >= 4 + (k - 2) * s) v += h * sq(t - 4 - (k - 2) * s);
    return v;
  };
}

// Plane blown up at a point of a conic, series aH + bC2 - tE.
inline Rational plane_series(const Rational& x, const Rational& t) {
  Rational a, b;
  if (x < -2) {
    a = 3 + x;
    b = 0;
  } else if (x <= 1) {
    a = (5 + x) / 3;
    b = (2 + x) / 3;
  } else {
    a = 3 - x;
    b = x;
  }
  if (t <= 2 * b) return a * a;
  Rational v = a * a - sq(t - 2 * b) / 2;
  if (t >= a + 2 * b) v += sq(t - a - 2 * b);
  return v;
}

inline Rational cone_ruling(const Rational& s, const Rational& t) {
  Rational m = s < 0 ? Rational(4 + 2 * s) : Rational(4 - 2 * s);
  return sq(m - t) / 2;
}

inline Rational cone_generic(const Rational& s, const Rational& t) {
  if (s < 1) return 2 * sq(1 + s - t / 2);
  return 2 * sq(3 - s - t / 2);
}

inline Rational cone_blowup11(const Rational& s, const Rational& t) {
  if (s < 1) {
    if (t <= 1 + s) return 2 * sq(1 + s) - t * t;
    return sq(2 + 2 * s - t);
  }
  if (t <= s - 1) return 2 * sq(3 - s);
  if (t <= 2) return 2 * sq(3 - s) - sq(s - 1 - t);
  return sq(5 - s - t);
}

inline Rational cone_blowup21(const Rational& s, const Rational& t) {
  Rational h = R(1, 2);
  if (s < 1) {
    if (t <= 1 + s) return h * sq(2 + 2 * s) - h * t * t;
    return h * sq(R(8, 3) * s - R(2, 3) * t + R(8, 3)) - h * sq(t / 3 - R(4, 3) * s - R(4, 3));
  }
  if (t <= 2 * s - 2) return h * sq(6 - 2 * s);
  if (t <= s + 1) return h * sq(6 - 2 * s) - h * sq(2 * s - 2 - t);
  return h * sq(R(20, 3) - R(4, 3) * s - R(2, 3) * t) - h * sq(R(-10, 3) + R(2, 3) * s + t / 3);
}

}  // namespace detail

/// Volume of the refined series at (s, t) for a built-in surface case.
inline VolumeFn volume(const std::string& key) {
  using namespace detail;
  static const std::map<std::string, VolumeFn> table = {
      {"2.23a.caseA", ruling},          {"delta.a.caseA", ruling},
      {"2.23a.caseB1", blowup11(1)},    {"2.23a.caseB2", blowup11(2)},
      {"2.23a.caseB3", blowup11(3)},    {"2.23a.caseB4", blowup11(4)},
      {"delta.a.caseB", blowup11(1)},   {"delta.a.caseC", blowup11(1)},
      {"2.23a.caseC2", blowup21(2)},    {"2.23a.caseC3", blowup21(3)},
      {"2.23a.caseC4", blowup21(4)},    {"2.23b.caseE", plane_series},
      {"2.23b.ordH", cone_ruling},      {"delta.b.caseA", cone_generic},
      {"delta.b.caseB", cone_blowup11}, {"delta.b.caseC", cone_blowup21},
  };
  auto it = table.find(key);
  if (it == table.end()) throw CaseFileMissing("no reference volume for " + key);
  return it->second;
}

/// Interior chamber walls as t = slope * s + intercept.
inline std::set<std::pair<Rational, Rational>> walls(const std::string& key) {
  using detail::R;
  using W = std::set<std::pair<Rational, Rational>>;
  auto b = [](int k) { return W{{R(1), R(2)}, {R(k), R(0)}, {R(k - 1), R(2)}}; };
  auto c = [](int k) { return W{{R(1), R(2)}, {R(2), R(4)}, {R(k), R(0)}, {R(k - 1), R(2)}, {R(k - 2), R(4)}}; };
  static const std::map<std::string, W> table = {
      {"2.23a.caseA", {}},
      {"delta.a.caseA", {}},
      {"2.23a.caseB1", b(1)},
      {"2.23a.caseB2", b(2)},
      {"2.23a.caseB3", b(3)},
      {"2.23a.caseB4", b(4)},
      {"delta.a.caseB", b(1)},
      {"delta.a.caseC", b(1)},
      {"2.23a.caseC2", c(2)},
      {"2.23a.caseC3", c(3)},
      {"2.23a.caseC4", c(4)},
      {"2.23b.caseE", {{R(2), R(0)}, {R(1), R(3)}, {R(2, 3), R(4, 3)}}},
      {"2.23b.ordH", {}},
      {"delta.b.caseA", {}},
      {"delta.b.caseB", {{R(1), R(1)}, {R(1), R(-1)}, {R(0), R(2)}}},
      {"delta.b.caseC", {{R(1), R(1)}, {R(2), R(-2)}}},
  };
  auto it = table.find(key);
  if (it == table.end()) throw CaseFileMissing("no reference walls for " + key);
  return it->second;
}

inline PiecewisePoly dh_density(const std::string& family) {
  using detail::R;
  if (family == "2.23a") return PiecewisePoly({R(-1), R(0), R(2)}, {Poly({R(4), R(4), R(1)}), Poly({R(4), R(-4), R(1)})});
  if (family == "2.23b")
    return PiecewisePoly({R(-3), R(-2), R(1), R(3)}, {Poly({R(9, 2), R(3), R(1, 2)}), Poly({R(25, 18), R(5, 9), R(1, 18)}),
                                                      Poly({R(9, 2), R(-3), R(1, 2)})});
  throw CaseFileMissing("no reference density for " + family);
}

/// Expected class of every form in the moduli corpus.
inline const std::vector<std::pair<std::string, GITClass>>& moduli_classes() {
  using enum GITClass;
  static const std::vector<std::pair<std::string, GITClass>> c = {
      {"smooth", Stable},
      {"node", StrictlySemistable},
      {"cusp", StrictlySemistable},
      {"conics_transversal", Polystable},
      {"conics_tangent", Polystable},
      {"double_conic", Polystable},
      {"ruling_transversal", StrictlySemistable},
      {"ruling_tangent", Unstable},
      {"double_ruling", Unstable},
      {"four_rulings", Polystable},
      {"triple_point", Unstable},
      {"two_rulings_conic", StrictlySemistable},
      {"conjugate_conics", Polystable},
      {"ruling_irrational", StrictlySemistable},
  };
  return c;
}

}  // namespace kstab::reference
