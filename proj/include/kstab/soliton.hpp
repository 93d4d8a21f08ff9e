#pragma once

// H(xi) = log int e^{-xi s} DH(ds), its minimizer, and the induced weight g(s) = e^{-xi0 s}.

#include <cmath>

#include "kstab/errors.hpp"
#include "kstab/exactnum.hpp"
#include "kstab/okounkov.hpp"

namespace kstab {

inline constexpr double kSolitonTol = 1e-14;
inline constexpr double kBracketWidth = 1e-13;

template <class Real>
struct SolitonCandidate {
  Real xi0;
  Real residual;  // |H'(xi0)|
  Real lo, hi;    // H'(lo) < 0 < H'(hi)
  int iterations = 0;
};

template <class Real>
struct WeightFunction {
  Real xi0;
  Real bv;  // int g dDH
  Real operator()(const Real& s) const {
    using std::exp;
    return exp(-xi0 * s);
  }
};

/// Moments M_k = int s^k e^{-xi s} dDH for k = 0, 1, 2.
template <class Real>
std::array<Real, 3> h_moments(const DHMeasure& dh, const Real& xi) {
  const auto& f = dh.density;
  return {pw_expweight<Real>(f, xi), pw_expweight<Real>(f.times(Poly::identity()), xi),
          pw_expweight<Real>(f.times(Poly::monomial(1, 2)), xi)};
}

template <class Real>
Real h_value(const DHMeasure& dh, const Real& xi) {
  using std::log;
  return log(pw_expweight<Real>(dh.density, xi));
}

/// H'(xi) = -M1/M0.
template <class Real>
Real h_prime(const DHMeasure& dh, const Real& xi) {
  auto m = h_moments<Real>(dh, xi);
  return -m[1] / m[0];
}

/// H''(xi) = M2/M0 - (M1/M0)^2, the variance of s under e^{-xi s} DH.
template <class Real>
Real h_second(const DHMeasure& dh, const Real& xi) {
  auto m = h_moments<Real>(dh, xi);
  Real mean = m[1] / m[0];
  return m[2] / m[0] - mean * mean;
}

/// Newton on H' with a bisection safeguard.
template <class Real>
SolitonCandidate<Real> minimize_h(const DHMeasure& dh, const Real& tol = Real(kSolitonTol)) {
  using std::abs;
  if (dh.density.empty() || pw_mass(dh.density) <= 0) throw NoBracket("density has no positive mass");
  const Real span = to_real<Real>(dh.lambda_max() - dh.lambda_min());
  Real c = 1 / span;
  Real lo = -c, hi = c;
  int expand = 0;
  while (!(h_prime<Real>(dh, lo) < 0 && h_prime<Real>(dh, hi) > 0)) {
    if (++expand > 12) throw NoBracket("H' keeps one sign on [" + std::to_string(static_cast<double>(lo)) + ", " +
                                       std::to_string(static_cast<double>(hi)) + "]");
    c *= 2;
    lo = -c;
    hi = c;
  }
  SolitonCandidate<Real> out{};
  Real x = (lo + hi) / 2;
  for (int it = 0; it < 200; ++it) {
    out.iterations = it + 1;
    auto m = h_moments<Real>(dh, x);
    Real mean = m[1] / m[0];
    Real d1 = -mean;
    Real d2 = m[2] / m[0] - mean * mean;
    if (d1 < 0)
      lo = x;
    else
      hi = x;
    if (abs(d1) <= tol) break;
    Real next = x - d1 / d2;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    x = next;
  }
  out.xi0 = x;
  out.residual = abs(h_prime<Real>(dh, x));
  // Certify a narrow sign-change bracket around the root.
  Real delta = Real(kBracketWidth) / 4;
  for (int k = 0; k < 40; ++k, delta *= 2) {
    if (h_prime<Real>(dh, x - delta) < 0 && h_prime<Real>(dh, x + delta) > 0) {
      out.lo = x - delta;
      out.hi = x + delta;
      return out;
    }
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

template <class Real>
WeightFunction<Real> make_weight(const DHMeasure& dh, const SolitonCandidate<Real>& cand) {
  return {cand.xi0, pw_expweight<Real>(dh.density, cand.xi0)};
}

template <class Real>
WeightFunction<Real> make_weight(const DHMeasure& dh, const Real& xi0) {
  return {xi0, pw_expweight<Real>(dh.density, xi0)};
}

}  // namespace kstab
