#pragma once

// Period lattices of real short Weierstrass curves y^2 = x^3 + Ax + B via the
// complex arithmetic-geometric mean, and the lattice parameter tau_{A,B}.

#include <algorithm>
#include <boost/math/special_functions/cbrt.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>

#include "faltings/modfun.hpp"

namespace faltings {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// 4A^3 + 27B^2 for integers small enough that it fits in 128 bits.
inline constexpr std::int64_t kInt128MaxA = std::int64_t(1) << 40;
inline constexpr std::int64_t kInt128MaxB = std::int64_t(1) << 60;

inline bool fits_int128_invariant(std::int64_t A, std::int64_t B) {
  return A > -kInt128MaxA && A < kInt128MaxA && B > -kInt128MaxB && B < kInt128MaxB;
}

inline __int128 cubic_invariant_i128(std::int64_t A, std::int64_t B) {
  const __int128 a = A;
  const __int128 b = B;
  return 4 * a * a * a + 27 * b * b;
}

/// An integral model y^2 = x^3 + Ax + B.
struct IntegralCurve {
  std::int64_t A = 0;
  std::int64_t B = 0;

  /// 4A^3 + 27B^2, exact.
  BigInt cubic_invariant() const {
    const BigInt a = A;
    const BigInt b = B;
    return 4 * a * a * a + 27 * b * b;
  }
  /// Delta_{A,B} = -16(4A^3 + 27B^2).
  BigInt discriminant() const { return -16 * cubic_invariant(); }
  bool is_singular() const { return cubic_invariant() == 0; }

  /// j_{A,B} = -1728 (4A)^3 / Delta_{A,B}.
  BigRational j_invariant() const {
    const BigInt disc = discriminant();
    if (disc == 0) throw SingularCurveError("j is undefined on a singular curve");
    const BigInt a4 = 4 * BigInt(A);
    return BigRational(-1728 * a4 * a4 * a4) / BigRational(disc);
  }
};

namespace detail {

template <class Real>
Real to_real(__int128 v) {
  const bool neg = v < 0;
  const unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : v;
  const Real hi = Real(static_cast<std::uint64_t>(m >> 64));
  const Real lo = Real(static_cast<std::uint64_t>(m));
  const Real r = hi * Real(18446744073709551616.0L) + lo;
  return neg ? -r : r;
}

template <class Real>
Real to_real(const BigInt& v) {
  // Peel off 64-bit limbs from the top so every Real type is supported.
  if (v == 0) return Real(0);
  const bool neg = v < 0;
  BigInt m = neg ? BigInt(-v) : v;
  const unsigned bits = boost::multiprecision::msb(m) + 1;
  const unsigned keep = std::min(bits, 128u);
  const unsigned shift = bits - keep;
  m >>= shift;
  const Real hi = Real(static_cast<std::uint64_t>(m >> 64));
  const Real lo = Real(static_cast<std::uint64_t>(m & BigInt(~std::uint64_t(0))));
  using std::ldexp;
  Real r = ldexp(hi, 64) + lo;
  r = ldexp(r, static_cast<int>(shift));
  return neg ? -r : r;
}

}  // namespace detail

/// A real model with its cubic invariant D = 4A^3 + 27B^2 carried alongside,
/// so callers that know D more accurately than the rounded A, B can pass it.
template <class Real>
struct RealCurve {
  Real A{};
  Real B{};
  Real D{};

  static RealCurve from_coefficients(Real A, Real B) { return {A, B, 4 * A * A * A + 27 * B * B}; }

  static RealCurve from_integers(std::int64_t A, std::int64_t B) {
    const Real D = fits_int128_invariant(A, B)
                       ? detail::to_real<Real>(cubic_invariant_i128(A, B))
                       : detail::to_real<Real>(IntegralCurve{A, B}.cubic_invariant());
    return {Real(A), Real(B), D};
  }

  static RealCurve from(const IntegralCurve& c) { return from_integers(c.A, c.B); }

  /// Delta_{A,B} = -16 D.
  Real discriminant() const { return -16 * D; }
  /// j_{A,B} = 6912 A^3 / D.
  Real j_invariant() const { return 6912 * A * A * A / D; }
};

template <class Real>
struct PeriodPair {
  Complex<Real> omega1;
  Complex<Real> omega2;

  Complex<Real> ratio() const { return omega2 / omega1; }
};

inline constexpr int kMaxAgmIterations = 64;

/// Complex AGM with the optimal square-root choice at each step.
template <class Real>
Complex<Real> agm(Complex<Real> a, Complex<Real> b) {
  using std::abs;
  using std::sqrt;
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int it = 0; it < kMaxAgmIterations; ++it) {
    if (abs(a - b) <= 4 * eps * abs(a)) return a;
    const Complex<Real> mean = (a + b) / Real(2);
    Complex<Real> root = sqrt(a * b);
    if (abs(mean - root) > abs(mean + root)) root = -root;
    a = mean;
    b = root;
  }
  throw NumericError("AGM did not converge within the iteration cap");
}

namespace detail {

template <class Real>
Real newton_polish(Real x, Real a, Real b) {
  using std::abs;
  for (int i = 0; i < 4; ++i) {
    const Real fp = 3 * x * x + a;
    if (fp == 0) break;
    const Real dx = ((x * x + a) * x + b) / fp;
    x -= dx;
    if (abs(dx) <= std::numeric_limits<Real>::epsilon() * abs(x)) break;
  }
  return x;
}

}  // namespace detail

/// Periods omega1, omega2 with omega1 real and Im(omega2 / omega1) > 0.
///
/// The curve is first scaled by u = max(|A|^{1/4}, |B|^{1/6}) to unit size.
/// Root gaps are formed from D directly so near-singular curves keep their
/// relative accuracy.
template <class Real>
PeriodPair<Real> period_lattice(const RealCurve<Real>& curve) {
  using boost::math::cbrt;
  using std::abs;
  using std::acos;
  using std::cos;
  using std::max;
  using std::pow;
  using std::sqrt;
  if (curve.D == 0) throw SingularCurveError("4A^3 + 27B^2 = 0");
  const Real pi = boost::math::constants::pi<Real>();

  const Real u = max(pow(abs(curve.A), Real(1) / 4), pow(abs(curve.B), Real(1) / 6));
  const Real u2 = u * u;
  const Real u4 = u2 * u2;
  const Real u6 = u4 * u2;
  const Real a = curve.A / u4;
  const Real b = curve.B / u6;
  const Real d = curve.D / (u6 * u6);

  PeriodPair<Real> p;
  if (d > 0) {
    // One real root e1; the other two are complex conjugates.
    const Real s = sqrt(d / 108);
    const Real w = b >= 0 ? -b / 2 - s : -b / 2 + s;
    const Real c1 = cbrt(w);
    const Real e1 = detail::newton_polish(c1 - a / (3 * c1), a, b);
    const Real beta2 = 3 * e1 * e1 + a;
    const Real beta = sqrt(beta2);
    const Real delta2 = d / (beta2 * beta2);
    Real plus;
    Real minus;
    if (e1 >= 0) {
      plus = 2 * beta + 3 * e1;
      minus = delta2 / plus;
    } else {
      minus = 2 * beta - 3 * e1;
      plus = delta2 / minus;
    }
    const Complex<Real> g = 2 * sqrt(beta);
    const Complex<Real> m1 = agm(g, Complex<Real>(sqrt(plus)));
    const Complex<Real> m2 = agm(g, Complex<Real>(sqrt(minus)));
    p.omega1 = 2 * pi / m1;
    p.omega2 = -p.omega1 / Real(2) + Complex<Real>(0, pi) / m2;
  } else {
    // Three real roots e1 > e2 > e3 (a < 0 here).
    const Real r = 2 * sqrt(-a / 3);
    Real arg = 3 * b / (a * r);
    arg = std::clamp(arg, Real(-1), Real(1));
    const Real theta = acos(arg) / 3;
    const Real third = 2 * pi / 3;
    Real e[3] = {r * cos(theta), r * cos(theta - third), r * cos(theta + third)};
    std::sort(e, e + 3, [](const Real& x, const Real& y) { return x > y; });
    // The root farthest from the middle is well separated; the close pair's
    // gap comes from sqrt(-d) / P where P = 3 e_k^2 + a.
    const bool top_isolated = (e[0] - e[1]) >= (e[1] - e[2]);
    const Real ek = detail::newton_polish(top_isolated ? e[0] : e[2], a, b);
    const Real P = 3 * ek * ek + a;
    const Real small = sqrt(-d) / P;
    const Real sum = 3 * abs(ek);
    const Real big = (sum + small) / 2;
    const Real mid = (sum - small) / 2;
    Real d12;
    Real d13;
    Real d23;
    if (top_isolated) {
      d12 = mid;
      d13 = big;
      d23 = small;
    } else {
      d12 = small;
      d13 = big;
      d23 = mid;
    }
    const Complex<Real> s13 = sqrt(d13);
    const Complex<Real> m1 = agm(s13, Complex<Real>(sqrt(d12)));
    const Complex<Real> m2 = agm(s13, Complex<Real>(sqrt(d23)));
    p.omega1 = pi / m1;
    p.omega2 = Complex<Real>(0, pi) / m2;
  }
  if (p.ratio().imag() < 0) p.omega2 = -p.omega2;
  p.omega1 /= u;
  p.omega2 /= u;
  return p;
}

/// tau_{A,B}: the period ratio reduced to the fundamental domain.
template <class Real>
HalfPlanePoint<Real> tau_of_curve(const RealCurve<Real>& curve) {
  const PeriodPair<Real> p = period_lattice(curve);
  return reduce_to_fundamental_domain(HalfPlanePoint<Real>(p.ratio())).point;
}

template <class Real>
HalfPlanePoint<Real> tau_of_curve(const IntegralCurve& curve) {
  return tau_of_curve(RealCurve<Real>::from(curve));
}

/// A unit-size curve with A^3 / B^2 = t. For |t| <= 1 it is (t^{1/3}, 1);
/// otherwise (sign t, |t|^{-1/2}), whose B-coefficient is 1/sqrt|t|. The
/// offset t + 27/4 is passed separately so D stays accurate near the cusp.
template <class Real>
RealCurve<Real> curve_for_ratio(Real t, Real offset) {
  using boost::math::cbrt;
  using std::abs;
  using std::sqrt;
  if (offset == 0) throw CuspError("t = -27/4 is the cusp");
  if (abs(t) <= 1) return {cbrt(t), Real(1), 4 * offset};
  const Real sign = t > 0 ? Real(1) : Real(-1);
  return {sign, 1 / sqrt(abs(t)), 4 * offset / abs(t)};
}

/// |B| of curve_for_ratio(t, .): f(t) = |B| f(A, B) for that curve.
template <class Real>
Real ratio_curve_scale(Real t) {
  using std::abs;
  using std::sqrt;
  return abs(t) <= 1 ? Real(1) : 1 / sqrt(abs(t));
}

/// tau_t with j(tau_t) = 6912 t / (4t + 27).
template <class Real>
HalfPlanePoint<Real> tau_of_t(Real t) {
  return tau_of_curve(curve_for_ratio(t, t + Real(27) / 4));
}

}  // namespace faltings
