#pragma once

// Modular discriminant, Eisenstein series and the j-invariant on the upper
// half-plane, plus reduction to the fundamental domain
//
//     |tau| >= 1,  -1/2 < Re tau <= 1/2.
//
// Normalization: Delta(tau) = (2 pi)^12 q prod_{n>=1} (1 - q^n)^24 with
// q = exp(2 pi i tau). With this choice Delta(tau) equals g2^3 - 27 g3^2 of
// the lattice Z + tau Z, so |Delta_{A,B}| = |Delta(tau)| / |omega_1|^12 for the
// period lattice omega_1 (Z + tau Z) of y^2 = x^3 + Ax + B.
//
// Everything is templated on the real type so the working precision is a
// compile-time choice (double, long double, boost float128).

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "faltings/errors.hpp"

namespace faltings {

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
Real two_pi() {
  return boost::math::constants::two_pi<Real>();
}

/// A point tau of the complex upper half-plane.
template <class Real>
class HalfPlanePoint {
 public:
  HalfPlanePoint(Real re, Real im) : re_(re), im_(im) {
    if (!(im > 0)) throw DomainError("tau must have positive imaginary part");
  }
  explicit HalfPlanePoint(const Complex<Real>& z) : HalfPlanePoint(z.real(), z.imag()) {}

  Real re() const { return re_; }
  Real im() const { return im_; }
  Complex<Real> value() const { return {re_, im_}; }

  /// q = exp(2 pi i tau).
  Complex<Real> nome() const {
    using std::cos;
    using std::exp;
    using std::sin;
    const Real r = exp(-two_pi<Real>() * im_);
    const Real phase = two_pi<Real>() * re_;
    return {r * cos(phase), r * sin(phase)};
  }

  /// True when tau lies in the half-open fundamental domain. The unit-circle
  /// test allows a few ulps so points like e^{i pi/3} count as reduced.
  bool is_reduced() const {
    using std::abs;
    const Real half = Real(1) / 2;
    const Real norm = re_ * re_ + im_ * im_;
    return (norm >= 1 || abs(norm - 1) <= 8 * std::numeric_limits<Real>::epsilon()) &&
           re_ > -half && re_ <= half;
  }

 private:
  Real re_;
  Real im_;
};

/// An element of SL2(Z) acting by tau -> (a tau + b) / (c tau + d).
struct UnimodularMap {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 1;

  static constexpr UnimodularMap identity() { return {}; }
  /// T^k : tau -> tau + k.
  static constexpr UnimodularMap translation(std::int64_t k) { return {1, k, 0, 1}; }
  /// S : tau -> -1/tau.
  static constexpr UnimodularMap inversion() { return {0, -1, 1, 0}; }

  constexpr std::int64_t determinant() const { return a * d - b * c; }

  template <class Real>
  Complex<Real> apply(const Complex<Real>& z) const {
    return (Real(a) * z + Real(b)) / (Real(c) * z + Real(d));
  }

  /// c tau + d, the factor in Delta(g tau) = (c tau + d)^12 Delta(tau).
  template <class Real>
  Complex<Real> automorphy_factor(const Complex<Real>& z) const {
    return Real(c) * z + Real(d);
  }

  friend constexpr UnimodularMap operator*(const UnimodularMap& l, const UnimodularMap& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
  }
  friend constexpr bool operator==(const UnimodularMap&, const UnimodularMap&) = default;
};

template <class Real>
struct Reduction {
  HalfPlanePoint<Real> point;
  UnimodularMap map;  ///< point = map(tau)
};

inline constexpr int kMaxReductionSteps = 10000;

/// Map tau into the fundamental domain. T-steps bring Re into (-1/2, 1/2], S is
/// applied while |tau| < 1, and a point on the unit circle with Re < 0 takes one
/// final S (a reflection there) onto the Re > 0 half.
template <class Real>
Reduction<Real> reduce_to_fundamental_domain(const HalfPlanePoint<Real>& tau) {
  using std::abs;
  using std::ceil;
  const Real half = Real(1) / 2;
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real x = tau.re();
  Real y = tau.im();
  UnimodularMap map;
  for (int step = 0; step < kMaxReductionSteps; ++step) {
    // Points within rounding of Re = -1/2 go to the +1/2 edge.
    const Real shift = ceil(x - half - 8 * eps * (1 + abs(x)));
    if (shift != 0) {
      if (abs(shift) > Real(1e15)) throw NumericError("reduction: translation out of range");
      x -= shift;
      map = UnimodularMap::translation(-static_cast<std::int64_t>(shift)) * map;
      if (x > half) x = half;  // rounding from the -1/2 edge
    }
    const Real norm = x * x + y * y;
    if (norm < 1 && abs(norm - 1) > 8 * eps) {
      x = -x / norm;
      y = y / norm;
      map = UnimodularMap::inversion() * map;
      continue;
    }
    if (x < 0 && abs(norm - 1) <= 8 * eps) {
      x = -x;
      map = UnimodularMap::inversion() * map;
    }
    return {HalfPlanePoint<Real>(x, y), map};
  }
  throw NumericError("reduction: step cap exceeded");
}

template <class Real>
struct SeriesOptions {
  /// Stop once the next term is below tol relative to the running value.
  Real tol = std::min(Real(1e-20), std::numeric_limits<Real>::epsilon() / 16);
  int max_terms = 200000;
};

namespace detail {

template <class Real>
struct EtaPower {
  Complex<Real> value;  ///< prod (1 - q^n)^24
  Real log_abs;         ///< 24 sum log|1 - q^n|
};

template <class Real>
EtaPower<Real> eta_product_24(const Complex<Real>& q, const SeriesOptions<Real>& opt) {
  using std::abs;
  using std::log;
  Complex<Real> prod(1);
  Real log_sum = 0;
  Complex<Real> qn = q;
  int n = 1;
  for (; n <= opt.max_terms && abs(qn) >= opt.tol; ++n) {
    const Complex<Real> factor = Real(1) - qn;
    prod *= factor;
    log_sum += log(abs(factor));
    qn *= q;
  }
  if (n > opt.max_terms) throw NumericError("q-product did not reach tolerance");
  const Complex<Real> p3 = prod * prod * prod;
  const Complex<Real> p6 = p3 * p3;
  const Complex<Real> p12 = p6 * p6;
  return {p12 * p12, 24 * log_sum};
}

/// sum_{n>=1} n^k q^n / (1 - q^n)
template <class Real>
Complex<Real> lambert_series(const Complex<Real>& q, int k, const SeriesOptions<Real>& opt) {
  using std::abs;
  Complex<Real> sum(0);
  Complex<Real> qn = q;
  for (int n = 1; n <= opt.max_terms; ++n) {
    Real nk = 1;
    for (int i = 0; i < k; ++i) nk *= n;
    const Complex<Real> term = nk * qn / (Real(1) - qn);
    sum += term;
    if (abs(term) < opt.tol * std::max(Real(1), abs(sum))) return sum;
    qn *= q;
  }
  throw NumericError("Lambert series did not reach tolerance");
}

template <class Real>
Complex<Real> e4_reduced(const Complex<Real>& q, const SeriesOptions<Real>& opt) {
  return Real(1) + Real(240) * lambert_series(q, 3, opt);
}

template <class Real>
Complex<Real> e6_reduced(const Complex<Real>& q, const SeriesOptions<Real>& opt) {
  return Real(1) - Real(504) * lambert_series(q, 5, opt);
}

template <class Real>
Complex<Real> pow_int(Complex<Real> z, int k) {
  Complex<Real> r(1);
  for (; k > 0; k >>= 1, z *= z)
    if (k & 1) r *= z;
  return r;
}

}  // namespace detail

/// Delta(tau) from the q-product at tau itself, without reduction. Converges
/// for every tau but slowly when Im tau is small; used as an oracle.
template <class Real>
Complex<Real> delta_series(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  using std::pow;
  const Complex<Real> q = tau.nome();
  return pow(two_pi<Real>(), 12) * q * detail::eta_product_24(q, opt).value;
}

/// The modular discriminant. The series is summed at the reduced point and
/// carried back with the weight-12 factor.
template <class Real>
Complex<Real> delta(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  const auto [reduced, map] = reduce_to_fundamental_domain(tau);
  const Complex<Real> at_reduced = delta_series(reduced, opt);
  return at_reduced / detail::pow_int(map.automorphy_factor(tau.value()), 12);
}

/// log|Delta(tau)|, summed additively so it never underflows:
/// 12 log(2 pi) - 2 pi Im tau' + 24 sum log|1 - q'^n| - 12 log|c tau + d|.
template <class Real>
Real log_abs_delta(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  using std::abs;
  using std::log;
  const auto [reduced, map] = reduce_to_fundamental_domain(tau);
  const Real log_eta = detail::eta_product_24(reduced.nome(), opt).log_abs;
  return 12 * log(two_pi<Real>()) - two_pi<Real>() * reduced.im() + log_eta -
         12 * log(abs(map.automorphy_factor(tau.value())));
}

/// Normalized Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n.
template <class Real>
Complex<Real> eisenstein_e4(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  const auto [reduced, map] = reduce_to_fundamental_domain(tau);
  return detail::e4_reduced(reduced.nome(), opt) /
         detail::pow_int(map.automorphy_factor(tau.value()), 4);
}

/// Normalized Eisenstein series E6 = 1 - 504 sum sigma_5(n) q^n.
template <class Real>
Complex<Real> eisenstein_e6(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  const auto [reduced, map] = reduce_to_fundamental_domain(tau);
  return detail::e6_reduced(reduced.nome(), opt) /
         detail::pow_int(map.automorphy_factor(tau.value()), 6);
}

/// Klein's j with j(i) = 1728 and j(e^{i pi/3}) = 0. Evaluated as
/// E4^3 / (q prod (1 - q^n)^24), i.e. j Delta / (2 pi)^12 = E4^3. The
/// equivalent 1728 E4^3 / (E4^3 - E6^2) loses all digits of the denominator
/// once |q| is small.
template <class Real>
Complex<Real> j_invariant(const HalfPlanePoint<Real>& tau, const SeriesOptions<Real>& opt = {}) {
  const auto reduced = reduce_to_fundamental_domain(tau).point;
  const Complex<Real> q = reduced.nome();
  const Complex<Real> e4 = detail::e4_reduced(q, opt);
  return e4 * e4 * e4 / (q * detail::eta_product_24(q, opt).value);
}

}  // namespace faltings
