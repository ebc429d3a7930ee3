#pragma once

// The height-bounded region
//
//     R_X = { (A, B) in R^2 : f(A, B)^{-2} < X },
//     f(A, B)^{-2} = |Delta_{A,B}| / (|Delta(tau_{A,B})| Im(tau_{A,B})^6),
//
// its area constant sigma = Area(R_1), the constants bounding its shape, and
// samples and gradients of its boundary. Membership scales as
// (A, B) in R_1  <=>  (X^{1/3} A, X^{1/2} B) in R_X.
//
// Templates are instantiated for double, long double and boost float128.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "faltings/heights.hpp"
#include "faltings/periods.hpp"

namespace faltings {

/// log f(A, B)^{-2}, with D = 4A^3 + 27B^2 taken from the curve.
template <class Real>
Real log_f_inverse_sq(const RealCurve<Real>& curve);

/// f(A, B) = |Delta(tau) Im(tau)^6 / Delta_{A,B}|^{1/2}. Cusp error when D = 0.
template <class Real>
Real f_of_point(Real A, Real B);

/// The parameter t = A^3 / B^2 together with t + 27/4, kept separately so
/// points near the cusp t = -27/4 are represented exactly.
template <class Real>
struct CuspParameter {
  Real t{};
  Real offset{};  ///< t + 27/4

  static CuspParameter at(Real t) { return {t, t + Real(27) / 4}; }
  static CuspParameter from_offset(Real offset) { return {offset - Real(27) / 4, offset}; }
};

/// f(t) = |Delta(tau_t) Im(tau_t)^6 / (16 (4t + 27))|^{1/2} = |B| f(A, B)
/// for any (A, B) with A^3 / B^2 = t.
template <class Real>
Real f_of_t(const CuspParameter<Real>& p);

template <class Real>
Real f_of_t(Real t) {
  return f_of_t(CuspParameter<Real>::at(t));
}

/// Delta_{A,B} != 0 and f(A, B)^{-2} < X.
template <class Real>
bool in_region(const RealCurve<Real>& curve, Real X);

template <class Real>
bool in_region(Real A, Real B, Real X) {
  return in_region(RealCurve<Real>::from_coefficients(A, B), X);
}

template <class Real>
struct SigmaPiece {
  std::string name;
  Real lo{};  ///< integration variable range
  Real hi{};
  Real estimate{};  ///< contribution to the t-integral
  Real error{};
  int evaluations = 0;
};

template <class Real>
struct SigmaResult {
  Real sigma{};  ///< (2/5) * integral of |t|^{-2/3} f(t)^{5/3}
  Real error{};  ///< quadrature estimate plus truncated tails, scaled like sigma
  Real cusp_tail{};
  std::vector<SigmaPiece<Real>> pieces;
};

/// Area of R_1 to relative tolerance tol. The t-line is split into
///   origin       t = u^3,            u in [-1, 1]
///   right tail   t = 1 / w^2,        w in [0, 1]
///   left tail    t = -1 / w^2,       w in [0, 1/sqrt(8)]
///   left cusp    t = -27/4 - e^v,    v in [v_min, log(5/4)]
///   right cusp   t = -27/4 + e^v,    v in [v_min, log(23/4)]
/// The substitutions remove the t^{-2/3} singularity and map the infinite
/// tails to finite intervals; near the cusp the integrand behaves like
/// e^v |v|^5, so v_min is pushed down until the neglected tail is negligible.
template <class Real>
SigmaResult<Real> sigma_area(Real tol);

template <class Real>
struct RegionConstants {
  Real c{};  ///< (27/4)^{1/3}
  Real epsilon0{};
  Real epsilon0_residual{};
  Real C{};  ///< bound for |Delta(tau)| Im(tau)^6, just above the sampled max
  Real C_sampled{};
  Real C_argmax_re{};
  Real C_argmax_im{};
  Real M{};      ///< X_M = max(X, M)
  Real N{};      ///< integer points of R_X with Delta != 0 have |A| <= N X_M^{1/3} log(X_M)^2
  Real beta{};   ///< gradient quadrants are checked for |B| > beta on R_1
  Real beta0{};  ///< |B| <= beta0 N^{3/2} X_M^{1/2} log(X_M)^3 on the A-window above
};

template <class Real>
RegionConstants<Real> bound_constants();

/// A lower bound for f^{-2} at integer points with Delta != 0 and |A| = a:
/// L(a) = 110592 a^3 / H(y), where |j| <= 6912 a^3 bounds Im tau by y and
/// H(y) bounds |j Delta(tau)| Im(tau)^6 = (2 pi)^12 |E4|^3 Im(tau)^6.
long double cusp_lower_bound(long double a);

/// Smallest integer a >= 1 with L(a) >= X. No integer point of R_X with
/// Delta != 0 has |A| >= cusp_cutoff(X).
std::int64_t cusp_cutoff(long double X);

/// Continuous version, used to validate N.
long double cusp_cutoff_real(long double X);

template <class Real>
struct BoundaryPoint {
  Real A{};
  Real B{};
  Real D{};        ///< 4A^3 + 27B^2 at the exact root
  Real epsilon{};  ///< A = -c B^{2/3} + epsilon B^{-4/3} (0 on the A-axis)
};

/// F(A, B) = Delta_{A,B} - sgn(Delta_{A,B}) X |Delta(tau)| Im(tau)^6, whose
/// zero set is the boundary of R_X.
template <class Real>
Real boundary_function(const RealCurve<Real>& curve, Real X);

/// The boundary crossing of R_X on the horizontal line through B, on the side
/// A > -c B^{2/3} (side = +1) or A < -c B^{2/3} (side = -1).
template <class Real>
std::optional<BoundaryPoint<Real>> boundary_point(Real B, Real X, int side);

template <class Real>
struct BoundarySweep {
  std::vector<BoundaryPoint<Real>> points;
  std::vector<Real> skipped_lines;  ///< B values where no bracket was found
};

/// n boundary points from horizontal sweep lines B = X^{1/2} sinh(u) with u
/// evenly spaced over [-asinh(b_max), asinh(b_max)], two points per line.
template <class Real>
BoundarySweep<Real> boundary_samples(Real X, int n, Real b_max = Real(1e4));

/// Central differences of F at a boundary point. Contract error when the
/// point is not on the boundary of R_X.
template <class Real>
std::pair<Real, Real> boundary_gradient(const BoundaryPoint<Real>& p, Real X);

template <class Real>
std::pair<Real, Real> boundary_gradient(Real A, Real B, Real X = Real(1)) {
  return boundary_gradient(BoundaryPoint<Real>{A, B, 4 * A * A * A + 27 * B * B, Real(0)}, X);
}

/// CSV with columns piece, lo, hi, estimate, err.
template <class Real>
void write_sigma_csv(std::ostream& out, const SigmaResult<Real>& r);

/// CSV with columns A, B.
template <class Real>
void write_boundary_csv(std::ostream& out, const BoundarySweep<Real>& sweep);

}  // namespace faltings
