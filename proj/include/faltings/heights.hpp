#pragma once

// The Faltings height of E_{A,B} over Q:
//
//     H_F = |Delta^min| / (|Delta(tau)| Im(tau)^6),   h_F = log(H_F) / 12,
//
// evaluated entirely in log space.

#include <cmath>

#include "faltings/minimality.hpp"
#include "faltings/periods.hpp"

namespace faltings {

template <class Real>
struct HeightValue {
  Real log_HF{};

  Real HF() const {
    using std::exp;
    return exp(log_HF);
  }
  Real hF() const { return log_HF / 12; }
};

/// log(|Delta_{A,B}| / (|Delta(tau)| Im(tau)^6)) = -2 log f(A, B). The
/// height without the minimality correction.
template <class Real>
Real log_height_functional(const RealCurve<Real>& curve, const HalfPlanePoint<Real>& tau) {
  using std::abs;
  using std::log;
  return log(Real(16)) + log(abs(curve.D)) - log_abs_delta(tau) - 6 * log(tau.im());
}

template <class Real>
Real log_height_functional(const RealCurve<Real>& curve) {
  return log_height_functional(curve, tau_of_curve(curve));
}

/// H_F of a weakly minimal, nonsingular (A, B).
template <class Real>
HeightValue<Real> faltings_height(std::int64_t A, std::int64_t B) {
  using std::log;
  const MinimalityClass cls = lambda_class(A, B);
  const auto curve = RealCurve<Real>::from_integers(A, B);
  return {log_height_functional(curve) - log(Real(lambda_inverse(cls.lambda)))};
}

/// Everything the command-line report needs for one curve.
template <class Real>
struct HeightReport {
  IntegralCurve input;
  ScaledCurve model;  ///< weakly minimal representative and the d removed
  MinimalityClass cls;
  BigInt discriminant;
  BigInt minimal_discriminant;
  BigInt naive_height;
  HalfPlanePoint<Real> tau{Real(0), Real(1)};
  HeightValue<Real> height;
};

/// Like faltings_height, but any (A, B) with Delta != 0 is accepted and first
/// replaced by its weakly minimal representative.
template <class Real>
HeightReport<Real> height_report(std::int64_t A, std::int64_t B) {
  if (IntegralCurve{A, B}.is_singular()) throw SingularCurveError("4A^3 + 27B^2 = 0");
  HeightReport<Real> r;
  r.input = {A, B};
  r.model = weakly_minimal_representative(A, B);
  r.cls = lambda_class(r.model.A, r.model.B);
  const IntegralCurve reduced{r.model.A, r.model.B};
  r.discriminant = reduced.discriminant();
  r.minimal_discriminant = minimal_discriminant(r.model.A, r.model.B);
  r.naive_height = naive_height(r.model.A, r.model.B);
  r.tau = tau_of_curve<Real>(reduced);
  r.height = faltings_height<Real>(r.model.A, r.model.B);
  return r;
}

/// H_N / H_F with H_N = max(B^2, |A|^3).
template <class Real>
Real silverman_ratio(std::int64_t A, std::int64_t B) {
  using std::exp;
  using std::log;
  const HeightValue<Real> h = faltings_height<Real>(A, B);
  const Real log_naive = log(detail::to_real<Real>(naive_height(A, B)));
  return exp(log_naive - h.log_HF);
}

}  // namespace faltings
