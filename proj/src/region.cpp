#include "faltings/region.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/cbrt.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <iomanip>
#include <limits>

#include "faltings/errors.hpp"
#include "faltings/quadrature.hpp"

namespace faltings {

namespace {

template <class Real>
int digits10_for_output() {
  return std::numeric_limits<Real>::max_digits10;
}

// log(|Delta(tau)| Im(tau)^6) at the reduced tau of the curve.
template <class Real>
Real log_modular_weight(const RealCurve<Real>& curve) {
  using std::log;
  const auto tau = tau_of_curve(curve);
  return log_abs_delta(tau) + 6 * log(tau.im());
}

}  // namespace

template <class Real>
Real log_f_inverse_sq(const RealCurve<Real>& curve) {
  if (curve.D == 0) throw CuspError("4A^3 + 27B^2 = 0");
  return log_height_functional(curve);
}

template <class Real>
Real f_of_point(Real A, Real B) {
  using std::exp;
  return exp(-log_f_inverse_sq(RealCurve<Real>::from_coefficients(A, B)) / 2);
}

template <class Real>
Real f_of_t(const CuspParameter<Real>& p) {
  using std::exp;
  const auto curve = curve_for_ratio(p.t, p.offset);
  return ratio_curve_scale(p.t) * exp(-log_f_inverse_sq(curve) / 2);
}

template <class Real>
bool in_region(const RealCurve<Real>& curve, Real X) {
  using std::log;
  if (!(X > 0)) throw ContractError("X must be positive");
  if (curve.D == 0) return false;
  return log_f_inverse_sq(curve) < log(X);
}

// ---------------------------------------------------------------------------
// sigma

namespace {

// |t|^{-2/3} f(t)^{5/3} written through a unit curve with A^3 / B^2 = t:
// f(t) = |B| f(A, B) and f(A, B)^{5/3} = exp(-(5/6) log f^{-2}).
template <class Real>
Real sigma_integrand(const RealCurve<Real>& curve, Real scale, Real abs_t) {
  using std::exp;
  using std::log;
  const Real log_f = log(scale) - log_f_inverse_sq(curve) / 2;
  return exp(Real(5) / 3 * log_f - Real(2) / 3 * log(abs_t));
}

}  // namespace

template <class Real>
SigmaResult<Real> sigma_area(Real tol) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  if (!(tol > 0)) throw ContractError("tol must be positive");
  SigmaResult<Real> result;
  const Real piece_tol = tol / 4;

  auto run = [&](const std::string& name, auto f, Real lo, Real hi) {
    const auto q = integrate_adaptive<Real>(f, lo, hi, piece_tol);
    result.pieces.push_back({name, lo, hi, q.value, q.error, q.evaluations});
  };

  // t = u^3 on [-1, 1]: dt = 3u^2 du cancels |t|^{-2/3} = u^{-2}. The curve
  // (u, 1) has D = 4u^3 + 27 exactly.
  run("origin",
      [](Real u) {
        const RealCurve<Real> curve{u, Real(1), 4 * u * u * u + 27};
        using std::exp;
        return 3 * exp(-Real(5) / 6 * log_f_inverse_sq(curve));
      },
      Real(-1), Real(1));

  // t = +-1 / w^2: the curve (+-1, w) has t = +-1/w^2, f(t) = w f(+-1, w),
  // and |t|^{-2/3} dt = 2 w^{-5/3} dw, leaving 2 f(+-1, w)^{5/3}.
  run("right tail",
      [](Real w) {
        using std::exp;
        if (w == 0) {
          // j = 1728 limit: the curve y^2 = x^3 + x.
          return 2 * exp(-Real(5) / 6 * log_f_inverse_sq(RealCurve<Real>{Real(1), Real(0), Real(4)}));
        }
        const RealCurve<Real> curve{Real(1), w, 4 + 27 * w * w};
        return 2 * exp(-Real(5) / 6 * log_f_inverse_sq(curve));
      },
      Real(0), Real(1));
  const Real w_left = 1 / sqrt(Real(8));
  run("left tail",
      [](Real w) {
        using std::exp;
        if (w == 0)
          return 2 * exp(-Real(5) / 6 * log_f_inverse_sq(RealCurve<Real>{Real(-1), Real(0), Real(-4)}));
        const RealCurve<Real> curve{Real(-1), w, 27 * w * w - 4};
        return 2 * exp(-Real(5) / 6 * log_f_inverse_sq(curve));
      },
      Real(0), w_left);

  Real bulk = 0;
  for (const auto& p : result.pieces) bulk += p.estimate;

  // Cusp windows t = -27/4 -+ e^v, with the offset e^v carried exactly.
  auto cusp_integrand = [](Real v, int side) {
    using std::abs;
    using std::exp;
    const Real offset = side * exp(v);
    const auto p = CuspParameter<Real>::from_offset(offset);
    const auto curve = curve_for_ratio(p.t, p.offset);
    return sigma_integrand(curve, ratio_curve_scale(p.t), abs(p.t)) * exp(v);
  };
  const Real tail_target = tol * bulk / 100;
  Real v_min = -8;
  while (2 * (cusp_integrand(v_min, -1) + cusp_integrand(v_min, 1)) >= tail_target) {
    v_min -= 2;
    if (v_min < -4000) throw NumericError("cusp tail of the sigma integrand does not decay");
  }
  // The integrand behaves like e^v |v|^5, so the tail below v_min is about
  // g(v_min) / (1 - 5/|v_min|).
  const Real tail_factor = abs(v_min) > 10 ? 1 / (1 - 5 / abs(v_min)) : Real(2);
  result.cusp_tail = tail_factor * (cusp_integrand(v_min, -1) + cusp_integrand(v_min, 1));

  run("left cusp", [&](Real v) { return cusp_integrand(v, -1); }, v_min, log(Real(5) / 4));
  run("right cusp", [&](Real v) { return cusp_integrand(v, 1); }, v_min, log(Real(23) / 4));

  // Fixed order keeps the sum bit-stable.
  Real integral = result.cusp_tail;
  Real error = result.cusp_tail;
  for (const auto& p : result.pieces) {
    integral += p.estimate;
    error += p.error;
  }
  result.sigma = Real(2) / 5 * integral;
  result.error = Real(2) / 5 * error;
  return result;
}

// ---------------------------------------------------------------------------
// constants

namespace {

template <class Real>
Real log_modular_weight_at(Real re, Real im) {
  using std::log;
  const HalfPlanePoint<Real> tau(re, im);
  return log_abs_delta(tau) + 6 * log(im);
}

// Clamp into { 0 <= Re <= 1/2, |tau| >= 1, Im <= 4 }.
template <class Real>
std::pair<Real, Real> project_domain(Real re, Real im) {
  using std::sqrt;
  re = std::clamp(re, Real(0), Real(1) / 2);
  const Real floor_im = sqrt(1 - re * re);
  im = std::clamp(im, floor_im, Real(4));
  return {re, im};
}

long double e4_at_i() {
  const long double g = std::tgamma(0.25L);
  return 3 * std::pow(g, 8.0L) / std::pow(2 * boost::math::constants::pi<long double>(), 6.0L);
}

long double e4_at_rho_height() {
  // E4 at i sqrt(3)/2: q = e^{-pi sqrt 3} is real and the series is summed
  // directly at the unreduced point.
  static const long double value = [] {
    const long double q = std::exp(-boost::math::constants::pi<long double>() * std::sqrt(3.0L));
    return detail::e4_reduced<long double>(Complex<long double>(q, 0), SeriesOptions<long double>{})
        .real();
  }();
  return value;
}

long double y_max_for_j(long double J) {
  // |j(tau)| >= e^{2 pi y} - 1200 on the fundamental domain when y >= 1.
  return std::max(1.0L, std::log(J + 1200) / (2 * boost::math::constants::pi<long double>()));
}

long double log_height_weight_bound(long double y) {
  const long double e4_low = e4_at_rho_height();
  const long double a = 3 * std::log(e4_low);
  const long double b = 3 * std::log(e4_at_i()) + 6 * std::log(y);
  return 12 * std::log(2 * boost::math::constants::pi<long double>()) + std::max(a, b);
}

}  // namespace

long double cusp_lower_bound(long double a) {
  const long double J = 6912 * a * a * a;
  return std::exp(std::log(110592.0L) + 3 * std::log(a) - log_height_weight_bound(y_max_for_j(J)));
}

long double cusp_cutoff_real(long double X) {
  if (!(X > 0)) throw ContractError("X must be positive");
  long double lo = 0;
  long double hi = 1;
  while (cusp_lower_bound(hi) < X) {
    lo = hi;
    hi *= 2;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12L * hi; ++i) {
    const long double mid = (lo + hi) / 2;
    (cusp_lower_bound(mid) < X ? lo : hi) = mid;
  }
  return hi;
}

std::int64_t cusp_cutoff(long double X) {
  if (!(X > 0)) throw ContractError("X must be positive");
  // A small relative margin absorbs rounding in L.
  const long double target = X * (1 + 1e-9L);
  std::int64_t hi = 1;
  while (cusp_lower_bound(static_cast<long double>(hi)) < target) hi *= 2;
  std::int64_t lo = hi / 2;  // L(lo) < target unless hi == 1
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (cusp_lower_bound(static_cast<long double>(mid)) < target ? lo : hi) = mid;
  }
  return hi;
}

template <class Real>
RegionConstants<Real> bound_constants() {
  using boost::math::cbrt;
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  RegionConstants<Real> k;
  k.c = cbrt(Real(27) / 4);

  const Real c2 = k.c * k.c;
  Real x = Real(3) / (4 * 192 * c2);
  for (int i = 0; i < 100; ++i) {
    const Real g = 64 * x * (3 * c2 + x * x) - Real(3) / 4;
    const Real dx = g / (64 * (3 * c2 + 3 * x * x));
    x -= dx;
    if (abs(dx) <= std::numeric_limits<Real>::epsilon() * x) break;
  }
  k.epsilon0 = x;
  k.epsilon0_residual = abs(64 * x * (3 * c2 + x * x) - Real(3) / 4);

  // Grid over the right half of the fundamental domain (|Delta| Im^6 is even
  // under tau -> -conj(tau)), then a projected pattern search.
  Real best = -std::numeric_limits<Real>::infinity();
  Real best_re = 0;
  Real best_im = 1;
  constexpr int kReSteps = 100;
  constexpr int kImSteps = 200;
  for (int i = 0; i <= kReSteps; ++i) {
    const Real re = Real(i) / (2 * kReSteps);
    const Real im_lo = sqrt(1 - re * re);
    for (int j = 0; j <= kImSteps; ++j) {
      const Real im = im_lo + (4 - im_lo) * Real(j) / kImSteps;
      const Real v = log_modular_weight_at(re, im);
      if (v > best) {
        best = v;
        best_re = re;
        best_im = im;
      }
    }
  }
  Real step = Real(1) / (2 * kReSteps);
  const Real min_step = sqrt(std::numeric_limits<Real>::epsilon()) / 1024;
  while (step > min_step) {
    bool moved = false;
    for (int dr = -1; dr <= 1; ++dr)
      for (int di = -1; di <= 1; ++di) {
        if (dr == 0 && di == 0) continue;
        const auto [re, im] = project_domain(best_re + dr * step, best_im + di * step);
        const Real v = log_modular_weight_at(re, im);
        if (v > best) {
          best = v;
          best_re = re;
          best_im = im;
          moved = true;
        }
      }
    if (!moved) step /= 2;
  }
  k.C_sampled = exp(best);
  k.C = k.C_sampled * (1 + Real(1e-10));
  k.C_argmax_re = best_re;
  k.C_argmax_im = best_im;

  k.M = boost::math::constants::e<Real>();
  // N: for X_k <= X <= X_{k+1} the cutoff is at most A*(X_{k+1}) while the
  // window N X_M^{1/3} log(X_M)^2 is at least its value at X_k.
  const long double M = static_cast<long double>(k.M);
  long double N = 0;
  constexpr int kPerDecade = 64;
  constexpr int kDecades = 30;
  long double prev_window = std::cbrt(M);  // X_M = M, log X_M = 1
  for (int i = 1; i <= kDecades * kPerDecade; ++i) {
    const long double x = M * std::pow(10.0L, static_cast<long double>(i) / kPerDecade);
    const long double lx = std::log(x);
    N = std::max(N, cusp_cutoff_real(x) / prev_window);
    prev_window = std::cbrt(x) * lx * lx;
  }
  k.N = Real(N);
  k.beta = Real(1000);
  // 27 B^2 < C X / 16 + 4|A|^3 with |A| <= N X_M^{1/3} log(X_M)^2, X <= X_M
  // and log X_M >= 1.
  k.beta0 = sqrt((k.C / 16 + 4 * k.N * k.N * k.N) / 27) / (k.N * sqrt(k.N));
  return k;
}

namespace {

template <class Real>
const RegionConstants<Real>& cached_constants() {
  static const RegionConstants<Real> k = bound_constants<Real>();
  return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// boundary

template <class Real>
Real boundary_function(const RealCurve<Real>& curve, Real X) {
  using std::exp;
  if (curve.D == 0) throw SingularCurveError("F is evaluated off the cubic");
  const Real sign = curve.D > 0 ? Real(1) : Real(-1);
  return curve.discriminant() + sign * X * exp(log_modular_weight(curve));
}

namespace {

template <class Real>
RealCurve<Real> curve_on_line(Real B, Real epsilon, Real c) {
  using boost::math::cbrt;
  using std::abs;
  const Real b13 = cbrt(abs(B));
  const Real inv_b43 = 1 / (b13 * abs(B));
  const Real A = -c * b13 * b13 + epsilon * inv_b43;
  const Real x = epsilon / (B * B);
  const Real D = 4 * epsilon * (3 * c * c - 3 * c * x + x * x);
  return {A, B, D};
}

template <class Real>
Real relative_residual(const RealCurve<Real>& curve, Real X) {
  using std::abs;
  return abs(boundary_function(curve, X)) / (abs(curve.discriminant()) + 1);
}

}  // namespace

template <class Real>
std::optional<BoundaryPoint<Real>> boundary_point(Real B, Real X, int side) {
  using std::exp;
  using std::log;
  if (!(X > 0)) throw ContractError("X must be positive");
  if (side != 1 && side != -1) throw ContractError("side must be +1 or -1");
  const auto& k = cached_constants<Real>();
  const Real log_x = log(X);

  // Points of R_X satisfy 16|D| < C X; past that the line is outside.
  auto make = [&](Real v) -> RealCurve<Real> {
    if (B == 0) {
      const Real A = side * exp(v);
      return {A, Real(0), 4 * A * A * A};
    }
    return curve_on_line(B, side * exp(v), k.c);
  };
  auto g = [&](Real v) { return log_f_inverse_sq(make(v)) - log_x; };

  const Real v_out = B == 0 ? log(k.C * X / 64) / 3 + Real(0.01)
                            : log(k.C * X / (48 * k.c * k.c)) + Real(0.01);
  Real hi = v_out;
  Real g_hi = g(hi);
  if (!(g_hi > 0)) return std::nullopt;
  Real lo = hi;
  Real g_lo = g_hi;
  constexpr Real kStep = Real(1) / 4;
  int steps = 0;
  for (; steps < 800; ++steps) {
    lo = hi - kStep;
    g_lo = g(lo);
    if (g_lo < 0) break;
    hi = lo;
    g_hi = g_lo;
  }
  if (!(g_lo < 0)) return std::nullopt;

  std::uintmax_t iterations = 200;
  const auto tol = boost::math::tools::eps_tolerance<Real>(std::numeric_limits<Real>::digits - 2);
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, tol, iterations);
  if (iterations >= 200) return std::nullopt;
  // Take whichever end has the smaller residual.
  const auto ca = make(a);
  const auto cb = make(b);
  const bool use_a = relative_residual(ca, X) <= relative_residual(cb, X);
  const RealCurve<Real> curve = use_a ? ca : cb;
  if (relative_residual(curve, X) >= Real(1e-8)) return std::nullopt;
  BoundaryPoint<Real> p{curve.A, curve.B, curve.D, Real(0)};
  if (B != 0) p.epsilon = side * exp(use_a ? a : b);
  return p;
}

template <class Real>
BoundarySweep<Real> boundary_samples(Real X, int n, Real b_max) {
  using std::asinh;
  using std::sinh;
  using std::sqrt;
  if (n < 2) throw ContractError("need at least two boundary points");
  if (!(b_max > 0)) throw ContractError("b_max must be positive");
  BoundarySweep<Real> sweep;
  const int lines = (n + 1) / 2;
  const Real U = asinh(b_max);
  const Real root_x = sqrt(X);
  for (int i = 0; i < lines && static_cast<int>(sweep.points.size()) < n; ++i) {
    const Real u = lines == 1 ? Real(0) : -U + 2 * U * Real(i) / (lines - 1);
    const Real B = (2 * i + 1 == lines) ? Real(0) : root_x * sinh(u);
    bool skipped = false;
    for (int side : {-1, 1}) {
      if (static_cast<int>(sweep.points.size()) >= n) break;
      const auto p = boundary_point(B, X, side);
      if (p)
        sweep.points.push_back(*p);
      else
        skipped = true;
    }
    if (skipped) sweep.skipped_lines.push_back(B);
  }
  return sweep;
}

template <class Real>
std::pair<Real, Real> boundary_gradient(const BoundaryPoint<Real>& p, Real X) {
  using std::abs;
  using std::cbrt;
  using std::sqrt;
  const RealCurve<Real> at{p.A, p.B, p.D};
  if (p.D == 0) throw SingularCurveError("boundary gradient on the cubic");
  if (relative_residual(at, X) > Real(1e-6))
    throw ContractError("boundary_gradient: point is not on the boundary");

  // Steps move D by about 1e-4 of itself; D is updated by its exact
  // polynomial expansion so no cancellation enters through 4A^3 + 27B^2.
  const Real scale = Real(1e-4) * abs(p.D);
  Real h = p.A != 0 ? scale / (12 * p.A * p.A) : Real(1e-4) * cbrt(abs(p.D));
  Real k = p.B != 0 ? scale / (54 * abs(p.B)) : Real(1e-4) * sqrt(abs(p.D));
  h = std::min(h, Real(1e-3) * (abs(p.A) + 1));
  k = std::min(k, Real(1e-3) * (abs(p.B) + 1));

  auto shifted_a = [&](Real d) {
    return RealCurve<Real>{p.A + d, p.B, p.D + 12 * p.A * p.A * d + 12 * p.A * d * d + 4 * d * d * d};
  };
  auto shifted_b = [&](Real d) {
    return RealCurve<Real>{p.A, p.B + d, p.D + 54 * p.B * d + 27 * d * d};
  };
  const Real dA = (boundary_function(shifted_a(h), X) - boundary_function(shifted_a(-h), X)) / (2 * h);
  const Real dB = (boundary_function(shifted_b(k), X) - boundary_function(shifted_b(-k), X)) / (2 * k);
  return {dA, dB};
}

template <class Real>
void write_sigma_csv(std::ostream& out, const SigmaResult<Real>& r) {
  out << std::setprecision(digits10_for_output<Real>());
  out << "piece,lo,hi,estimate,err\n";
  for (const auto& p : r.pieces)
    out << p.name << ',' << p.lo << ',' << p.hi << ',' << p.estimate << ',' << p.error << '\n';
  out << "cusp tail,-inf,," << r.cusp_tail << ',' << r.cusp_tail << '\n';
}

template <class Real>
void write_boundary_csv(std::ostream& out, const BoundarySweep<Real>& sweep) {
  out << std::setprecision(digits10_for_output<Real>());
  out << "A,B\n";
  for (const auto& p : sweep.points) out << p.A << ',' << p.B << '\n';
}

#define FALTINGS_INSTANTIATE_REGION(R)                                                     \
  template R log_f_inverse_sq<R>(const RealCurve<R>&);                                     \
  template R f_of_point<R>(R, R);                                                          \
  template R f_of_t<R>(const CuspParameter<R>&);                                           \
  template bool in_region<R>(const RealCurve<R>&, R);                                      \
  template SigmaResult<R> sigma_area<R>(R);                                                \
  template RegionConstants<R> bound_constants<R>();                                        \
  template R boundary_function<R>(const RealCurve<R>&, R);                                 \
  template std::optional<BoundaryPoint<R>> boundary_point<R>(R, R, int);                   \
  template BoundarySweep<R> boundary_samples<R>(R, int, R);                                \
  template std::pair<R, R> boundary_gradient<R>(const BoundaryPoint<R>&, R);               \
  template void write_sigma_csv<R>(std::ostream&, const SigmaResult<R>&);                  \
  template void write_boundary_csv<R>(std::ostream&, const BoundarySweep<R>&);

FALTINGS_INSTANTIATE_REGION(double)
FALTINGS_INSTANTIATE_REGION(long double)
FALTINGS_INSTANTIATE_REGION(boost::multiprecision::float128)

}  // namespace faltings
