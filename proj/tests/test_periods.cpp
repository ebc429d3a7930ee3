#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/float128.hpp>
#include <random>

#include "faltings/periods.hpp"

using namespace faltings;
using R = long double;
using Pt = HalfPlanePoint<R>;

namespace {

R j_error(const Pt& tau, R j_exact) {
  return std::abs(j_invariant(tau) - Complex<R>(j_exact)) / (1 + std::abs(j_exact));
}

R j_of(std::int64_t A, std::int64_t B) {
  const BigRational j = IntegralCurve{A, B}.j_invariant();
  return detail::to_real<R>(BigInt(numerator(j))) / detail::to_real<R>(BigInt(denominator(j)));
}

// Distance from tau to the locus of reduced points with real j.
R real_j_locus_distance(const Pt& tau) {
  return std::min({std::abs(tau.re()), std::abs(std::abs(tau.re()) - R(0.5)),
                   std::abs(std::abs(tau.value()) - 1)});
}

}  // namespace

TEST_CASE("curve invariants are exact") {
  const IntegralCurve c{1, 1};
  CHECK(c.discriminant() == -16 * 31);
  CHECK(c.j_invariant() == BigRational(6912, 31));
  CHECK(c.j_invariant() * BigRational(c.discriminant()) == BigRational(-1728 * 64));
  CHECK_THROWS_AS(IntegralCurve({-3, 2}).j_invariant(), SingularCurveError);
  CHECK_THROWS_AS(period_lattice(RealCurve<R>::from_integers(-3, 2)), SingularCurveError);
  CHECK_THROWS_AS(tau_of_t(R(-27) / 4), CuspError);
  // Beyond the 128-bit fast path.
  const auto big = RealCurve<R>::from_integers(std::int64_t(1) << 50, 3);
  CHECK(big.D == doctest::Approx(4 * std::pow(2.0L, 150)));
}

TEST_CASE("tau of the j = 1728 and j = 0 curves") {
  const Pt t1 = tau_of_curve<R>(IntegralCurve{-1, 0});
  CHECK(std::abs(t1.value() - Complex<R>(0, 1)) < 1e-15L);
  const Pt t2 = tau_of_curve<R>(IntegralCurve{0, 1});
  CHECK(std::abs(t2.value() - Complex<R>(0.5L, std::sqrt(R(3)) / 2)) < 1e-15L);
  const Pt t3 = tau_of_curve<R>(IntegralCurve{1, 1});
  CHECK(j_error(t3, R(6912) / 31) < 1e-8L);
}

TEST_CASE("periods recover the discriminant") {
  for (auto [A, B] : {std::pair<int, int>{-1, 0}, {0, 1}, {1, 1}, {-7, 6}, {-2, 1}, {5, -3}}) {
    const auto c = RealCurve<R>::from_integers(A, B);
    const auto p = period_lattice(c);
    const Pt tau(p.ratio());
    CHECK(p.omega1.imag() == 0);
    const R lhs = std::exp(log_abs_delta(tau)) / std::pow(std::abs(p.omega1), R(12));
    CHECK(lhs / std::abs(c.discriminant()) == doctest::Approx(1).epsilon(1e-14));
  }
}

TEST_CASE("homothety scales periods and fixes tau") {
  for (auto [A, B] : {std::pair<int, int>{-1, 1}, {3, -5}, {-10, 3}, {2, 0}}) {
    const auto p = period_lattice(RealCurve<R>::from_integers(A, B));
    for (int u : {2, 3, 5}) {
      const std::int64_t u4 = std::int64_t(u) * u * u * u;
      const auto c = RealCurve<R>::from_integers(u4 * A, u4 * u * u * B);
      const auto q = period_lattice(c);
      CHECK(std::abs(q.omega1 * R(u) - p.omega1) < 1e-14L * std::abs(p.omega1));
      const Pt a = tau_of_curve(RealCurve<R>::from_integers(A, B));
      const Pt b = tau_of_curve(c);
      CHECK(std::abs(a.value() - b.value()) < 1e-10L);
    }
  }
}

TEST_CASE("round trip over random integer curves") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coef(-50, 50);
  int done = 0;
  while (done < 200) {
    const IntegralCurve c{coef(rng), coef(rng)};
    if (c.is_singular()) continue;
    const Pt tau = tau_of_curve<R>(c);
    CHECK(tau.is_reduced());
    CHECK(j_error(tau, j_of(c.A, c.B)) < 1e-8L);
    CHECK_MESSAGE(real_j_locus_distance(tau) < 1e-8L, c.A, " ", c.B, " ", tau.re(), " ", tau.im());
    ++done;
  }
}

TEST_CASE("near-singular curves keep relative accuracy") {
  // (-3k^2 + 1, 2k^3) is one unit away from the cubic.
  for (std::int64_t k : {10, 1000, 100000}) {
    const IntegralCurve c{-3 * k * k + 1, 2 * k * k * k};
    const Pt tau = tau_of_curve<R>(c);
    const R j = j_of(c.A, c.B);
    const R logj = std::log(std::abs(j));
    // log|j| ~ 2 pi Im tau near the cusp.
    const R approx = logj / (2 * boost::math::constants::pi<R>());
    CHECK(tau.im() == doctest::Approx(approx).epsilon(1e-3));
    CHECK(std::abs(j_invariant(tau).real() / j - 1) < 1e-9L);
  }
}

TEST_CASE("tau_t examples") {
  CHECK(std::abs(tau_of_t(R(0)).value() - Complex<R>(0.5L, std::sqrt(R(3)) / 2)) < 1e-15L);
  // j - 1728 has a double zero at i, so |tau_t - i| ~ sqrt(|j_t - 1728|). The
  // value at t = 1e10 is from a 40-digit solve of j(e^{i theta}) = j_t.
  CHECK(std::abs(tau_of_t(R(1e10)).value() - Complex<R>(0, 1)) ==
        doctest::Approx(6.854198714298702e-6).epsilon(1e-6));
  CHECK(std::abs(tau_of_t(R(1e12)).value() - Complex<R>(0, 1)) < 1e-6L);
  CHECK(std::abs(tau_of_t(R(-1e12)).value() - Complex<R>(0, 1)) < 1e-6L);
  R last = 0;
  for (int k = 3; k <= 8; ++k) {
    const R t = R(-27) / 4 + std::pow(R(10), R(-k));
    const R y = tau_of_t(t).im();
    CHECK(y > last);
    last = y;
  }
  CHECK(tau_of_t(R(-27) / 4 + R(1e-6)).im() > 2);
  for (R t : {-100.0L, -7.0L, -6.0L, -1.0L, -0.3L, 0.5L, 1.0L, 3.0L, 1e6L}) {
    const R j = 6912 * t / (4 * t + 27);
    CHECK(j_error(tau_of_t(t), j) < 1e-10L);
  }
}

TEST_CASE("quad precision periods") {
  using Q = boost::multiprecision::float128;
  const auto tau = tau_of_curve<Q>(IntegralCurve{1, 1});
  const Q j = Q(6912) / 31;
  CHECK(static_cast<double>(abs(j_invariant(tau) - Complex<Q>(j)) / j) < 1e-28);
}
