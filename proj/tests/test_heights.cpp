#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/float128.hpp>
#include <random>

#include "faltings/heights.hpp"

using namespace faltings;
using R = long double;

namespace {

R delta_at_i() {
  const R pi = boost::math::constants::pi<R>();
  const R eta = std::tgamma(R(0.25)) / (2 * std::pow(pi, R(0.75)));
  return std::pow(2 * pi, R(12)) * std::pow(eta, R(24));
}

}  // namespace

TEST_CASE("height of y^2 = x^3 - x") {
  const auto h = faltings_height<R>(-1, 0);
  CHECK(h.HF() / (64 / delta_at_i()) == doctest::Approx(1).epsilon(1e-14));
  CHECK(h.HF() == doctest::Approx(9.46876541e-6).epsilon(1e-8));
  CHECK(h.hF() == doctest::Approx(std::log(h.HF()) / 12));
  CHECK(silverman_ratio<R>(-1, 0) == doctest::Approx(1 / h.HF()).epsilon(1e-14));
}

TEST_CASE("lambda correction for (0, 16)") {
  const auto curve = RealCurve<R>::from_integers(0, 16);
  const auto tau = tau_of_curve(curve);
  const R uncorrected = std::exp(log_height_functional(curve, tau));
  const R with_min = 27 / (std::exp(log_abs_delta(tau)) * std::pow(tau.im(), R(6)));
  const R hf = faltings_height<R>(0, 16).HF();
  CHECK(std::abs(hf / with_min - 1) < 1e-10L);
  CHECK(std::abs(hf / (uncorrected / 4096) - 1) < 1e-14L);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(faltings_height<R>(-3, 2), SingularCurveError);
  CHECK_THROWS_AS(faltings_height<R>(16, 64), ContractError);
  CHECK_THROWS_AS(height_report<R>(-3, 2), SingularCurveError);
}

TEST_CASE("height report reduces non-minimal input") {
  const auto r = height_report<R>(16, 64);
  CHECK(r.model.A == 1);
  CHECK(r.model.B == 1);
  CHECK(r.model.d == 2);
  CHECK(r.height.log_HF == doctest::Approx(faltings_height<R>(1, 1).log_HF));
  const auto s = height_report<R>(0, 16);
  CHECK(s.minimal_discriminant == 27);
  CHECK(s.cls.lambda == Lambda::inv2);
}

TEST_CASE("isomorphism invariance over d in {2, 3, 5}") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coef(-40, 40);
  int done = 0;
  while (done < 50) {
    const std::int64_t A = coef(rng);
    const std::int64_t B = coef(rng);
    if (IntegralCurve{A, B}.is_singular() || !is_weakly_minimal(A, B)) continue;
    const R base = faltings_height<R>(A, B).log_HF;
    for (std::int64_t d : {2, 3, 5}) {
      const std::int64_t d4 = d * d * d * d;
      const auto r = height_report<R>(d4 * A, d4 * d * d * B);
      CHECK(r.model.A == A);
      CHECK(r.model.B == B);
      CHECK(std::abs(std::exp(r.height.log_HF - base) - 1) < 1e-9L);
    }
    ++done;
  }
}

TEST_CASE("Silverman ratio is finite and positive on a box") {
  R lo = 1e300L;
  R hi = 0;
  for (std::int64_t A = -20; A <= 20; ++A)
    for (std::int64_t B = -20; B <= 20; ++B) {
      if (IntegralCurve{A, B}.is_singular() || !is_weakly_minimal(A, B)) continue;
      const R r = silverman_ratio<R>(A, B);
      REQUIRE(std::isfinite(static_cast<double>(r)));
      CHECK(r > 0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  MESSAGE("H_N / H_F over |A|, |B| <= 20: min " << static_cast<double>(lo) << ", max "
                                                  << static_cast<double>(hi));
}

TEST_CASE("near-cusp curves stay finite") {
  for (std::int64_t k : {100, 10000, 1000000}) {
    for (std::int64_t e : {-1, 1, 5}) {
      const std::int64_t A = -3 * k * k + e;
      const std::int64_t B = 2 * k * k * k;
      if (!is_weakly_minimal(A, B)) continue;
      const auto h = faltings_height<R>(A, B);
      CHECK(std::isfinite(static_cast<double>(h.log_HF)));
    }
  }
}

TEST_CASE("precisions agree") {
  using Q = boost::multiprecision::float128;
  for (auto [A, B] : {std::pair<std::int64_t, std::int64_t>{-1, 0}, {1, 1}, {-7, 6}, {-299, 2000}}) {
    const double lq = static_cast<double>(faltings_height<Q>(A, B).log_HF);
    const double ld = faltings_height<double>(A, B).log_HF;
    const double ll = static_cast<double>(faltings_height<R>(A, B).log_HF);
    CHECK(std::abs(lq - ll) < 1e-15 * (1 + std::abs(lq)));
    CHECK(std::abs(lq - ld) < 1e-12 * (1 + std::abs(lq)));
  }
}
