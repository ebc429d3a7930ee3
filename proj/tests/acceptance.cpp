// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <boost/math/constants/constants.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "faltings/census.hpp"
#include "faltings/heights.hpp"
#include "faltings/region.hpp"

using namespace faltings;
using R = long double;
using Pt = HalfPlanePoint<R>;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const RegionConstants<R>& constants() {
  static const auto k = bound_constants<R>();
  return k;
}

R sigma_1e3 = 0;

void sigma_reproduction(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = sigma_area<R>(R(1e-3));
  const double t = seconds_since(t0);
  sigma_1e3 = s.sigma;
  o.detail << std::setprecision(8) << "sigma = " << static_cast<double>(s.sigma) << " in " << t << " s";
  o.require(std::abs(s.sigma / 29089 - 1) < 0.005L, "within 0.5% of 29089");
  o.require(t <= 60, "runtime <= 60 s");
}

void leading_constant(Outcome& o) {
  const R lead = 12 * sigma_1e3 / zeta10();
  o.detail << std::setprecision(9) << "12 sigma / zeta(10) = " << static_cast<double>(lead);
  o.require(std::abs(lead / 348716 - 1) < 0.005L, "within 0.5% of 348716");
}

void class_table(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = residue_class_census(3);
  const double t = seconds_since(t0);
  const std::int64_t m2 = 4096 - 12 - 4;
  const std::int64_t m3 = 531441 - 18 - 9;
  o.detail << "sizes " << c.class_sizes[0] << ", " << c.class_sizes[1] << ", " << c.class_sizes[2] << ", "
           << c.class_sizes[3] << "; " << c.instabilities << " unstable; " << c.lifts_checked << " lifts; " << t
           << " s";
  o.require(c.class_sizes[0] == m2 * m3, "|Cl_1|");
  o.require(c.class_sizes[1] == 12 * m3, "|Cl_2^-12|");
  o.require(c.class_sizes[2] == m2 * 18, "|Cl_3^-12|");
  o.require(c.class_sizes[3] == 216, "|Cl_6^-12|");
  o.require(c.instabilities == 0, "class stability");
  o.require(c.lifts_checked >= 3 * (4096 + 531441), "three lifts per class");
  o.require(t <= 600, "runtime <= 10 min");
}

void epsilon_zero(Outcome& o) {
  const auto& k = constants();
  const R e = k.epsilon0;
  const R residual = std::abs(64 * e * (3 * k.c * k.c + e * e) - R(0.75));
  std::ostringstream two;
  two << std::setprecision(2) << static_cast<double>(e);
  o.detail << std::setprecision(12) << "epsilon0 = " << static_cast<double>(e) << ", residual "
           << static_cast<double>(residual) << ", 2 s.f. " << two.str();
  o.require(residual < 1e-12L, "residual < 1e-12");
  o.require(two.str() == "0.0011", "rounds to 0.0011");
}

void modular_kernel(Outcome& o) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-0.5, 0.5);
  std::uniform_real_distribution<double> im(0.9, 5);
  std::uniform_int_distribution<int> coef(-5, 5);
  R worst_weight = 0;
  R worst_j = 0;
  for (int done = 0; done < 100;) {
    const Pt z(re(rng), im(rng));
    if (!z.is_reduced()) continue;
    const auto w = z.value();
    const auto ratio = delta(Pt(-Complex<R>(1) / w)) / detail::pow_int(w, 12) / delta(z);
    worst_weight = std::max(worst_weight, std::abs(ratio - Complex<R>(1)));
    ++done;
  }
  for (int done = 0; done < 100;) {
    const UnimodularMap g{coef(rng), coef(rng), coef(rng), coef(rng)};
    if (g.determinant() != 1) continue;
    const Pt z(re(rng), im(rng) / 2 + 0.45);
    const auto j = j_invariant(z);
    worst_j = std::max(worst_j, std::abs(j_invariant(Pt(g.apply(z.value()))) - j) / (1 + std::abs(j)));
    ++done;
  }
  const R ji = std::abs(j_invariant(Pt(0, 1)) - Complex<R>(1728));
  const R jrho = std::abs(j_invariant(Pt(0.5L, std::sqrt(R(3)) / 2)));
  o.detail << std::setprecision(3) << "weight-12 err " << static_cast<double>(worst_weight) << ", j invariance err "
           << static_cast<double>(worst_j) << ", |j(i) - 1728| " << static_cast<double>(ji) << ", |j(rho)| "
           << static_cast<double>(jrho);
  o.require(worst_weight < 1e-9L, "weight-12 modularity");
  o.require(worst_j < 1e-9L, "unimodular invariance of j");
  o.require(ji < 1e-9L && jrho < 1e-9L, "special values");
}

void period_round_trip(Outcome& o) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> coef(-50, 50);
  R worst = 0;
  for (int done = 0; done < 200;) {
    const IntegralCurve c{coef(rng), coef(rng)};
    if (c.is_singular()) continue;
    const BigRational jq = c.j_invariant();
    const R j = detail::to_real<R>(BigInt(numerator(jq))) / detail::to_real<R>(BigInt(denominator(jq)));
    const auto tau = tau_of_curve<R>(c);
    worst = std::max(worst, std::abs(j_invariant(tau) - Complex<R>(j)) / (1 + std::abs(j)));
    ++done;
  }
  o.detail << std::setprecision(3) << "worst relative j error " << static_cast<double>(worst) << " over 200 curves";
  o.require(worst < 1e-8L, "round trip < 1e-8");
}

void height_invariance(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-40, 40);
  R worst = 0;
  bool models_ok = true;
  for (int done = 0; done < 50;) {
    const std::int64_t A = coef(rng);
    const std::int64_t B = coef(rng);
    if (IntegralCurve{A, B}.is_singular() || !is_weakly_minimal(A, B)) continue;
    const R base = faltings_height<R>(A, B).log_HF;
    for (std::int64_t d : {2, 3, 5}) {
      const std::int64_t d4 = d * d * d * d;
      const auto r = height_report<R>(d4 * A, d4 * d * d * B);
      models_ok = models_ok && r.model.A == A && r.model.B == B;
      worst = std::max(worst, std::abs(std::exp(r.height.log_HF - base) - 1));
    }
    ++done;
  }
  const auto r1 = height_report<R>(-1, 0);
  const auto r2 = height_report<R>(0, 16);
  o.detail << std::setprecision(3) << "worst relative H_F change " << static_cast<double>(worst) << "; (-1,0) "
           << lambda_label(r1.cls.lambda) << " Dmin " << r1.minimal_discriminant << "; (0,16) "
           << lambda_label(r2.cls.lambda) << " Dmin " << r2.minimal_discriminant;
  o.require(models_ok, "reduction recovers the base model");
  o.require(worst < 1e-9L, "invariance < 1e-9");
  o.require(r1.cls.lambda == Lambda::one && r1.minimal_discriminant == 64, "(-1, 0)");
  o.require(r2.cls.lambda == Lambda::inv2 && r2.minimal_discriminant == 27, "(0, 16)");
}

std::map<double, CensusReport> census;

void census_equivalence(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (double X : {1e-3, 1e-2, 1e-1, 1.0}) {
    try {
      census.emplace(X, run_census(X));
    } catch (const IntegrityError& e) {
      o.require(false, e.what());
      return;
    }
  }
  const double t = seconds_since(t0);
  for (const auto& [X, r] : census) {
    o.detail << "X=" << X << ": " << r.total_direct << "/" << r.total_sieve << "; ";
    o.require(r.total_direct == r.total_sieve, "totals agree");
    o.require(r.counts_by_lambda == r.sieve_by_lambda, "per-lambda counts agree");
  }
  o.detail << t << " s";
  o.require(t <= 600, "runtime <= 10 min");
}

void asymptotic_trend(Outcome& o) {
  if (census.size() < 4) {
    o.require(false, "census unavailable");
    return;
  }
  auto ratio = [](const CensusReport& r) { return static_cast<R>(r.total_direct) / r.prediction; };
  const R r2 = ratio(census.at(1e-2));
  const R r1 = ratio(census.at(1e-1));
  const R r0 = ratio(census.at(1.0));
  o.detail << std::setprecision(6) << "ratios " << static_cast<double>(r2) << ", " << static_cast<double>(r1) << ", "
           << static_cast<double>(r0) << " at X = 1e-2, 1e-1, 1";
  o.require(r0 >= 0.5L && r0 <= 1.5L, "ratio at X = 1 in [0.5, 1.5]");
  o.require(std::abs(r1 - 1) <= std::abs(r2 - 1) && std::abs(r0 - 1) <= std::abs(r1 - 1),
            "distance to 1 non-increasing");
}

void naive_cross_check(Outcome& o) {
  const auto n = count_naive(1e6L);
  const R ratio = n.count / n.prediction;
  o.detail << std::setprecision(6) << n.count << " curves, prediction " << static_cast<double>(n.prediction)
           << ", ratio " << static_cast<double>(ratio);
  o.require(std::abs(ratio - 1) < 0.05L, "within 5%");
}

void gradient_quadrants(Outcome& o) {
  // The expected slope constant of dF/dA against A^2.
  const R pi = boost::math::constants::pi<R>();
  const R target = -(192 - 3 / std::pow(pi, R(6)));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logb(std::log(1e3), std::log(1e5));
  int quadrant_bad = 0;
  int magnitude_bad = 0;
  R lo = 0;
  R hi = -1e30L;
  for (int i = 0; i < 50; ++i) {
    const R B = std::exp(R(logb(rng))) * (i % 2 ? -1 : 1);
    const auto p = boundary_point<R>(B, 1, i % 4 < 2 ? 1 : -1);
    if (!p) {
      o.require(false, "no boundary point");
      return;
    }
    const auto [dA, dB] = boundary_gradient(*p, R(1));
    if (!(dA < 0 && (B > 0 ? dB < 0 : dB > 0))) ++quadrant_bad;
    const R slope = dA / (p->A * p->A);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
    if (std::abs(slope / target - 1) > 0.05L) ++magnitude_bad;
  }
  o.detail << std::setprecision(6) << "quadrant violations " << quadrant_bad << "/50; (dF/dA)/A^2 in ["
           << static_cast<double>(lo) << ", " << static_cast<double>(hi) << "] against " << static_cast<double>(target)
           << ", " << magnitude_bad << "/50 outside 5%";
  o.require(quadrant_bad == 0, "gradient quadrants");
  o.require(magnitude_bad == 0, "(dF/dA)/A^2 within 5% of the target");
}

void region_laws(Outcome& o) {
  const auto& k = constants();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u01(0, 1);

  int scaling_checked = 0;
  int scaling_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const R A = 400 * u01(rng) - 200;
    const R B = 1200 * u01(rng) - 600;
    const bool base = in_region<R>(A, B, 1);
    for (R X : {8.0L, 64.0L, 1000.0L}) {
      ++scaling_checked;
      scaling_bad += in_region<R>(std::cbrt(X) * A, std::sqrt(X) * B, X) != base;
    }
  }

  int bound_inside = 0;
  int bound_bad = 0;
  int tail_inside = 0;
  int tail_bad = 0;
  for (R X : {1.0L, 10.0L, 1000.0L}) {
    const R b1 = std::sqrt(k.C * X / 27);
    const R a1 = std::cbrt(k.C * X / 2);
    for (int i = 0; i < 2000; ++i) {
      const R A = (2 * u01(rng) - 1) * a1;
      const R B = (2 * u01(rng) - 1) * b1;
      if (!in_region<R>(A, B, X)) continue;
      ++bound_inside;
      bound_bad += !(16 * std::abs(4 * A * A * A + 27 * B * B) < k.C * X);
    }
    const R log_lo = std::log(1e-3L);
    const R log_hi = std::log(2 * k.C);
    for (int i = 0; i < 4000; ++i) {
      const R B = b1 / std::pow(1 - R(u01(rng)), R(3)) * (i % 2 ? 1 : -1);
      const R eps = std::exp(log_lo + (log_hi - log_lo) * R(u01(rng))) * (i % 4 < 2 ? 1 : -1);
      const R b13 = std::cbrt(std::abs(B));
      const R x = eps * X / (B * B);
      const RealCurve<R> curve{-k.c * b13 * b13 + eps * X / (b13 * std::abs(B)), B,
                               4 * eps * X * (3 * k.c * k.c - 3 * k.c * x + x * x)};
      if (!in_region(curve, X)) continue;
      ++tail_inside;
      tail_bad += !(std::abs(eps) < k.C);
    }
  }

  int doubling_points = 0;
  bool doubling_ok = census.size() == 4;
  for (double X : {1e-2, 1e-1, 1.0}) {
    if (!doubling_ok) break;
    CensusOptions wide;
    wide.window_scale = 2;
    const auto w = run_census(X, wide);
    doubling_ok = doubling_ok && w.counts_by_lambda == census.at(X).counts_by_lambda &&
                  w.total_sieve == census.at(X).total_sieve;
    doubling_points += static_cast<int>(w.total_direct);
  }

  o.detail << "scaling " << scaling_bad << "/" << scaling_checked << " bad; discriminant bound " << bound_bad << "/"
           << bound_inside << " bad; dichotomy " << tail_bad << "/" << tail_inside << " bad; doubling over "
           << doubling_points << " curves " << (doubling_ok ? "stable" : "unstable");
  o.require(scaling_checked >= 100 && scaling_bad == 0, "membership scaling");
  o.require(bound_inside >= 100 && bound_bad == 0, "16|Delta| < C X");
  o.require(tail_inside >= 100 && tail_bad == 0, "|epsilon| < C in the cusp");
  o.require(doubling_points >= 100 && doubling_ok, "window doubling");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"sigma reproduction", sigma_reproduction},
      {"leading constant", leading_constant},
      {"residue-class table", class_table},
      {"epsilon0", epsilon_zero},
      {"modular kernel", modular_kernel},
      {"period round trip", period_round_trip},
      {"height invariance", height_invariance},
      {"census oracle equivalence", census_equivalence},
      {"asymptotic trend", asymptotic_trend},
      {"naive-height cross-check", naive_cross_check},
      {"gradient quadrants", gradient_quadrants},
      {"region laws", region_laws},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << std::setw(2) << index << " " << name << ": " << o.detail.str()
              << std::endl;
  }
  std::cout << (12 - failures) << "/12 criteria pass" << std::endl;
  return failures == 0 ? 0 : 1;
}
