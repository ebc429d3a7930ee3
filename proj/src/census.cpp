#include "faltings/census.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <exception>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "faltings/errors.hpp"
#include "faltings/region.hpp"

namespace faltings {

namespace {

using i128 = __int128;

const RegionConstants<long double>& constants() {
  static const RegionConstants<long double> k = bound_constants<long double>();
  return k;
}

const ResidueClassTable& class_table() {
  static const ResidueClassTable t;
  return t;
}

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }
i128 abs128(i128 v) { return v < 0 ? -v : v; }

std::int64_t mod_pos(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

// ---------------------------------------------------------------------------
// windows

// Candidates satisfy |D| < K, |A| < A_lim, |B| < B_lim. Every point of R_X
// with Delta != 0 lies inside the unscaled window: 16|D| < C X bounds D, the
// cusp bound excludes |A| >= cusp_cutoff(X), and 27 B^2 = D - 4A^3 then
// bounds B.
struct Window {
  long double X = 0;
  i128 K = 0;
  std::int64_t A_lim = 0;
  std::int64_t B_lim = 0;

  bool contains(std::int64_t A, std::int64_t B, i128 D) const {
    return abs128(D) < K && abs64(A) < A_lim && abs64(B) < B_lim;
  }
};

Window make_window(long double X, long double scale) {
  if (!(X > 0)) throw ContractError("X must be positive");
  Window w;
  w.X = X;
  const long double Kf = constants().C * X / 16 * scale;
  if (Kf > 1e30L) throw ContractError("X is too large for the census window");
  w.K = static_cast<i128>(std::floor(Kf)) + 1;
  const long double a = std::ceil(static_cast<long double>(cusp_cutoff(X)) * scale);
  if (a >= static_cast<long double>(kInt128MaxA)) throw ContractError("X is too large for the census window");
  w.A_lim = static_cast<std::int64_t>(a);
  const long double b2 = (static_cast<long double>(w.K) + 4 * a * a * a) / 27;
  const long double b = std::floor(std::sqrt(b2)) + 2;
  if (b >= static_cast<long double>(kInt128MaxB)) throw ContractError("X is too large for the census window");
  w.B_lim = static_cast<std::int64_t>(b);
  return w;
}

// ---------------------------------------------------------------------------
// residue filters

// Candidates are (A, B) with B = b + kM and A = a + jM for listed residues;
// tables that are not folded into M are checked per point.
struct Filter {
  std::int64_t M = 1;
  std::vector<std::int64_t> b_residues;
  std::vector<std::vector<std::int64_t>> a_residues;
  std::vector<std::uint8_t> ok2;  // 64 x 64, empty when folded
  std::vector<std::uint8_t> ok3;  // 729 x 729, empty when folded

  bool accepts(std::int64_t A, std::int64_t B) const {
    if (!ok2.empty() && !ok2[static_cast<std::size_t>(mod_pos(A, 64) * 64 + mod_pos(B, 64))]) return false;
    if (!ok3.empty() && !ok3[static_cast<std::size_t>(mod_pos(A, 729) * 729 + mod_pos(B, 729))]) return false;
    return true;
  }
};

std::int64_t crt(std::int64_t r2, std::int64_t r3) {
  // x = r2 mod 64, x = r3 mod 729; 64 * 262 = 16768 = 1 mod 729.
  const std::int64_t k = mod_pos((r3 - r2) * 262, 729);
  return r2 + 64 * k;
}

// Pairs (a, b) mod p^6 whose image (d^4 a, d^6 b) has the wanted status.
std::vector<std::uint8_t> local_mask(const LocalClassTable& t, LocalStatus want, std::int64_t d) {
  const std::int64_t m = t.modulus();
  const std::int64_t d2 = mod_pos(d * d, m);
  const std::int64_t d4 = d2 * d2 % m;
  const std::int64_t d6 = d4 * d2 % m;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(m * m));
  for (std::int64_t a = 0; a < m; ++a)
    for (std::int64_t b = 0; b < m; ++b)
      mask[static_cast<std::size_t>(a * m + b)] = t.status(d4 * a % m, d6 * b % m) == want;
  return mask;
}

Filter make_filter(Lambda l, std::int64_t d) {
  const auto& t = class_table();
  auto mask2 = local_mask(t.at2(), lambda_drops_2(l) ? LocalStatus::non_minimal : LocalStatus::minimal, d);
  auto mask3 = local_mask(t.at3(), lambda_drops_3(l) ? LocalStatus::non_minimal : LocalStatus::minimal, d);
  const auto pairs = [](const std::vector<std::uint8_t>& mask, std::int64_t m) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::int64_t a = 0; a < m; ++a)
      for (std::int64_t b = 0; b < m; ++b)
        if (mask[static_cast<std::size_t>(a * m + b)]) out.emplace_back(a, b);
    return out;
  };
  const auto p2 = pairs(mask2, 64);
  const auto p3 = pairs(mask3, 729);
  const bool fold2 = p2.size() <= 64;
  const bool fold3 = p3.size() <= 729;
  Filter f;
  f.M = (fold2 ? 64 : 1) * (fold3 ? 729 : 1);
  const std::vector<std::pair<std::int64_t, std::int64_t>> unit = {{0, 0}};
  const auto& l2 = fold2 ? p2 : unit;
  const auto& l3 = fold3 ? p3 : unit;
  std::vector<std::pair<std::int64_t, std::int64_t>> combined;  // (b, a) mod M
  for (const auto& [a2, b2] : l2)
    for (const auto& [a3, b3] : l3) {
      std::int64_t a = 0;
      std::int64_t b = 0;
      if (fold2 && fold3) {
        a = crt(a2, a3);
        b = crt(b2, b3);
      } else if (fold2) {
        a = a2;
        b = b2;
      } else if (fold3) {
        a = a3;
        b = b3;
      }
      combined.emplace_back(b, a);
    }
  std::sort(combined.begin(), combined.end());
  for (const auto& [b, a] : combined) {
    if (f.b_residues.empty() || f.b_residues.back() != b) {
      f.b_residues.push_back(b);
      f.a_residues.emplace_back();
    }
    f.a_residues.back().push_back(a);
  }
  if (!fold2) f.ok2 = std::move(mask2);
  if (!fold3) f.ok3 = std::move(mask3);
  return f;
}

Filter single_class_filter(std::int64_t A0, std::int64_t B0) {
  Filter f;
  f.M = 46656;
  f.b_residues = {mod_pos(B0, f.M)};
  f.a_residues = {{mod_pos(A0, f.M)}};
  return f;
}

// ---------------------------------------------------------------------------
// the scan

struct Tally {
  std::int64_t count = 0;
  std::int64_t near = 0;
  std::int64_t candidates = 0;
  std::int64_t max_abs_A = 0;
  std::vector<CensusPoint> points;
};

std::int64_t floor_div(std::int64_t a, std::int64_t m) {
  const std::int64_t q = a / m;
  return (a % m != 0 && a < 0) ? q - 1 : q;
}

// Visits every window candidate (A, B, D) accepted by the filter with
// D != 0; visit(A, B, D, tally) updates the tally. B-progressions are dealt
// round-robin to the threads and tallies are merged by integer addition.
template <class Visit>
Tally scan(const Window& w, const Filter& f, int threads, Visit visit) {
  threads = std::max(1, threads);
  std::vector<Tally> tallies(static_cast<std::size_t>(threads));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  const long double Kf = static_cast<long double>(w.K);

  auto work = [&](int tid) {
    try {
      Tally& t = tallies[static_cast<std::size_t>(tid)];
      std::int64_t job = 0;
      for (std::size_t i = 0; i < f.b_residues.size(); ++i) {
        const std::int64_t b = f.b_residues[i];
        // B = b + kM over -B_lim < B < B_lim.
        const std::int64_t k_lo = -floor_div(w.B_lim - 1 + b, f.M);
        const std::int64_t k_hi = floor_div(w.B_lim - 1 - b, f.M);
        for (std::int64_t k = k_lo; k <= k_hi; ++k, ++job) {
          if (job % threads != tid) continue;
          const std::int64_t B = b + k * f.M;
          const i128 T = i128(27) * B * B;
          const long double Tf = static_cast<long double>(T);
          const long double lo = std::cbrt((-Kf - Tf) / 4);
          const long double hi = std::cbrt((Kf - Tf) / 4);
          const std::int64_t A_lo = std::max(static_cast<std::int64_t>(std::floor(lo)) - 1, -w.A_lim + 1);
          const std::int64_t A_hi = std::min(static_cast<std::int64_t>(std::ceil(hi)) + 1, w.A_lim - 1);
          if (A_lo > A_hi) continue;
          for (const std::int64_t a : f.a_residues[i]) {
            for (std::int64_t A = A_lo + mod_pos(a - A_lo, f.M); A <= A_hi; A += f.M) {
              const i128 D = 4 * i128(A) * A * A + T;
              if (D == 0 || abs128(D) >= w.K) continue;
              if (!f.accepts(A, B)) continue;
              ++t.candidates;
              visit(A, B, D, t);
            }
          }
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(tid)] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Tally total;
  for (const auto& t : tallies) {
    total.count += t.count;
    total.near += t.near;
    total.candidates += t.candidates;
    total.max_abs_A = std::max(total.max_abs_A, t.max_abs_A);
    total.points.insert(total.points.end(), t.points.begin(), t.points.end());
  }
  return total;
}

constexpr long double kNearThreshold = 1e-12L;

template <class Real>
RealCurve<Real> exact_curve(std::int64_t A, std::int64_t B, i128 D) {
  return {Real(A), Real(B), detail::to_real<Real>(D)};
}

template <class Real>
Real log_bound(long double X, std::int64_t lambda_inv, std::int64_t d) {
  using std::log;
  return log(Real(X)) + log(Real(lambda_inv)) - 12 * log(Real(d));
}

std::string point_text(std::int64_t A, std::int64_t B) {
  std::ostringstream s;
  s << "(" << A << ", " << B << ")";
  return s.str();
}

long double cusp_window(long double X) {
  const long double xm = std::max(X, constants().M);
  const long double l = std::log(xm);
  return constants().N * std::cbrt(xm) * l * l;
}

template <class Real>
void enumerate_impl(long double X, const CensusOptions& opt, CensusReport& r) {
  for (const Lambda l : kAllLambdas) {
    const std::int64_t inv = lambda_inverse(l);
    const long double Xp = X * static_cast<long double>(inv);
    const Window base = make_window(Xp, 1);
    const Window w = make_window(Xp, opt.window_scale);
    const Filter f = make_filter(l, 1);
    const Real bound = log_bound<Real>(X, inv, 1);
    const Tally t = scan(w, f, opt.threads, [&](std::int64_t A, std::int64_t B, i128 D, Tally& tally) {
      if (!is_weakly_minimal(A, B)) return;
      using std::abs;
      const Real v = log_f_inverse_sq(exact_curve<Real>(A, B, D));
      if (abs(v - bound) < Real(kNearThreshold)) ++tally.near;
      if (!(v < bound)) return;
      if (!base.contains(A, B, D))
        throw IntegrityError("census window violation at " + point_text(A, B));
      const Lambda check = make_lambda(is_minimal_at_kraus(A, B, 2), is_minimal_at_kraus(A, B, 3));
      if (check != l)
        throw IntegrityError("residue class and c4/c6 criterion disagree at " + point_text(A, B));
      ++tally.count;
      tally.max_abs_A = std::max(tally.max_abs_A, abs64(A));
      if (opt.collect_points) {
        using std::log;
        const Real log_h = v - log(Real(inv));
        tally.points.push_back({A, B, l, static_cast<long double>(log_h)});
      }
    });
    const int i = static_cast<int>(l);
    r.counts_by_lambda[i] = t.count;
    r.near_threshold += t.near;
    r.candidates += t.candidates;
    r.max_abs_A[i] = t.max_abs_A;
    r.cusp_window[i] = cusp_window(Xp);
    r.points.insert(r.points.end(), t.points.begin(), t.points.end());
  }
  std::sort(r.points.begin(), r.points.end());
}

template <class Real>
void sieve_impl(long double X, const CensusOptions& opt, CensusReport& r) {
  for (const Lambda l : kAllLambdas) {
    const std::int64_t inv = lambda_inverse(l);
    const long double Xp = X * static_cast<long double>(inv);
    std::int64_t total = 0;
    // (a, b) in R_{X'/d^12} with Delta != 0 needs 16 <= 16|D| < C X' / d^12.
    const long double reach = constants().C * Xp / 16 * static_cast<long double>(opt.window_scale);
    for (std::int64_t d = 1; std::pow(static_cast<long double>(d), 12.0L) < reach; ++d) {
      const int mu = mobius(d);
      if (mu == 0 || d % 2 == 0 || d % 3 == 0) continue;
      const long double Xd = Xp / std::pow(static_cast<long double>(d), 12.0L);
      const Window base = make_window(Xd, 1);
      const Window w = make_window(Xd, opt.window_scale);
      const Filter f = make_filter(l, d);
      const Real bound = log_bound<Real>(X, inv, d);
      const Tally t = scan(w, f, opt.threads, [&](std::int64_t A, std::int64_t B, i128 D, Tally& tally) {
        using std::abs;
        const Real v = log_f_inverse_sq(exact_curve<Real>(A, B, D));
        if (abs(v - bound) < Real(kNearThreshold)) ++tally.near;
        if (!(v < bound)) return;
        if (!base.contains(A, B, D))
          throw IntegrityError("census window violation at " + point_text(A, B));
        ++tally.count;
      });
      r.sieve_terms.push_back({l, d, mu, t.count});
      r.near_threshold += t.near;
      r.candidates += t.candidates;
      total += mu * t.count;
    }
    r.sieve_by_lambda[static_cast<int>(l)] = total;
  }
}

template <class F>
void dispatch(int bits, F&& f) {
  switch (bits) {
    case 53:
      f(double{});
      break;
    case 64:
      f(static_cast<long double>(0));
      break;
    case 113:
      f(boost::multiprecision::float128{});
      break;
    default:
      throw ContractError("precision must be 53, 64 or 113 bits");
  }
}

void check_options(long double X, const CensusOptions& opt) {
  if (!(X > 0)) throw ContractError("X must be positive");
  if (opt.threads < 1) throw ContractError("threads must be at least 1");
  if (!(opt.window_scale >= 1)) throw ContractError("window_scale must be at least 1");
}

}  // namespace

CensusReport enumerate_SX(long double X, const CensusOptions& options) {
  check_options(X, options);
  CensusReport r;
  r.X = X;
  dispatch(options.precision_bits, [&](auto tag) { enumerate_impl<decltype(tag)>(X, options, r); });
  for (auto v : r.counts_by_lambda) r.total_direct += v;
  r.has_direct = true;
  r.prediction = asymptotic_prediction(X);
  return r;
}

CensusReport count_SX_sieve(long double X, const CensusOptions& options) {
  check_options(X, options);
  CensusReport r;
  r.X = X;
  dispatch(options.precision_bits, [&](auto tag) { sieve_impl<decltype(tag)>(X, options, r); });
  for (auto v : r.sieve_by_lambda) r.total_sieve += v;
  r.has_sieve = true;
  r.prediction = asymptotic_prediction(X);
  return r;
}

CensusReport run_census(long double X, const CensusOptions& options) {
  CensusReport r = enumerate_SX(X, options);
  const CensusReport s = count_SX_sieve(X, options);
  r.sieve_by_lambda = s.sieve_by_lambda;
  r.total_sieve = s.total_sieve;
  r.sieve_terms = s.sieve_terms;
  r.near_threshold += s.near_threshold;
  r.candidates += s.candidates;
  r.has_sieve = true;
  for (const Lambda l : kAllLambdas) {
    const int i = static_cast<int>(l);
    if (r.counts_by_lambda[i] != r.sieve_by_lambda[i]) {
      std::ostringstream msg;
      msg << "direct and sieve counts differ for lambda = " << lambda_label(l) << ": "
          << r.counts_by_lambda[i] << " vs " << r.sieve_by_lambda[i];
      throw IntegrityError(msg.str());
    }
  }
  if (r.total_direct != r.total_sieve) throw IntegrityError("direct and sieve totals differ");
  return r;
}

std::int64_t count_residue_class(std::int64_t A0, std::int64_t B0, long double X,
                                 const CensusOptions& options) {
  check_options(X, options);
  std::int64_t result = 0;
  dispatch(options.precision_bits, [&](auto tag) {
    using Real = decltype(tag);
    const Window w = make_window(X, options.window_scale);
    const Window base = make_window(X, 1);
    const Real bound = log_bound<Real>(X, 1, 1);
    const Tally t = scan(w, single_class_filter(A0, B0), options.threads,
                         [&](std::int64_t A, std::int64_t B, i128 D, Tally& tally) {
                           const Real v = log_f_inverse_sq(exact_curve<Real>(A, B, D));
                           if (!(v < bound)) return;
                           if (!base.contains(A, B, D))
                             throw IntegrityError("census window violation at " + point_text(A, B));
                           ++tally.count;
                         });
    result = t.count;
  });
  return result;
}

// ---------------------------------------------------------------------------
// constants and the naive count

long double zeta10() {
  // Summed from the small end up; the remainder past n = 2000 is
  // int_{2000.5}^inf x^{-10} dx to far below long double precision.
  constexpr int kTerms = 2000;
  long double s = std::pow(kTerms + 0.5L, -9.0L) / 9;
  for (int n = kTerms; n >= 1; --n) s += std::pow(static_cast<long double>(n), -10.0L);
  return s;
}

long double sigma_constant() {
  static const long double sigma = sigma_area<long double>(1e-9L).sigma;
  return sigma;
}

long double asymptotic_prediction(long double X, long double sigma) {
  if (!(X > 0)) throw ContractError("X must be positive");
  return 12 * sigma / zeta10() * std::pow(X, 5.0L / 6);
}

long double asymptotic_prediction(long double X) { return asymptotic_prediction(X, sigma_constant()); }

int mobius(std::int64_t n) {
  if (n < 1) throw ContractError("mobius needs n >= 1");
  int mu = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

long double mobius_partial_sum(std::int64_t Y) {
  if (Y < 1) throw ContractError("Y must be at least 1");
  // Linear sieve for mu below Y.
  std::vector<std::int8_t> mu(static_cast<std::size_t>(Y), 1);
  std::vector<std::uint8_t> composite(static_cast<std::size_t>(Y), 0);
  std::vector<std::int64_t> primes;
  for (std::int64_t i = 2; i < Y; ++i) {
    if (!composite[static_cast<std::size_t>(i)]) {
      primes.push_back(i);
      mu[static_cast<std::size_t>(i)] = -1;
    }
    for (const std::int64_t p : primes) {
      if (i * p >= Y) break;
      composite[static_cast<std::size_t>(i * p)] = 1;
      if (i % p == 0) {
        mu[static_cast<std::size_t>(i * p)] = 0;
        break;
      }
      mu[static_cast<std::size_t>(i * p)] = static_cast<std::int8_t>(-mu[static_cast<std::size_t>(i)]);
    }
  }
  // Largest d first so the small terms are not lost.
  long double s = 0;
  for (std::int64_t d = Y - 1; d >= 1; --d) {
    if (d % 2 == 0 || d % 3 == 0 || mu[static_cast<std::size_t>(d)] == 0) continue;
    s += mu[static_cast<std::size_t>(d)] * std::pow(static_cast<long double>(d), -10.0L);
  }
  return s;
}

long double mobius_limit() {
  return 1 / (zeta10() * (1 - std::pow(2.0L, -10.0L)) * (1 - std::pow(3.0L, -10.0L)));
}

NaiveCount count_naive(long double X) {
  if (!(X >= 1)) throw ContractError("count_naive needs X >= 1");
  NaiveCount r;
  const std::int64_t a_max = static_cast<std::int64_t>(std::cbrt(X)) + 1;
  const std::int64_t b_max = static_cast<std::int64_t>(std::sqrt(X)) + 1;
  for (std::int64_t A = -a_max; A <= a_max; ++A) {
    const long double a3 = static_cast<long double>(abs64(A)) * abs64(A) * abs64(A);
    if (!(a3 < X)) continue;
    for (std::int64_t B = -b_max; B <= b_max; ++B) {
      const long double b2 = static_cast<long double>(B) * B;
      if (!(b2 < X)) continue;
      if (IntegralCurve{A, B}.is_singular() || !is_weakly_minimal(A, B)) continue;
      ++r.count;
    }
  }
  r.prediction = 4 / zeta10() * std::pow(X, 5.0L / 6);
  return r;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

long double lambda_share(Lambda l) {
  // Predicted S_{X, lambda} / X^{5/6}: |Cl_lambda| 6^{-12} sigma lambda^{-5/6}
  // times the Mobius limit over primes p >= 5.
  const long double size = static_cast<long double>(class_table().class_size(l));
  const long double inv = static_cast<long double>(lambda_inverse(l));
  return size / std::pow(6.0L, 12.0L) * sigma_constant() * std::pow(inv, 5.0L / 6) * mobius_limit();
}

}  // namespace

void write_census_json(std::ostream& out, const CensusReport& r) {
  nlohmann::ordered_json j;
  j["X"] = static_cast<double>(r.X);
  nlohmann::ordered_json by;
  nlohmann::ordered_json sieve_by;
  for (const Lambda l : kAllLambdas) {
    by[lambda_label(l)] = r.counts_by_lambda[static_cast<int>(l)];
    sieve_by[lambda_label(l)] = r.sieve_by_lambda[static_cast<int>(l)];
  }
  if (r.has_direct) {
    j["counts_by_lambda"] = by;
    j["total_direct"] = r.total_direct;
  }
  if (r.has_sieve) {
    j["sieve_by_lambda"] = sieve_by;
    j["total_sieve"] = r.total_sieve;
  }
  j["prediction"] = static_cast<double>(r.prediction);
  const std::int64_t total = r.has_direct ? r.total_direct : r.total_sieve;
  j["ratio"] = static_cast<double>(static_cast<long double>(total) / r.prediction);
  j["naive_count"] = r.naive_count ? nlohmann::ordered_json(*r.naive_count) : nlohmann::ordered_json();
  j["naive_prediction"] =
      r.naive_prediction ? nlohmann::ordered_json(static_cast<double>(*r.naive_prediction)) : nlohmann::ordered_json();
  j["near_threshold"] = r.near_threshold;
  j["candidates"] = r.candidates;
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& t : r.sieve_terms)
    terms.push_back({{"lambda", lambda_label(t.lambda)}, {"d", t.d}, {"mu", t.mu}, {"points", t.points}});
  if (r.has_sieve) j["sieve_terms"] = terms;
  out << j.dump(2) << '\n';
}

void write_census_csv(std::ostream& out, const CensusReport& r) {
  out << std::setprecision(17);
  out << "lambda,count_direct,count_sieve,prediction\n";
  for (const Lambda l : kAllLambdas) {
    const int i = static_cast<int>(l);
    out << lambda_label(l) << ',';
    if (r.has_direct) out << r.counts_by_lambda[i];
    out << ',';
    if (r.has_sieve) out << r.sieve_by_lambda[i];
    out << ',' << static_cast<double>(lambda_share(l) * std::pow(r.X, 5.0L / 6)) << '\n';
  }
}

}  // namespace faltings
