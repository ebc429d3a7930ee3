#pragma once

// Counting S_X, the weakly minimal (A, B) with 4A^3 + 27B^2 != 0 and
// H_F(E_{A,B}) < X, in two independent ways:
//
//   direct  enumerate every candidate, test weak minimality exactly, find
//           lambda and keep (A, B) when it lies in R_{X / lambda};
//   sieve   for each lambda and squarefree d prime to 6, count all lattice
//           points of R_{X / (lambda d^12)} whose image (d^4 a, d^6 b) falls
//           in Cl_lambda, and combine with mu(d).
//
// Both scan the same kind of window: |4A^3 + 27B^2| < C X' / 16 and
// |A| < cusp_cutoff(X'), where X' is the scaled height bound of the pass.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "faltings/minimality.hpp"

namespace faltings {

struct CensusOptions {
  int threads = 1;
  /// Working precision of the region test: 53, 64 or 113 bits.
  int precision_bits = 64;
  /// Windows are multiplied by this factor; any point of the region found
  /// outside the unscaled window is an integrity error.
  double window_scale = 1;
  /// Keep the points found by the direct path.
  bool collect_points = false;
};

struct CensusPoint {
  std::int64_t A = 0;
  std::int64_t B = 0;
  Lambda lambda = Lambda::one;
  long double log_height = 0;  ///< log H_F

  friend bool operator<(const CensusPoint& x, const CensusPoint& y) {
    return x.A != y.A ? x.A < y.A : x.B < y.B;
  }
};

/// One (lambda, d) scan of the sieve.
struct SieveTerm {
  Lambda lambda = Lambda::one;
  std::int64_t d = 1;
  int mu = 1;
  std::int64_t points = 0;
};

struct CensusReport {
  long double X = 0;
  std::array<std::int64_t, 4> counts_by_lambda{};  ///< direct path, indexed by Lambda
  std::array<std::int64_t, 4> sieve_by_lambda{};
  std::int64_t total_direct = 0;
  std::int64_t total_sieve = 0;
  long double prediction = 0;  ///< 12 sigma zeta(10)^{-1} X^{5/6}
  std::optional<std::int64_t> naive_count;
  std::optional<long double> naive_prediction;
  std::vector<SieveTerm> sieve_terms;
  /// Region tests with |log f^{-2} - log X'| below 1e-12.
  std::int64_t near_threshold = 0;
  std::int64_t candidates = 0;
  /// Largest |A| among counted points, per lambda, against the window
  /// N X_M'^{1/3} log(X_M')^2 of that pass.
  std::array<std::int64_t, 4> max_abs_A{};
  std::array<long double, 4> cusp_window{};
  std::vector<CensusPoint> points;  ///< sorted by (A, B) when collected
  bool has_direct = false;
  bool has_sieve = false;
};

CensusReport enumerate_SX(long double X, const CensusOptions& options = {});
CensusReport count_SX_sieve(long double X, const CensusOptions& options = {});

/// Both paths; an integrity error if the totals or any per-lambda count
/// differ.
CensusReport run_census(long double X, const CensusOptions& options = {});

/// Lattice points of R_X (Delta != 0) congruent to (A0, B0) mod 6^6, with no
/// minimality condition.
std::int64_t count_residue_class(std::int64_t A0, std::int64_t B0, long double X,
                                 const CensusOptions& options = {});

/// sum n^{-10}, summed to the working-precision tail bound.
long double zeta10();

/// sigma at relative tolerance 1e-9, computed once.
long double sigma_constant();

/// 12 sigma zeta(10)^{-1} X^{5/6}.
long double asymptotic_prediction(long double X);
long double asymptotic_prediction(long double X, long double sigma);

/// sum_{d < Y, gcd(d, 6) = 1} mu(d) d^{-10}.
long double mobius_partial_sum(std::int64_t Y);

/// 1 / (zeta(10) (1 - 2^{-10}) (1 - 3^{-10})).
long double mobius_limit();

/// mu(n), by trial division.
int mobius(std::int64_t n);

struct NaiveCount {
  std::int64_t count = 0;
  long double prediction = 0;  ///< 4 zeta(10)^{-1} X^{5/6}
};

/// Weakly minimal (A, B) with Delta != 0 and max(B^2, |A|^3) < X.
NaiveCount count_naive(long double X);

/// Fields as in CensusReport; lambdas keyed by label.
void write_census_json(std::ostream& out, const CensusReport& r);
/// One row per lambda: lambda, count_direct, count_sieve, prediction, where
/// prediction is the lambda share of the total under the class sizes.
void write_census_csv(std::ostream& out, const CensusReport& r);

}  // namespace faltings
