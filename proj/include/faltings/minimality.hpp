#pragma once

// Weak minimality, the local minimality bits at 2 and 3, the minimal
// discriminant, and the residue-class table of (A, B) mod 6^6.
//
// All arithmetic here is exact.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faltings/periods.hpp"

namespace faltings {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct WeierstrassModel {
  __int128 a1 = 0;
  __int128 a2 = 0;
  __int128 a3 = 0;
  __int128 a4 = 0;
  __int128 a6 = 0;
};

/// The change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
struct ModelChange {
  std::int64_t u = 1;
  std::int64_t r = 0;
  std::int64_t s = 0;
  std::int64_t t = 0;
};

/// Apply a change with u = p; returns nothing when the image is not integral.
std::optional<WeierstrassModel> transform(const WeierstrassModel& m, const ModelChange& c);

/// A change [p, r, s, t] taking y^2 = x^3 + Ax + B to an integral model, if
/// one exists. Only A, B mod p^6 matter, and r mod p^2, s mod p, t mod p^3
/// exhaust the possibilities.
std::optional<ModelChange> find_p_reduction(std::int64_t A, std::int64_t B, std::int64_t p);

/// Minimality of the short model at p (p = 2 or 3 via the search above, any
/// other prime via weak minimality).
bool is_minimal_at(std::int64_t A, std::int64_t B, std::int64_t p);

/// The same bit at p in {2, 3} from the c4/c6 invariants alone: the model is
/// non-minimal at p iff c4/p^4, c6/p^6 are p-integral, p^12 | Delta, and the
/// scaled pair meets Kraus's local condition at p.
bool is_minimal_at_kraus(std::int64_t A, std::int64_t B, std::int64_t p);

bool is_weakly_minimal_at(std::int64_t A, std::int64_t B, std::int64_t p);

/// No prime p has p^4 | A and p^6 | B. (0, 0) is not weakly minimal.
bool is_weakly_minimal(std::int64_t A, std::int64_t B);

struct ScaledCurve {
  std::int64_t A;
  std::int64_t B;
  std::int64_t d;  ///< input = (d^4 A, d^6 B)
};

/// Divide out every d^4 | A, d^6 | B. Contract error on (0, 0).
ScaledCurve weakly_minimal_representative(std::int64_t A, std::int64_t B);

enum class Lambda : int { one = 0, inv2 = 1, inv3 = 2, inv6 = 3 };

inline constexpr std::array<Lambda, 4> kAllLambdas = {Lambda::one, Lambda::inv2, Lambda::inv3,
                                                       Lambda::inv6};

inline Lambda make_lambda(bool minimal_at_2, bool minimal_at_3) {
  return static_cast<Lambda>((minimal_at_2 ? 0 : 1) + (minimal_at_3 ? 0 : 2));
}
inline bool lambda_drops_2(Lambda l) { return static_cast<int>(l) & 1; }
inline bool lambda_drops_3(Lambda l) { return static_cast<int>(l) & 2; }
/// 1 / lambda, an integer: 1, 2^12, 3^12 or 6^12.
std::int64_t lambda_inverse(Lambda l);
BigRational lambda_value(Lambda l);
/// "1", "2^-12", "3^-12", "6^-12".
std::string lambda_label(Lambda l);

struct MinimalityClass {
  Lambda lambda = Lambda::one;
  bool minimal_at_2 = true;
  bool minimal_at_3 = true;
};

/// Contract error when (A, B) is not weakly minimal, singular error when
/// 4A^3 + 27B^2 = 0.
MinimalityClass lambda_class(std::int64_t A, std::int64_t B);

/// lambda |Delta_{A,B}|.
BigInt minimal_discriminant(std::int64_t A, std::int64_t B);

/// max(B^2, |A|^3).
BigInt naive_height(std::int64_t A, std::int64_t B);

/// Local status of a residue pair mod p^6.
enum class LocalStatus : std::uint8_t { minimal = 0, non_minimal = 1, not_weakly_minimal = 2 };

/// Status of every pair (a, b) mod p^6 for one prime.
class LocalClassTable {
 public:
  explicit LocalClassTable(std::int64_t p);

  std::int64_t prime() const { return p_; }
  std::int64_t modulus() const { return m_; }
  LocalStatus status(std::int64_t A, std::int64_t B) const {
    return status_[static_cast<std::size_t>(reduce(A) * m_ + reduce(B))];
  }
  std::int64_t count(LocalStatus s) const { return counts_[static_cast<int>(s)]; }

 private:
  std::int64_t reduce(std::int64_t v) const {
    const std::int64_t r = v % m_;
    return r < 0 ? r + m_ : r;
  }
  std::int64_t p_;
  std::int64_t m_;
  std::vector<LocalStatus> status_;
  std::array<std::int64_t, 3> counts_{};
};

/// Both local tables; the class of (A, B) mod 6^6 is the pair of statuses.
class ResidueClassTable {
 public:
  ResidueClassTable();

  const LocalClassTable& at2() const { return t2_; }
  const LocalClassTable& at3() const { return t3_; }

  /// Class of (A, B) mod 6^6; nothing if not weakly minimal at 2 or 3.
  std::optional<Lambda> classify(std::int64_t A, std::int64_t B) const;

  /// Number of pairs mod 6^6 in Cl_lambda.
  std::int64_t class_size(Lambda l) const;
  /// Pairs mod 6^6 that are not weakly minimal at 2 or at 3.
  std::int64_t not_weakly_minimal_count() const;

 private:
  LocalClassTable t2_;
  LocalClassTable t3_;
};

struct ResidueClassCensus {
  std::array<std::int64_t, 4> class_sizes{};  ///< indexed by Lambda
  std::int64_t not_weakly_minimal = 0;
  std::int64_t lifts_checked = 0;
  std::int64_t instabilities = 0;
};

/// Builds the table and checks every class at 2 and 3 on `lifts` random lifts
/// with the independent c4/c6 criterion. An unstable class raises an
/// integrity error naming the witness.
ResidueClassCensus residue_class_census(int lifts = 3, std::uint64_t seed = 20240601);

}  // namespace faltings
