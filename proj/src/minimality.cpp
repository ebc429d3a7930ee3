#include "faltings/minimality.hpp"

#include <limits>
#include <random>
#include <sstream>

namespace faltings {

namespace {

using i128 = __int128;

i128 ipow(i128 base, int e) {
  i128 r = 1;
  while (e-- > 0) r *= base;
  return r;
}

bool divides(i128 d, i128 v) { return v % d == 0; }

template <class Int>
Int mod_pos(const Int& v, const Int& m) {
  Int r = v % m;
  if (r < 0) r += m;
  return r;
}

template <class Int>
int valuation(Int v, int p, int cap) {
  if (v == 0) return cap;
  int k = 0;
  while (k < cap && v % p == 0) {
    v /= p;
    ++k;
  }
  return k;
}

// Kraus's local condition at p for invariants (c4, c6) already known to be
// p-integral with v_p(Delta) >= 0.
template <class Int>
bool kraus_local(const Int& c4, const Int& c6, int p) {
  if (p == 3) return valuation(c6, 3, 3) != 2;
  const Int c6_mod4 = mod_pos(c6, Int(4));
  if (c6_mod4 == 3) return true;
  const Int c6_mod32 = mod_pos(c6, Int(32));
  return valuation(c4, 2, 4) >= 4 && (c6_mod32 == 0 || c6_mod32 == 8);
}

template <class Int>
bool kraus_non_minimal(const Int& A, const Int& B, int p) {
  const Int c4 = -48 * A;
  const Int c6 = -864 * B;
  const Int disc = -16 * (4 * A * A * A + 27 * B * B);
  if (disc == 0) throw SingularCurveError("4A^3 + 27B^2 = 0");
  Int p4 = 1;
  for (int i = 0; i < 4; ++i) p4 *= p;
  const Int p6 = p4 * p * p;
  const Int p12 = p6 * p6;
  if (c4 % p4 != 0 || c6 % p6 != 0 || disc % p12 != 0) return false;
  return kraus_local(Int(c4 / p4), Int(c6 / p6), p);
}

std::int64_t checked_abs(std::int64_t v) {
  if (v == std::numeric_limits<std::int64_t>::min())
    throw ContractError("coefficient magnitude exceeds 2^63 - 1");
  return v < 0 ? -v : v;
}

// Candidate divisors for weak minimality: 2, 3, then 6k +- 1. Composites are
// harmless since a composite witness implies a prime one.
template <class F>
void for_each_candidate(std::int64_t A, std::int64_t B, F&& f) {
  const i128 a = checked_abs(A);
  const i128 b = checked_abs(B);
  auto in_range = [&](i128 q) {
    const i128 q2 = q * q;
    if (a != 0 && q2 * q2 > a) return false;
    if (b != 0 && q2 * q2 * q2 > b) return false;
    return true;
  };
  if (!in_range(2)) return;
  if (!f(2)) return;
  if (!in_range(3)) return;
  if (!f(3)) return;
  for (std::int64_t k = 6;; k += 6) {
    if (!in_range(k - 1)) return;
    if (!f(k - 1)) return;
    if (!in_range(k + 1)) return;
    if (!f(k + 1)) return;
  }
}

}  // namespace

std::optional<WeierstrassModel> transform(const WeierstrassModel& m, const ModelChange& c) {
  const i128 u = c.u;
  const i128 r = c.r;
  const i128 s = c.s;
  const i128 t = c.t;
  const i128 u2 = u * u;
  const i128 u3 = u2 * u;
  const i128 u4 = u2 * u2;
  const i128 u6 = u3 * u3;
  WeierstrassModel out;
  const i128 n1 = m.a1 + 2 * s;
  if (!divides(u, n1)) return std::nullopt;
  const i128 n2 = m.a2 - s * m.a1 + 3 * r - s * s;
  if (!divides(u2, n2)) return std::nullopt;
  const i128 n3 = m.a3 + r * m.a1 + 2 * t;
  if (!divides(u3, n3)) return std::nullopt;
  const i128 n4 = m.a4 - s * m.a3 + 2 * r * m.a2 - (t + r * s) * m.a1 + 3 * r * r - 2 * s * t;
  if (!divides(u4, n4)) return std::nullopt;
  const i128 n6 = m.a6 + r * m.a4 + r * r * m.a2 + r * r * r - t * m.a3 - t * t - r * t * m.a1;
  if (!divides(u6, n6)) return std::nullopt;
  out.a1 = n1 / u;
  out.a2 = n2 / u2;
  out.a3 = n3 / u3;
  out.a4 = n4 / u4;
  out.a6 = n6 / u6;
  return out;
}

std::optional<ModelChange> find_p_reduction(std::int64_t A, std::int64_t B, std::int64_t p) {
  if (p != 2 && p != 3) throw ContractError("find_p_reduction supports p = 2, 3");
  const std::int64_t m = static_cast<std::int64_t>(ipow(p, 6));
  const WeierstrassModel model{0, 0, 0, mod_pos<i128>(A, m), mod_pos<i128>(B, m)};
  for (std::int64_t s = 0; s < p; ++s)
    for (std::int64_t r = 0; r < p * p; ++r)
      for (std::int64_t t = 0; t < p * p * p; ++t) {
        const ModelChange c{p, r, s, t};
        if (transform(model, c)) return c;
      }
  return std::nullopt;
}

bool is_weakly_minimal_at(std::int64_t A, std::int64_t B, std::int64_t p) {
  if (p < 2) throw ContractError("p must be at least 2");
  if (A == 0 && B == 0) return false;
  // p^4 | A and p^6 | B need p^4 <= |A| or p^6 <= |B|; larger p never divide.
  if (p > (std::int64_t(1) << 16)) return true;
  const i128 p2 = i128(p) * p;
  return !(divides(p2 * p2, A) && divides(p2 * p2 * p2, B));
}

bool is_minimal_at(std::int64_t A, std::int64_t B, std::int64_t p) {
  if (p == 2 || p == 3) return !find_p_reduction(A, B, p).has_value();
  return is_weakly_minimal_at(A, B, p);
}

bool is_minimal_at_kraus(std::int64_t A, std::int64_t B, std::int64_t p) {
  if (p != 2 && p != 3) throw ContractError("the c4/c6 criterion is used at p = 2, 3");
  if (fits_int128_invariant(A, B) && checked_abs(A) < (std::int64_t(1) << 36) &&
      checked_abs(B) < (std::int64_t(1) << 50))
    return !kraus_non_minimal<i128>(A, B, static_cast<int>(p));
  return !kraus_non_minimal<BigInt>(BigInt(A), BigInt(B), static_cast<int>(p));
}

bool is_weakly_minimal(std::int64_t A, std::int64_t B) {
  if (A == 0 && B == 0) return false;
  bool ok = true;
  for_each_candidate(A, B, [&](std::int64_t q) {
    if (!is_weakly_minimal_at(A, B, q)) ok = false;
    return ok;
  });
  return ok;
}

ScaledCurve weakly_minimal_representative(std::int64_t A, std::int64_t B) {
  if (A == 0 && B == 0) throw ContractError("(0, 0) has no weakly minimal representative");
  ScaledCurve out{A, B, 1};
  bool changed = true;
  while (changed) {
    changed = false;
    for_each_candidate(out.A, out.B, [&](std::int64_t q) {
      const i128 q4 = i128(q) * q * q * q;
      const i128 q6 = q4 * q * q;
      if (out.A % q4 == 0 && out.B % q6 == 0) {
        out.A = static_cast<std::int64_t>(out.A / q4);
        out.B = static_cast<std::int64_t>(out.B / q6);
        out.d *= q;
        changed = true;
        return false;  // bounds shrink; restart the scan
      }
      return true;
    });
  }
  return out;
}

std::int64_t lambda_inverse(Lambda l) {
  constexpr std::int64_t two12 = 4096;
  constexpr std::int64_t three12 = 531441;
  switch (l) {
    case Lambda::one:
      return 1;
    case Lambda::inv2:
      return two12;
    case Lambda::inv3:
      return three12;
    case Lambda::inv6:
      return two12 * three12;
  }
  return 1;
}

BigRational lambda_value(Lambda l) { return BigRational(1) / BigRational(lambda_inverse(l)); }

std::string lambda_label(Lambda l) {
  switch (l) {
    case Lambda::one:
      return "1";
    case Lambda::inv2:
      return "2^-12";
    case Lambda::inv3:
      return "3^-12";
    case Lambda::inv6:
      return "6^-12";
  }
  return "?";
}

MinimalityClass lambda_class(std::int64_t A, std::int64_t B) {
  if (IntegralCurve{A, B}.is_singular()) throw SingularCurveError("4A^3 + 27B^2 = 0");
  if (!is_weakly_minimal(A, B)) throw ContractError("(A, B) is not weakly minimal");
  MinimalityClass c;
  c.minimal_at_2 = is_minimal_at(A, B, 2);
  c.minimal_at_3 = is_minimal_at(A, B, 3);
  c.lambda = make_lambda(c.minimal_at_2, c.minimal_at_3);
  return c;
}

BigInt minimal_discriminant(std::int64_t A, std::int64_t B) {
  const MinimalityClass c = lambda_class(A, B);
  return abs(IntegralCurve{A, B}.discriminant()) / lambda_inverse(c.lambda);
}

BigInt naive_height(std::int64_t A, std::int64_t B) {
  const BigInt a = abs(BigInt(A));
  const BigInt b = BigInt(B);
  const BigInt a3 = a * a * a;
  const BigInt b2 = b * b;
  return a3 > b2 ? a3 : b2;
}

LocalClassTable::LocalClassTable(std::int64_t p) : p_(p), m_(static_cast<std::int64_t>(ipow(p, 6))) {
  if (p != 2 && p != 3) throw ContractError("class tables exist for p = 2, 3");
  const std::int64_t p4 = p * p * p * p;
  status_.resize(static_cast<std::size_t>(m_ * m_));
  for (std::int64_t a = 0; a < m_; ++a)
    for (std::int64_t b = 0; b < m_; ++b) {
      LocalStatus s;
      if (a % p4 == 0 && b == 0)
        s = LocalStatus::not_weakly_minimal;
      else
        s = find_p_reduction(a, b, p) ? LocalStatus::non_minimal : LocalStatus::minimal;
      status_[static_cast<std::size_t>(a * m_ + b)] = s;
      ++counts_[static_cast<int>(s)];
    }
}

ResidueClassTable::ResidueClassTable() : t2_(2), t3_(3) {}

std::optional<Lambda> ResidueClassTable::classify(std::int64_t A, std::int64_t B) const {
  const LocalStatus s2 = t2_.status(A, B);
  const LocalStatus s3 = t3_.status(A, B);
  if (s2 == LocalStatus::not_weakly_minimal || s3 == LocalStatus::not_weakly_minimal)
    return std::nullopt;
  return make_lambda(s2 == LocalStatus::minimal, s3 == LocalStatus::minimal);
}

std::int64_t ResidueClassTable::class_size(Lambda l) const {
  const LocalStatus s2 = lambda_drops_2(l) ? LocalStatus::non_minimal : LocalStatus::minimal;
  const LocalStatus s3 = lambda_drops_3(l) ? LocalStatus::non_minimal : LocalStatus::minimal;
  return t2_.count(s2) * t3_.count(s3);
}

std::int64_t ResidueClassTable::not_weakly_minimal_count() const {
  const std::int64_t total = t2_.modulus() * t2_.modulus() * t3_.modulus() * t3_.modulus();
  std::int64_t weak = 0;
  for (Lambda l : kAllLambdas) weak += class_size(l);
  return total - weak;
}

ResidueClassCensus residue_class_census(int lifts, std::uint64_t seed) {
  if (lifts < 1) throw ContractError("at least one lift per class is required");
  const ResidueClassTable table;
  ResidueClassCensus out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> k(-1000000, 1000000);
  for (const LocalClassTable* t : {&table.at2(), &table.at3()}) {
    const std::int64_t p = t->prime();
    const std::int64_t m = t->modulus();
    for (std::int64_t a = 0; a < m; ++a)
      for (std::int64_t b = 0; b < m; ++b) {
        const LocalStatus expected = t->status(a, b);
        for (int i = 0; i < lifts;) {
          const std::int64_t A = a + m * k(rng);
          const std::int64_t B = b + m * k(rng);
          if (IntegralCurve{A, B}.is_singular()) continue;
          LocalStatus got;
          if (!is_weakly_minimal_at(A, B, p))
            got = LocalStatus::not_weakly_minimal;
          else
            got = is_minimal_at_kraus(A, B, p) ? LocalStatus::minimal : LocalStatus::non_minimal;
          ++out.lifts_checked;
          if (got != expected) {
            ++out.instabilities;
            std::ostringstream msg;
            msg << "residue class (" << a << ", " << b << ") mod " << p << "^6 is unstable: lift ("
                << A << ", " << B << ") disagrees with the canonical representative";
            throw IntegrityError(msg.str());
          }
          ++i;
        }
      }
  }
  for (Lambda l : kAllLambdas) out.class_sizes[static_cast<int>(l)] = table.class_size(l);
  out.not_weakly_minimal = table.not_weakly_minimal_count();
  return out;
}

}  // namespace faltings
