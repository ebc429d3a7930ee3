#pragma once

// Globally adaptive 15-point Gauss-Kronrod quadrature. The interval with the
// largest error estimate is bisected until the summed estimate meets the
// tolerance; the final sum runs over intervals in left-to-right order so the
// result does not depend on the refinement history.

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "faltings/errors.hpp"

namespace faltings {

template <class Real>
struct QuadratureResult {
  Real value{};
  Real error{};
  int evaluations = 0;
  int intervals = 0;
};

namespace detail {

// Kronrod nodes on [0, 1] (the odd-indexed ones are the 7-point Gauss nodes).
inline constexpr long double kXgk[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr long double kWgk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr long double kWg[4] = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <class Real>
struct Panel {
  Real a;
  Real b;
  Real value;
  Real error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class Real, class F>
Panel<Real> gk15(F& f, Real a, Real b) {
  using std::abs;
  const Real center = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = f(center);
  Real kronrod = fc * Real(kWgk[7]);
  Real gauss = fc * Real(kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * Real(kXgk[j]);
    const Real fsum = f(center - dx) + f(center + dx);
    kronrod += Real(kWgk[j]) * fsum;
    if (j % 2 == 1) gauss += Real(kWg[j / 2]) * fsum;
  }
  return {a, b, kronrod * half, abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrate f over [a, b] to max(abs_tol, rel_tol |I|). Throws NumericError
/// when the panel cap is reached first.
template <class Real, class F>
QuadratureResult<Real> integrate_adaptive(F f, Real a, Real b, Real rel_tol, Real abs_tol = 0,
                                          int max_panels = 20000) {
  using std::abs;
  std::priority_queue<detail::Panel<Real>> heap;
  std::vector<detail::Panel<Real>> done;
  auto first = detail::gk15<Real>(f, a, b);
  Real total = first.value;
  Real err = first.error;
  heap.push(first);
  int evaluations = 15;
  while (err > std::max(abs_tol, rel_tol * abs(total))) {
    if (static_cast<int>(heap.size() + done.size()) >= max_panels)
      throw NumericError("adaptive quadrature: panel cap reached with error " +
                         std::to_string(static_cast<double>(err)));
    const auto worst = heap.top();
    heap.pop();
    const Real mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot split further at this precision; keep the panel as is.
      done.push_back(worst);
      if (heap.empty()) break;
      continue;
    }
    const auto left = detail::gk15<Real>(f, worst.a, mid);
    const auto right = detail::gk15<Real>(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  QuadratureResult<Real> r;
  for (const auto& p : done) {
    r.value += p.value;
    r.error += p.error;
  }
  r.evaluations = evaluations;
  r.intervals = static_cast<int>(done.size());
  return r;
}

}  // namespace faltings
