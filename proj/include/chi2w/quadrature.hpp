#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "chi2w/error.hpp"

namespace chi2w::quad {

namespace detail {
inline std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}
}  // namespace detail

// 15-point Kronrod nodes on [-1, 1] (non-negative half); odd indices are the
// 7-point Gauss nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

/// QUADPACK-style error estimate from the Kronrod/Gauss difference and the
/// integral of |f - mean| over the panel.
inline double kronrod_error(double diff, double resasc) {
  if (resasc == 0.0) return diff;
  return resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
}

/// One panel of a 15-node rule laid out for precomputation: node positions
/// and the Kronrod/Gauss weights already scaled by the half-width.
struct PanelRule {
  std::array<double, 15> x{};
  std::array<double, 15> wk{};
  std::array<double, 15> wg{};  // zero at Kronrod-only nodes
};

inline PanelRule panel_rule(double a, double b) {
  PanelRule r;
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (int j = 0; j < 7; ++j) {
    r.x[2 * j] = c - h * kKronrodNodes[j];
    r.x[2 * j + 1] = c + h * kKronrodNodes[j];
    r.wk[2 * j] = r.wk[2 * j + 1] = h * kKronrodWeights[j];
    const double g = (j % 2 == 1) ? h * kGaussWeights[j / 2] : 0.0;
    r.wg[2 * j] = r.wg[2 * j + 1] = g;
  }
  r.x[14] = c;
  r.wk[14] = h * kKronrodWeights[7];
  r.wg[14] = h * kGaussWeights[3];
  return r;
}

template <class T>
struct PanelResult {
  double a = 0.0;
  double b = 0.0;
  T value{};
  double error = 0.0;

  bool operator<(const PanelResult& o) const { return error < o.error; }
};

template <class F>
auto gauss_kronrod15(F&& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const PanelRule rule = panel_rule(a, b);
  std::array<T, 15> fv;
  T k{}, g{};
  for (std::size_t i = 0; i < 15; ++i) {
    fv[i] = f(rule.x[i]);
    k += rule.wk[i] * fv[i];
    g += rule.wg[i] * fv[i];
  }
  const T mean = k / (b - a);
  double resasc = 0.0;
  for (std::size_t i = 0; i < 15; ++i) resasc += rule.wk[i] * magnitude(fv[i] - mean);
  PanelResult<T> r;
  r.a = a;
  r.b = b;
  r.value = k;
  r.error = kronrod_error(magnitude(k - g), resasc);
  return r;
}

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  std::size_t panels = 0;
};

/// Globally adaptive G7/K15 integration: the panel with the largest error
/// estimate is bisected until the summed estimate drops below `abs_tol`.
/// Throws NonConvergedQuadrature once `max_panels` is exceeded.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, std::size_t max_panels = 4000,
               std::size_t initial_panels = 1) {
  using T = std::decay_t<decltype(f(a))>;
  std::priority_queue<PanelResult<T>> heap;
  T total{};
  double err = 0.0;
  initial_panels = std::max<std::size_t>(initial_panels, 1);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(initial_panels);
    const double hi = a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(initial_panels);
    auto p = gauss_kronrod15(f, lo, hi);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  std::size_t count = initial_panels;
  while (!(err <= abs_tol)) {
    if (!std::isfinite(err)) {
      throw Error(ErrorCode::NonConvergedQuadrature, "non-finite integrand or error estimate");
    }
    if (count >= max_panels) {
      throw Error(ErrorCode::NonConvergedQuadrature,
                  "adaptive quadrature exceeded " + std::to_string(max_panels) +
                      " panels (error estimate " + detail::short_real(err) + ")");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = gauss_kronrod15(f, worst.a, mid);
    auto right = gauss_kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return Result<T>{sum, esum, count};
}

}  // namespace chi2w::quad
