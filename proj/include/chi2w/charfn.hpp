#pragma once

#include <complex>

#include "chi2w/spectrum.hpp"

namespace chi2w {

using Complex = std::complex<double>;

/// Principal log of E exp(i t W) for complex t in the closed lower sector
/// arg t in (-pi/2, 0]; each factor 1 - 2 i lambda t stays off the negative
/// real axis there, so the per-factor principal branch is continuous.
Complex log_cf(const Spectrum& s, Complex t);

/// E exp(i t W) = prod (1 - 2 i l t)^{-1/2} exp(i l a^2 t / (1 - 2 i l t)) * exp(i offset t).
Complex cf_value(const Spectrum& s, double t);

/// -log|f(t)| = 1/4 sum log(1 + 4 l^2 t^2) + 2 sum a^2 l^2 t^2 / (1 + 4 l^2 t^2).
double neg_log_cf_modulus(const Spectrum& s, double t);

/// (1 + 4 t^2 / m)^{-m/4}: bound on |f| for unit-A1 central sums whose
/// normalized weights satisfy alpha_k^2 <= 1/m.
double envelope_lemma3(int m, double t);

/// (1 + t^2)^{-3/4} exp(-2 sum a^2 l^2 t^2 / (1 + 4 l^2 t^2)).
/// Requires A1 = 1 (within 1e-9) and lambda_1^2 <= 1/3; throws HypothesisViolated otherwise.
double envelope_noncentral(const Spectrum& s, double t);

struct TailCutoff {
  double t_star = 0.0;
  double tail_bound = 0.0;  // >= int_{t_star}^inf |f(t)| dt
};

/// Real-axis truncation point from |f(t)| <= (8 l1 l2 l3 t^3)^{-1/2}.
/// Throws TooFewTerms when n < 3.
TailCutoff tail_cutoff(const Spectrum& s, double eps_tail);

}  // namespace chi2w
