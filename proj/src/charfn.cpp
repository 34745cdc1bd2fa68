#include "chi2w/charfn.hpp"

#include <cmath>
#include <numeric>

#include "chi2w/error.hpp"

namespace chi2w {

Complex log_cf(const Spectrum& s, Complex t) {
  const Complex i(0.0, 1.0);
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  Complex acc(0.0, 0.0);
  for (std::size_t k = 0; k < l.size(); ++k) {
    const Complex z = 1.0 - 2.0 * i * l[k] * t;
    acc -= 0.5 * std::log(z);
    if (a[k] != 0.0) acc += i * (l[k] * a[k] * a[k]) * t / z;
  }
  acc += i * s.offset() * t;
  return acc;
}

Complex cf_value(const Spectrum& s, double t) {
  if (t == 0.0) return {1.0, 0.0};
  return std::exp(log_cf(s, Complex(t, 0.0)));
}

double neg_log_cf_modulus(const Spectrum& s, double t) {
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  double quarter_logs = 0.0;
  double shift_terms = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double q = 4.0 * l[k] * l[k] * t * t;
    quarter_logs += std::log1p(q);
    shift_terms += a[k] * a[k] * (l[k] * l[k] * t * t) / (1.0 + q);
  }
  return 0.25 * quarter_logs + 2.0 * shift_terms;
}

double envelope_lemma3(int m, double t) {
  if (m < 1) throw Error(ErrorCode::InvalidConfig, "m must be >= 1");
  const double md = static_cast<double>(m);
  return std::pow(1.0 + 4.0 * t * t / md, -md / 4.0);
}

double envelope_noncentral(const Spectrum& s, double t) {
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  const double a1 = std::inner_product(l.begin(), l.end(), l.begin(), 0.0);
  if (std::abs(a1 - 1.0) > 1e-9) {
    throw Error(ErrorCode::HypothesisViolated, "weights must be normalized to A1 = 1");
  }
  if (l.front() * l.front() > 1.0 / 3.0 + 1e-12) {
    throw Error(ErrorCode::HypothesisViolated, "requires lambda_1^2 <= A1 / 3");
  }
  double shift_terms = 0.0;
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double lt2 = l[k] * l[k] * t * t;
    shift_terms += a[k] * a[k] * lt2 / (1.0 + 4.0 * lt2);
  }
  return std::pow(1.0 + t * t, -0.75) * std::exp(-2.0 * shift_terms);
}

TailCutoff tail_cutoff(const Spectrum& s, double eps_tail) {
  if (s.size() < 3) {
    throw Error(ErrorCode::TooFewTerms, "tail cutoff needs at least three weights");
  }
  if (!(eps_tail > 0.0)) throw Error(ErrorCode::InvalidConfig, "eps_tail must be positive");
  const auto& l = s.lambdas();
  // |f(t)| <= C t^{-3/2} with C = (8 l1 l2 l3)^{-1/2}; int_T^inf = 2 C T^{-1/2}.
  const double c = 1.0 / std::sqrt(8.0 * l[0] * l[1] * l[2]);
  const double t_star = std::pow(2.0 * c / eps_tail, 2.0) * (1.0 + 1e-12);
  return {t_star, 2.0 * c / std::sqrt(t_star)};
}

}  // namespace chi2w
