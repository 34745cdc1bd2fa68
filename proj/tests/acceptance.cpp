// One line per acceptance criterion; exit status is non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "chi2w/bounds.hpp"
#include "chi2w/charfn.hpp"
#include "chi2w/density.hpp"
#include "chi2w/oracle.hpp"
#include "chi2w/quadrature.hpp"
#include "chi2w/sweep.hpp"
#include "oracles.hpp"

using namespace chi2w;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs > limit_s) {
    v.ok = false;
    v.detail += fmt(" [over time limit %.0f s]", limit_s);
  }
  if (!v.ok) ++failures;
  std::printf("%s %d %s: %s (%.1f s)\n", v.ok ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

// Sweep spectra shared by criteria 3-5.
std::vector<SweepItem> central_items, hypothesis_items, violated_items;

struct Tally {
  int pass = 0, inconclusive = 0, fail = 0, not_applicable = 0, errors = 0;
  void add(const std::vector<SweepItem>& items, const std::string& name) {
    for (const auto& it : items) {
      if (!it.report) {
        ++errors;
        continue;
      }
      switch (it.report->find(name)->outcome) {
        case Outcome::Pass: ++pass; break;
        case Outcome::Inconclusive: ++inconclusive; break;
        case Outcome::Fail: ++fail; break;
        case Outcome::NotApplicable: ++not_applicable; break;
      }
    }
  }
  std::string str() const {
    return fmt("pass=%d inconclusive=%d fail=%d n/a=%d errors=%d", pass, inconclusive, fail,
               not_applicable, errors);
  }
};

Verdict closed_form_pairs() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_mix = 0.0, worst_conv = 0.0, worst_bessel = 0.0;
  int exact = 0;
  for (int i = 0; i < 50; ++i) {
    const Spectrum s = validate_spectrum({std::pow(10.0, u(rng)), std::pow(10.0, u(rng))});
    const double l1 = s.lambdas()[0], l2 = s.lambdas()[1];
    const double closed = 1.0 / (2.0 * std::sqrt(l1 * l2));
    const DensityMax m = density_max(s);
    if (m.finite() && m.value == closed && m.argmax == 0.0) ++exact;
    worst_mix = std::max(worst_mix, std::abs(two_term_mixture_pdf(l1, l2, 0.0).value - closed));
    worst_conv = std::max(worst_conv, std::abs(convolution_pdf(s, 0.0, 1e-12).value - closed));
    worst_bessel = std::max(worst_bessel, std::abs(oracle::two_term_bessel(l1, l2, 0.0) - closed));
  }
  return {exact == 50 && worst_mix <= 1e-7 && worst_conv <= 1e-7,
          fmt("closed form exact %d/50, max |conv-quadrature - closed| = %.2e, "
              "max |convolution - closed| = %.2e, Bessel oracle %.2e",
              exact, worst_mix, worst_conv, worst_bessel)};
}

Verdict chi_square_modes() {
  double worst = 0.0, lo = 1.0, hi = 0.0;
  for (int d = 3; d <= 10; ++d) {
    const DensityMax m = density_max(validate_spectrum(std::vector<double>(d, 1.0)));
    worst = std::max(worst, std::abs(m.value - oracle::chi2_mode_value(d)));
    lo = std::min(lo, m.value * std::sqrt(d));
    hi = std::max(hi, m.value * std::sqrt(d));
  }
  return {worst <= 1e-6 && lo >= 0.24 && hi <= 0.60,
          fmt("max |M - chi2 mode value| = %.2e, M*sqrt(d) in [%.4f, %.4f]", worst, lo, hi)};
}

Verdict theorem1_sweep() {
  SweepSpec spec;
  spec.count = 1000;
  spec.n_min = 3;
  spec.n_max = 50;
  spec.weight_law = WeightLaw::Mixed;
  spec.seed = 7;
  central_items = run_sweep(spec, EvalConfig{}).items;
  Tally lo, hi;
  lo.add(central_items, "theorem1.lower");
  hi.add(central_items, "theorem1.upper");
  return {lo.fail + hi.fail == 0 && lo.errors == 0 && lo.pass + lo.inconclusive == 1000 &&
              hi.pass + hi.inconclusive == 1000,
          "lower: " + lo.str() + "; upper: " + hi.str()};
}

Verdict theorem2_sweep() {
  SweepSpec spec;
  spec.count = 500;
  spec.n_min = 3;
  spec.n_max = 50;
  spec.shift_law = ShiftLaw::Gaussian;
  spec.shift_scale = 1.0;
  spec.constraint = SweepConstraint::Theorem2Hypothesis;
  spec.seed = 8;
  hypothesis_items = run_sweep(spec, EvalConfig{}).items;
  spec.constraint = SweepConstraint::Theorem2Violated;
  spec.n_min = 1;
  spec.seed = 9;
  violated_items = run_sweep(spec, EvalConfig{}).items;
  Tally lo, hi, vlo;
  lo.add(hypothesis_items, "theorem2.lower");
  hi.add(hypothesis_items, "theorem2.upper");
  vlo.add(violated_items, "theorem2.lower");
  return {lo.fail + hi.fail + vlo.fail == 0 && lo.errors + vlo.errors == 0 &&
              hi.not_applicable == 0,
          "hypothesis lower: " + lo.str() + "; upper: " + hi.str() +
              "; violated lower: " + vlo.str()};
}

Verdict statulyavichus() {
  int checked = 0, violations = 0, unbounded = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto* items : {&central_items, &hypothesis_items, &violated_items}) {
    for (const auto& it : *items) {
      if (!it.report) continue;
      ++checked;
      const auto& m = it.report->measured;
      if (!m.finite()) {
        ++unbounded;
        continue;
      }
      const double var = it.report->stats.variance;
      const double upper = (m.value + m.certified_error);
      const double ratio = 12.0 * upper * upper * var;
      worst = std::min(worst, 12.0 * m.value * m.value * var);
      if (ratio < 1.0 - 1e-12) ++violations;
    }
  }
  // Uniform law: equality case.
  std::mt19937_64 rng(55);
  std::vector<double> w(10'000'000);
  for (auto& v : w) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const MCEstimate est = empirical_max(w, 0.05);
  const double product = est.m_hat * est.m_hat * sample_moments(w).variance;
  const double rel = std::abs(product * 12.0 - 1.0);
  return {violations == 0 && checked == 2000 && rel <= 0.01,
          fmt("%d spectra, %d violations, %d unbounded, min 12 M^2 Var = %.4f; "
              "uniform m_hat^2 Var = %.6f (rel. dev. %.2e from 1/12)",
              checked, violations, unbounded, worst, product, rel)};
}

Verdict lemma3_envelope() {
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  long evaluations = 0, violations = 0;
  for (int m = 1; m <= 4; ++m) {
    int made = 0;
    while (made < 200) {
      const std::size_t n = static_cast<std::size_t>(m) + rng() % 30;
      std::vector<double> l(n), a(n, 0.0);
      for (auto& v : l) v = std::pow(u(rng), 0.5 * m);
      for (auto& v : l) v = std::max(v, 1e-6);
      if (made % 2) for (auto& v : a) v = z(rng);
      Spectrum s = validate_spectrum(l, a);
      s = rescale(s, 1.0 / std::sqrt(derived_stats(s).a1));
      if (s.largest() * s.largest() > 1.0 / m) continue;
      ++made;
      for (int j = 0; j < 200; ++j) {
        const double t = std::pow(10.0, -3.0 + 6.0 * j / 199.0);
        ++evaluations;
        if (std::abs(cf_value(s, t)) > envelope_lemma3(m, t) * (1.0 + 1e-12)) ++violations;
      }
    }
  }
  // (1/2pi) int (1 + 4t^2/3)^{-3/4} dt: with t = (sqrt 3 / 2) tan(phi) and
  // phi = pi/2 - s^2 the integrand is smooth.
  const auto third = quad::integrate(
      [](double s) { return s == 0.0 ? 2.0 : 2.0 * s / std::sqrt(std::sin(s * s)); }, 0.0,
      std::sqrt(std::numbers::pi / 2.0), 1e-14);
  const double c_third = 2.0 * (std::sqrt(3.0) / 2.0) * third.value / (2.0 * std::numbers::pi);
  const double beta = std::sqrt(3.0) / 2.0 * std::beta(0.5, 0.25) / (2.0 * std::numbers::pi);
  // (1/2pi) int (1 + t^2)^{-1} dt, folding (1, inf) onto (0, 1) with t = 1/s.
  const auto quarter = quad::integrate([](double t) { return 1.0 / (1.0 + t * t); }, 0.0, 1.0, 1e-15);
  const double c_quarter = 2.0 * 2.0 * quarter.value / (2.0 * std::numbers::pi);
  return {violations == 0 && c_third < 0.723 && std::abs(c_third - beta) < 1e-10 &&
              std::abs(c_quarter - 0.5) <= 1e-9,
          fmt("%ld envelope checks, %ld violations; (1/2pi) int (1+4t^2/3)^(-3/4) = %.10f "
              "(Beta form %.10f); (1/2pi) int (1+t^2)^(-1) = %.12f",
              evaluations, violations, c_third, beta, c_quarter)};
}

Verdict cf_consistency() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  double worst_log = 0.0, worst_product = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<double> l(n), a(n, 0.0);
    const double scale = std::pow(10.0, -1.0 + 2.0 * u(rng));
    for (auto& v : l) v = scale * (0.01 + u(rng));
    if (i % 2) for (auto& v : a) v = 2.0 * z(rng);
    const Spectrum s = validate_spectrum(l, a, i % 3 ? 0.0 : u(rng));
    for (int j = 0; j < 200; ++j) {
      const double t = std::pow(10.0, -3.0 + 6.0 * j / 199.0);
      const double mod = std::abs(cf_value(s, t));
      if (mod < 1e-280) continue;
      worst_log = std::max(worst_log, std::abs(std::exp(-neg_log_cf_modulus(s, t)) - mod) / mod);
      const auto ref = oracle::cf_product(s.lambdas(), s.shifts(), s.offset(), t);
      if (std::abs(ref) > 1e-280) {
        worst_product = std::max(worst_product, std::abs(cf_value(s, t) - ref) / std::abs(ref));
      }
    }
  }
  return {worst_log <= 1e-12,
          fmt("max rel |exp(-neg_log_modulus) - |f|| = %.2e; vs direct (1-2i l t) product %.2e",
              worst_log, worst_product)};
}

Verdict oracle_coherence() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  int ok = 0;
  std::string worst;
  double worst_ks_ratio = 0.0, worst_var_se = 0.0, worst_m_ratio = 0.0;
  for (int i = 0; i < 10; ++i) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<double> l(n), a(n, 0.0);
    for (auto& v : l) v = 0.1 + 2.0 * u(rng);
    if (i >= 5) for (auto& v : a) v = z(rng);
    const Spectrum s = validate_spectrum(l, a, i >= 5 ? u(rng) : 0.0);
    const auto st = derived_stats(s);
    const auto w = sample(s, 1'000'000, 1000 + i);
    const double ks = ks_check(w, s);
    const double crit = ks_critical_value(w.size(), 0.01);
    const MomentCheck mom = sample_moments(w);
    const double var_se = std::abs(mom.variance - st.variance) / mom.variance_stderr;
    const MCEstimate est = empirical_max(w, st.stddev() / 20.0);
    const DensityMax m = density_max(s);
    const double allowed = 4.0 * est.m_stderr + est.bias_bound + m.certified_error;
    const double m_ratio = std::abs(est.m_hat - m.value) / allowed;
    worst_ks_ratio = std::max(worst_ks_ratio, ks / crit);
    worst_var_se = std::max(worst_var_se, var_se);
    worst_m_ratio = std::max(worst_m_ratio, m_ratio);
    if (ks < crit && var_se <= 4.0 && m_ratio <= 1.0) ++ok;
  }
  return {ok == 10, fmt("%d/10 coherent; max KS/critical = %.3f, max |var diff|/SE = %.2f, "
                        "max |m_hat - M|/allowance = %.3f",
                        ok, worst_ks_ratio, worst_var_se, worst_m_ratio)};
}

}  // namespace

int main() {
  report(1, "closed-form n=2 vs quadrature", 10.0, closed_form_pairs);
  report(2, "chi-square(d) modes via inversion", 30.0, chi_square_modes);
  report(3, "Theorem 1 sweep, 1000 central spectra", 600.0, theorem1_sweep);
  report(4, "Theorem 2 sweeps, 500 + 500 shifted spectra", 600.0, theorem2_sweep);
  report(5, "Lemma 1 (M^2 Var >= 1/12) and uniform equality", 0.0, statulyavichus);
  report(6, "Lemma 3 envelope and constants", 0.0, lemma3_envelope);
  report(7, "CF modulus consistency", 0.0, cf_consistency);
  report(8, "Monte Carlo oracle coherence at 1e6 samples", 300.0, oracle_coherence);
  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
