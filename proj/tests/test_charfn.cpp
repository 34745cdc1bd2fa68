#include "doctest.h"

#include <cmath>
#include <random>

#include "chi2w/charfn.hpp"
#include "chi2w/error.hpp"
#include "chi2w/oracle.hpp"
#include "chi2w/quadrature.hpp"
#include "oracles.hpp"

using namespace chi2w;

namespace {

Spectrum random_spectrum(std::mt19937_64& rng, std::size_t n, bool shifted) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::normal_distribution<double> z;
  std::vector<double> l(n), a(n, 0.0);
  for (auto& v : l) v = u(rng);
  if (shifted)
    for (auto& v : a) v = z(rng);
  return validate_spectrum(l, a, shifted ? u(rng) : 0.0);
}

}  // namespace

TEST_CASE("value at zero is one") {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 5; ++rep) {
    const Spectrum s = random_spectrum(rng, 1 + rep, rep % 2);
    const Complex f = cf_value(s, 0.0);
    CHECK(f.real() == 1.0);
    CHECK(f.imag() == 0.0);
    CHECK(neg_log_cf_modulus(s, 0.0) == 0.0);
  }
}

TEST_CASE("single central term modulus") {
  const Spectrum s = validate_spectrum({1.0});
  for (double t : {0.1, 0.5, 1.0, 7.0, 100.0}) {
    CHECK(std::abs(cf_value(s, t)) == doctest::Approx(std::pow(1.0 + 4.0 * t * t, -0.25)).epsilon(1e-14));
  }
}

TEST_CASE("single shifted term at t = 0.3") {
  const Spectrum s = validate_spectrum({1.0}, std::vector<double>{2.0});
  const double t = 0.3;
  const double expected = std::pow(1.36, -0.25) * std::exp(-2.0 * 4.0 * 0.09 / 1.36);
  CHECK(std::abs(cf_value(s, t)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::exp(-neg_log_cf_modulus(s, t)) == doctest::Approx(expected).epsilon(1e-14));

  // Empirical E exp(itW) over 1e6 draws, within 3 standard errors per component.
  const auto w = sample(s, 1'000'000, 99);
  double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
  for (double x : w) {
    re += std::cos(t * x);
    im += std::sin(t * x);
    re2 += std::cos(t * x) * std::cos(t * x);
    im2 += std::sin(t * x) * std::sin(t * x);
  }
  const double n = static_cast<double>(w.size());
  re /= n;
  im /= n;
  const double se_re = std::sqrt((re2 / n - re * re) / n);
  const double se_im = std::sqrt((im2 / n - im * im) / n);
  const Complex f = cf_value(s, t);
  CHECK(std::abs(re - f.real()) < 3.0 * se_re);
  CHECK(std::abs(im - f.imag()) < 3.0 * se_im);
}

TEST_CASE("negative log modulus closed forms") {
  const double l = 1.0 / std::sqrt(3.0);
  const Spectrum s = validate_spectrum({l, l, l});
  CHECK(neg_log_cf_modulus(s, 1.0) == doctest::Approx(0.75 * std::log(1.0 + 4.0 / 3.0)).epsilon(1e-14));
  const Spectrum shifted = validate_spectrum({1.0}, std::vector<double>{1.0});
  CHECK(neg_log_cf_modulus(shifted, 1.0) == doctest::Approx(0.25 * std::log(5.0) + 0.4).epsilon(1e-14));
}

TEST_CASE("lemma 3 envelope values") {
  CHECK(envelope_lemma3(1, 1.0) == doctest::Approx(std::pow(5.0, -0.25)));
  CHECK(envelope_lemma3(4, 2.0) == doctest::Approx(0.2));
  for (int m = 1; m <= 6; ++m) CHECK(envelope_lemma3(m, 0.0) == 1.0);
}

TEST_CASE("noncentral envelope") {
  const double l = 1.0 / std::sqrt(3.0);
  const Spectrum s = validate_spectrum({l, l, l});
  CHECK(envelope_noncentral(s, 1.0) == doctest::Approx(std::pow(2.0, -0.75)));
  CHECK(envelope_noncentral(s, 0.0) == 1.0);
  const Spectrum heavy = validate_spectrum({std::sqrt(0.5), 0.5, 0.5});
  CHECK_THROWS_AS(envelope_noncentral(heavy, 1.0), Error);
  try {
    envelope_noncentral(heavy, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
  }
}

TEST_CASE("property: envelope dominates the modulus under the hypothesis") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.3, 1.0);
  int checked = 0;
  while (checked < 50) {
    std::vector<double> l(3 + rng() % 6), a(l.size());
    for (auto& v : l) v = u(rng);
    for (auto& v : a) v = z(rng);
    Spectrum s = validate_spectrum(l, a);
    s = rescale(s, 1.0 / std::sqrt(derived_stats(s).a1));
    if (s.largest() * s.largest() > 1.0 / 3.0) continue;
    ++checked;
    for (double t = 1e-3; t < 1e3; t *= 1.3) {
      CHECK(std::abs(cf_value(s, t)) <= envelope_noncentral(s, t) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("property: modulus agrees with the direct product and log form") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Spectrum s = random_spectrum(rng, 1 + rep % 12, rep % 3 != 0);
    for (double t = 1e-3; t <= 1e3; t *= 1.9) {
      const Complex f = cf_value(s, t);
      const auto ref = oracle::cf_product(s.lambdas(), s.shifts(), s.offset(), t);
      CHECK(std::abs(f - ref) <= 1e-12 * std::abs(ref) + 1e-300);
      CHECK(std::exp(-neg_log_cf_modulus(s, t)) == doctest::Approx(std::abs(f)).epsilon(1e-12));
      CHECK(std::abs(f) <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("property: conjugate symmetry") {
  std::mt19937_64 rng(8);
  const Spectrum s = random_spectrum(rng, 4, true);
  for (double t : {0.01, 0.3, 2.0, 30.0}) {
    const Complex f = std::exp(log_cf(s, Complex(t, 0.0)));
    const Complex g = std::exp(log_cf(s, Complex(-t, 0.0)));
    CHECK(std::abs(f - std::conj(g)) < 1e-14);
  }
}

TEST_CASE("tail cutoff") {
  const Spectrum s = validate_spectrum({1.0, 1.0, 1.0});
  const TailCutoff c = tail_cutoff(s, 1e-8);
  CHECK(c.tail_bound <= 1e-8);
  // Check the bound against the actual integral over [t*, 10 t*] plus the
  // analytic remainder beyond 10 t*.
  const auto part = quad::integrate([&](double t) { return std::abs(cf_value(s, t)); }, c.t_star,
                                    10.0 * c.t_star, 1e-14, 4000, 64);
  const double rest = 2.0 / std::sqrt(8.0) / std::sqrt(10.0 * c.t_star);
  CHECK(part.value + rest <= c.tail_bound * (1.0 + 1e-9));

  const TailCutoff tighter = tail_cutoff(s, 1e-10);
  CHECK(tighter.t_star >= c.t_star);

  try {
    tail_cutoff(validate_spectrum({1.0, 1.0}), 1e-8);
    FAIL("expected TooFewTerms");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewTerms);
  }
}
