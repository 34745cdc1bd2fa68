#include "doctest.h"

#include <cmath>
#include <random>

#include "chi2w/error.hpp"
#include "chi2w/oracle.hpp"
#include "oracles.hpp"

using namespace chi2w;

TEST_CASE("sample means") {
  const auto w = sample(validate_spectrum({1.0}), 1'000'000, 1);
  const auto m = sample_moments(w);
  CHECK(std::abs(m.mean - 1.0) <= 4.0 * std::sqrt(2.0 / 1e6));
  CHECK(std::abs(m.variance - 2.0) <= 4.0 * m.variance_stderr);

  const auto v = sample(validate_spectrum({1.0}, std::vector<double>{2.0}), 1'000'000, 2);
  CHECK(std::abs(sample_moments(v).mean - 5.0) <= 4.0 * std::sqrt(18.0 / 1e6));
}

TEST_CASE("sample variance matches 2 A1 + 4 B1") {
  const Spectrum s =
      validate_spectrum({2.0, 1.0, 0.5}, std::vector<double>{0.5, -1.0, 2.0}, 0.3);
  const auto m = sample_moments(sample(s, 1'000'000, 3));
  const auto st = derived_stats(s);
  CHECK(std::abs(m.variance - st.variance) <= 4.0 * m.variance_stderr);
  CHECK(std::abs(m.mean - st.mean) <= 4.0 * std::sqrt(st.variance / 1e6));
}

TEST_CASE("sampling is deterministic and independent of chunking") {
  const Spectrum s = validate_spectrum({1.0, 0.5});
  const auto a = sample(s, 200000, 42);
  const auto b = sample(s, 200000, 42);
  CHECK(a == b);
  const auto c = sample(s, 70000, 42);
  CHECK(std::equal(c.begin(), c.end(), a.begin()));
  CHECK(sample(s, 1000, 43) != std::vector<double>(a.begin(), a.begin() + 1000));
}

TEST_CASE("standard normals") {
  const auto z = sample_normals(1'000'000, 5);
  const auto m = sample_moments(z);
  CHECK(std::abs(m.mean) < 4e-3);
  CHECK(std::abs(m.variance - 1.0) < 4.0 * m.variance_stderr);
}

TEST_CASE("histogram maximum") {
  SUBCASE("exponential") {
    const auto w = sample(validate_spectrum({1.0, 1.0}), 1'000'000, 6);
    const auto est = empirical_max(w, 2.0 / 20.0);
    CHECK(std::abs(est.m_hat - 0.5) <= 4.0 * est.m_stderr + est.bias_bound);
  }
  SUBCASE("chi-square 4") {
    const auto w = sample(validate_spectrum({1.0, 1.0, 1.0, 1.0}), 1'000'000, 7);
    const auto est = empirical_max(w, std::sqrt(8.0) / 20.0);
    CHECK(std::abs(est.m_hat - oracle::chi2_mode_value(4)) <= 4.0 * est.m_stderr + est.bias_bound);
  }
  SUBCASE("uniform") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(1'000'000);
    for (auto& v : w) v = u(rng);
    const auto est = empirical_max(w, 0.05);
    CHECK(est.m_hat == doctest::Approx(1.0).epsilon(0.02));
    const double product = est.m_hat * est.m_hat * sample_moments(w).variance;
    CHECK(product == doctest::Approx(1.0 / 12.0).epsilon(0.03));
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(empirical_max(std::vector<double>(100, 1.0), 0.1), Error);
    CHECK_THROWS_AS(empirical_max(std::vector<double>(20000, 1.0), 0.1), Error);
    CHECK_THROWS_AS(empirical_max(std::vector<double>(20000, 1.0), 0.0), Error);
  }
}

TEST_CASE("KS statistic") {
  const Spectrum s = validate_spectrum({1.0});
  const auto w = sample(s, 100000, 9);
  const double d = ks_check(w, s);
  CHECK(d < 1.95 / std::sqrt(1e5));
  CHECK(ks_check(w, s) == d);
  CHECK(ks_check(w, validate_spectrum({2.0})) > 10.0 / std::sqrt(1e5));
}

TEST_CASE("KS statistic for multi-term spectra") {
  const Spectrum s = validate_spectrum({1.5, 1.0, 0.2}, std::vector<double>{0.0, 1.0, -2.0}, 0.5);
  const auto w = sample(s, 200000, 10);
  CHECK(ks_check(w, s) < ks_critical_value(w.size(), 0.01));
  const Spectrum pair = validate_spectrum({2.0, 1.0}, std::vector<double>{1.0, 0.0});
  const auto v = sample(pair, 200000, 11);
  CHECK(ks_check(v, pair) < ks_critical_value(v.size(), 0.01));
  CHECK(ks_check(v, validate_spectrum({2.2, 1.0}, std::vector<double>{1.0, 0.0})) >
        ks_critical_value(v.size(), 0.01));
}

TEST_CASE("critical values") {
  CHECK(ks_critical_value(10000, 0.05) * 100.0 == doctest::Approx(1.3581).epsilon(1e-3));
  CHECK(ks_critical_value(10000, 0.01) * 100.0 == doctest::Approx(1.6276).epsilon(1e-3));
  CHECK_THROWS_AS(ks_critical_value(100, 1.5), Error);
}
