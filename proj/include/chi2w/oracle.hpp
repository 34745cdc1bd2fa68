#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chi2w/density.hpp"
#include "chi2w/spectrum.hpp"

namespace chi2w {

/// Samples per independent generator stream. Fixed so that results depend
/// only on (seed, n), never on the thread count.
inline constexpr std::size_t kSampleChunk = 65536;

/// n draws of W. Chunk c uses std::mt19937_64 seeded with splitmix64(seed, c);
/// normals come from the Box-Muller transform.
std::vector<double> sample(const Spectrum& s, std::size_t n, std::uint64_t seed);

/// Standard normals with the same stream layout.
std::vector<double> sample_normals(std::size_t n, std::uint64_t seed);

struct MCEstimate {
  std::size_t n_samples = 0;
  double m_hat = 0.0;       // tallest histogram bar as a density
  double m_stderr = 0.0;    // binomial standard error of that bar
  double ks_stat = 0.0;     // filled by callers that run ks_check
  double bin_width = 0.0;
  double mode = 0.0;        // centre of the tallest bin
  // Bound on how far the peak bar can sit below the density maximum:
  // h^2 |p''| / 6 with p'' from a second difference of neighbouring bars, or
  // h |p'| / 2 + h^2 |p''| / 6 from one-sided differences when the peak bar is
  // at the edge of the range. Differences include two standard errors.
  double bias_bound = 0.0;
};

/// Histogram density maximum. Throws DegenerateSample for fewer than 1e4
/// samples, non-finite values, zero spread or a non-positive bin width.
MCEstimate empirical_max(std::span<const double> samples, double bin_width);

/// Kolmogorov-Smirnov distance between the empirical cdf of `samples` and
/// cdf_point for `s`.
double ks_check(std::span<const double> samples, const Spectrum& s, const EvalConfig& cfg = {});

/// Asymptotic Kolmogorov critical value c_alpha / sqrt(n) for alpha = 0.05 or 0.01.
double ks_critical_value(std::size_t n, double alpha);

struct MomentCheck {
  double mean = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;  // sqrt((m4 - s^4) / n)
};

MomentCheck sample_moments(std::span<const double> samples);

}  // namespace chi2w
