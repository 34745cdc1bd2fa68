#include "chi2w/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <functional>
#include <optional>
#include <random>

#include "chi2w/error.hpp"
#include "chi2w/parallel.hpp"

namespace chi2w {

namespace {

std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Box-Muller on a 64-bit Mersenne twister; portable across standard libraries
// because it avoids std::normal_distribution.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <class Fill>
std::vector<double> chunked(std::size_t n, std::uint64_t seed, Fill&& fill) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(static_cast<int>(chunks), [&](int c) {
    NormalStream normal(splitmix64(seed, static_cast<std::uint64_t>(c)));
    const std::size_t begin = static_cast<std::size_t>(c) * kSampleChunk;
    const std::size_t end = std::min(n, begin + kSampleChunk);
    for (std::size_t i = begin; i < end; ++i) out[i] = fill(normal);
  });
  return out;
}

}  // namespace

std::vector<double> sample(const Spectrum& s, std::size_t n, std::uint64_t seed) {
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  const double off = s.offset();
  return chunked(n, seed, [&](NormalStream& normal) {
    double w = off;
    for (std::size_t k = 0; k < l.size(); ++k) {
      const double z = normal() - a[k];
      w += l[k] * z * z;
    }
    return w;
  });
}

std::vector<double> sample_normals(std::size_t n, std::uint64_t seed) {
  return chunked(n, seed, [](NormalStream& normal) { return normal(); });
}

MCEstimate empirical_max(std::span<const double> samples, double bin_width) {
  if (samples.size() < 10000) {
    throw Error(ErrorCode::DegenerateSample, "need at least 1e4 samples");
  }
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw Error(ErrorCode::DegenerateSample, "bin width must be positive");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : samples) {
    if (!std::isfinite(x)) throw Error(ErrorCode::DegenerateSample, "non-finite sample");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateSample, "samples have no spread");
  const double bins_d = std::floor((hi - lo) / bin_width) + 1.0;
  if (bins_d > 5e7) throw Error(ErrorCode::DegenerateSample, "bin width too small for the range");
  const auto bins = static_cast<std::size_t>(bins_d);
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) {
    const auto j = std::min(bins - 1, static_cast<std::size_t>((x - lo) / bin_width));
    counts[j] += 1.0;
  }
  const auto peak = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  const double n = static_cast<double>(samples.size());
  const double c = counts[peak];
  const double norm = n * bin_width;

  MCEstimate est;
  est.n_samples = samples.size();
  est.bin_width = bin_width;
  est.m_hat = c / norm;
  est.m_stderr = std::max(std::sqrt(c * (1.0 - c / n)), 1.0) / norm;
  est.mode = lo + (static_cast<double>(peak) + 0.5) * bin_width;

  // p'' from a stride-k second difference of bar heights.
  std::size_t k = 3;
  while (k > 0 && (peak < k || peak + k >= bins)) --k;
  if (k == 0 && bins >= 3) {
    // Peak at an edge of the sample range: the bar averages over a slope.
    // Bars b0, b1, b2 inward from the edge give p'(edge) ~ (-2 b0 + 3 b1 - b2) / h
    // and p'' ~ (b0 - 2 b1 + b2) / h^2; the bar sits below the edge value by
    // about |p'| h / 2 + |p''| h^2 / 6.
    const bool left = peak == 0;
    const double b0 = c, b1 = counts[left ? 1 : bins - 2], b2 = counts[left ? 2 : bins - 3];
    const double d1 = std::abs(-2.0 * b0 + 3.0 * b1 - b2) / (norm * bin_width);
    const double d1_sd = std::sqrt(4.0 * b0 + 9.0 * b1 + b2) / (norm * bin_width);
    const double d2 = std::abs(b0 - 2.0 * b1 + b2) / (norm * bin_width * bin_width);
    const double d2_sd = std::sqrt(b0 + 4.0 * b1 + b2) / (norm * bin_width * bin_width);
    est.bias_bound = 0.5 * bin_width * (d1 + 2.0 * d1_sd) +
                     bin_width * bin_width / 6.0 * (d2 + 2.0 * d2_sd);
  } else if (k == 0) {
    est.bias_bound = est.m_hat;
  } else {
    const double span = static_cast<double>(k) * bin_width;
    const double d2 = (counts[peak - k] - 2.0 * c + counts[peak + k]) / (norm * span * span);
    const double d2_sd =
        std::sqrt(counts[peak - k] + 4.0 * c + counts[peak + k]) / (norm * span * span);
    est.bias_bound = bin_width * bin_width / 6.0 * (std::abs(d2) + 2.0 * d2_sd);
  }
  return est;
}

namespace {

// Cubic Hermite table of F in the variable s = sqrt(x - offset), where F is
// smooth even at the left end of the support.
class CdfTable {
 public:
  CdfTable(const Spectrum& s, double x_hi, const EvalConfig& cfg) : spec_(s), cfg_(cfg) {
    offset_ = s.offset();
    s_hi_ = std::sqrt(x_hi - offset_);
    for (std::size_t nodes = 256;; nodes *= 2) {
      build(nodes);
      if (max_midpoint_error() <= 1e-7 || nodes >= (1u << 15)) break;
    }
  }

  double operator()(double x) const {
    if (x <= offset_) return 0.0;
    const double sv = std::sqrt(x - offset_);
    if (sv >= s_hi_) return std::clamp(cdf_estimate(spec_, x, cfg_).value, 0.0, 1.0);
    const double pos = sv / step_;
    const auto j = std::min(static_cast<std::size_t>(pos), f_.size() - 2);
    return std::clamp(interpolate(j, pos - static_cast<double>(j)), 0.0, 1.0);
  }

 private:
  void build(std::size_t nodes) {
    step_ = s_hi_ / static_cast<double>(nodes - 1);
    const double x_first = offset_ + step_ * step_;
    const RayInverter inv(spec_, 0.25 * x_first + 0.75 * offset_, offset_ + s_hi_ * s_hi_, cfg_);
    f_.assign(nodes, 0.0);
    d_.assign(nodes, 0.0);
    for (std::size_t j = 1; j < nodes; ++j) {
      const double sv = step_ * static_cast<double>(j);
      const double x = offset_ + sv * sv;
      f_[j] = inv.cdf(x).value;
      d_[j] = 2.0 * sv * density(inv, x);
    }
    if (spec_.size() == 2) d_[0] = 0.0;
    mid_check_.clear();
    for (std::size_t j = 0; j + 1 < nodes; ++j) {
      const double sv = step_ * (static_cast<double>(j) + 0.5);
      mid_check_.push_back(inv.cdf(offset_ + sv * sv).value);
    }
  }

  double density(const RayInverter& inv, double x) const {
    return spec_.size() == 2 ? convolution_pdf(spec_, x, cfg_.eps_quad).value : inv.pdf(x).value;
  }

  double max_midpoint_error() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < mid_check_.size(); ++j)
      worst = std::max(worst, std::abs(interpolate(j, 0.5) - mid_check_[j]));
    return worst;
  }

  double interpolate(std::size_t j, double u) const {
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    return h00 * f_[j] + h10 * step_ * d_[j] + h01 * f_[j + 1] + h11 * step_ * d_[j + 1];
  }

  const Spectrum& spec_;
  EvalConfig cfg_;
  double offset_ = 0.0;
  double s_hi_ = 0.0;
  double step_ = 0.0;
  std::vector<double> f_, d_, mid_check_;
};

}  // namespace

double ks_check(std::span<const double> samples, const Spectrum& s, const EvalConfig& cfg) {
  if (samples.empty()) throw Error(ErrorCode::DegenerateSample, "no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::function<double(double)> cdf;
  std::optional<CdfTable> table;
  if (s.size() == 1) {
    cdf = [&](double x) { return single_term_cdf(s.lambdas()[0], s.shifts()[0], x - s.offset()); };
  } else {
    const DerivedStats st = derived_stats(s);
    table.emplace(s, st.mean + cfg.bracket_sigmas * st.stddev(), cfg);
    cdf = [&](double x) { return (*table)(x); };
  }

  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

MomentCheck sample_moments(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::DegenerateSample, "need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  MomentCheck out;
  out.mean = mean;
  out.variance = m2 * n / (n - 1.0);
  out.variance_stderr = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return out;
}

}  // namespace chi2w
