#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace chi2w {

/// Parameters of W = sum_k lambda_k (Z_k - a_k)^2 + offset.
///
/// Always valid once constructed: weights positive and sorted non-increasing,
/// shifts permuted alongside them, offset finite and non-negative.
class Spectrum {
 public:
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  const std::vector<double>& shifts() const noexcept { return shifts_; }
  double offset() const noexcept { return offset_; }
  std::size_t size() const noexcept { return lambdas_.size(); }
  double largest() const noexcept { return lambdas_.front(); }
  bool is_central() const noexcept;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  Spectrum(std::vector<double> lambdas, std::vector<double> shifts, double offset)
      : lambdas_(std::move(lambdas)), shifts_(std::move(shifts)), offset_(offset) {}

  friend Spectrum validate_spectrum(std::vector<double>, std::optional<std::vector<double>>,
                                    std::optional<double>);

  std::vector<double> lambdas_;
  std::vector<double> shifts_;
  double offset_ = 0.0;
};

struct DerivedStats {
  double a1 = 0.0;  // sum lambda_k^2
  double a2 = 0.0;  // sum_{k>=2} lambda_k^2
  double b1 = 0.0;  // sum lambda_k^2 a_k^2
  double mean = 0.0;
  double variance = 0.0;  // 2 a1 + 4 b1

  double stddev() const;
};

/// Builds a Spectrum. Missing shifts mean all zero, missing offset means 0.
/// Weights are stable-sorted descending with shifts following.
Spectrum validate_spectrum(std::vector<double> lambdas,
                           std::optional<std::vector<double>> shifts = std::nullopt,
                           std::optional<double> offset = std::nullopt);

DerivedStats derived_stats(const Spectrum& s);

/// Multiplies weights and offset by `factor`; shifts are dimensionless.
Spectrum rescale(const Spectrum& s, double factor);

/// Same spectrum with a different offset.
Spectrum with_offset(const Spectrum& s, double offset);

/// Row-major dense symmetric matrix.
struct SymmetricMatrix {
  std::size_t dim = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * dim + j]; }
};

struct EigenSystem {
  std::vector<double> values;               // descending
  std::vector<std::vector<double>> vectors; // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi rotations; the input must be symmetric.
EigenSystem jacobi_eigen(const SymmetricMatrix& m, double tol = 1e-15, int max_sweeps = 100);

/// Eigenvalue cutoff below which a covariance direction counts as degenerate:
/// 1e-12 * (largest |entry|) * d.
double eigen_tolerance(const SymmetricMatrix& cov);

/// Law of ||Y||^2 for Y ~ N(mean, cov) as a Spectrum. Degenerate directions
/// contribute their squared mean component to the offset.
Spectrum decompose_gaussian(const SymmetricMatrix& cov, std::span<const double> mean);

}  // namespace chi2w
