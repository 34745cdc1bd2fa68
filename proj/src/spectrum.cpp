#include "chi2w/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chi2w/error.hpp"

namespace chi2w {

bool Spectrum::is_central() const noexcept {
  return std::all_of(shifts_.begin(), shifts_.end(), [](double a) { return a == 0.0; });
}

double DerivedStats::stddev() const { return std::sqrt(variance); }

Spectrum validate_spectrum(std::vector<double> lambdas, std::optional<std::vector<double>> shifts,
                           std::optional<double> offset) {
  if (lambdas.empty()) throw Error(ErrorCode::EmptySpectrum, "at least one weight is required");
  std::vector<double> a = shifts ? std::move(*shifts) : std::vector<double>(lambdas.size(), 0.0);
  if (a.size() != lambdas.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(lambdas.size()) + " weights but " +
                                               std::to_string(a.size()) + " shifts");
  }
  const double off = offset.value_or(0.0);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!std::isfinite(lambdas[k]) || !std::isfinite(a[k])) {
      throw Error(ErrorCode::NonFiniteInput, "component " + std::to_string(k) + " is not finite");
    }
    if (lambdas[k] <= 0.0) {
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight " + std::to_string(k) + " is " + std::to_string(lambdas[k]));
    }
  }
  if (!std::isfinite(off)) throw Error(ErrorCode::NonFiniteInput, "offset is not finite");
  if (off < 0.0) throw Error(ErrorCode::NonPositiveWeight, "offset must be >= 0");

  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lambdas[i] > lambdas[j]; });
  std::vector<double> l_sorted, a_sorted;
  l_sorted.reserve(order.size());
  a_sorted.reserve(order.size());
  for (std::size_t i : order) {
    l_sorted.push_back(lambdas[i]);
    a_sorted.push_back(a[i]);
  }
  return Spectrum(std::move(l_sorted), std::move(a_sorted), off);
}

DerivedStats derived_stats(const Spectrum& s) {
  DerivedStats d;
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  for (std::size_t k = 0; k < l.size(); ++k) {
    const double l2 = l[k] * l[k];
    d.a1 += l2;
    if (k > 0) d.a2 += l2;
    d.b1 += l2 * a[k] * a[k];
    d.mean += l[k] * (1.0 + a[k] * a[k]);
  }
  d.mean += s.offset();
  d.variance = 2.0 * d.a1 + 4.0 * d.b1;
  return d;
}

Spectrum rescale(const Spectrum& s, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::NonPositiveFactor, "scale factor must be positive and finite");
  }
  std::vector<double> l = s.lambdas();
  for (double& v : l) v *= factor;
  return validate_spectrum(std::move(l), s.shifts(), s.offset() * factor);
}

Spectrum with_offset(const Spectrum& s, double offset) {
  return validate_spectrum(s.lambdas(), s.shifts(), offset);
}

EigenSystem jacobi_eigen(const SymmetricMatrix& m, double tol, int max_sweeps) {
  const std::size_t d = m.dim;
  SymmetricMatrix a = m;
  std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) v[i][i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  double scale = 0.0;
  for (double x : a.data) scale = std::max(scale, std::abs(x));

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * std::max(scale, 1e-300); ++sweep) {
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q).
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  EigenSystem out;
  for (std::size_t i : order) {
    out.values.push_back(a(i, i));
    std::vector<double> col(d);
    for (std::size_t k = 0; k < d; ++k) col[k] = v[k][i];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

double eigen_tolerance(const SymmetricMatrix& cov) {
  double largest = 0.0;
  for (double x : cov.data) largest = std::max(largest, std::abs(x));
  return 1e-12 * largest * static_cast<double>(cov.dim);
}

Spectrum decompose_gaussian(const SymmetricMatrix& cov, std::span<const double> mean) {
  const std::size_t d = cov.dim;
  if (d == 0 || cov.data.size() != d * d) {
    throw Error(ErrorCode::LengthMismatch, "covariance must be a non-empty square matrix");
  }
  if (mean.size() != d) {
    throw Error(ErrorCode::LengthMismatch, "mean has length " + std::to_string(mean.size()) +
                                               ", covariance is " + std::to_string(d) + "x" +
                                               std::to_string(d));
  }
  for (double x : cov.data)
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "covariance entry not finite");
  for (double x : mean)
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "mean entry not finite");

  double largest = 0.0;
  for (double x : cov.data) largest = std::max(largest, std::abs(x));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-10 * largest) {
        throw Error(ErrorCode::NotSymmetric, "entries (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ") differ");
      }
    }
  }
  SymmetricMatrix sym = cov;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) sym(i, j) = sym(j, i) = 0.5 * (cov(i, j) + cov(j, i));

  const double tol = eigen_tolerance(sym);
  const EigenSystem eig = jacobi_eigen(sym);
  std::vector<double> lambdas, shifts;
  double offset = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double ev = eig.values[k];
    double proj = 0.0;
    for (std::size_t i = 0; i < d; ++i) proj += mean[i] * eig.vectors[k][i];
    if (ev < -tol) {
      throw Error(ErrorCode::NegativeEigenvalue, "eigenvalue " + std::to_string(ev));
    }
    if (ev > tol) {
      lambdas.push_back(ev);
      shifts.push_back(std::abs(proj) / std::sqrt(ev));
    } else {
      offset += proj * proj;
    }
  }
  if (lambdas.empty()) {
    throw Error(ErrorCode::AllZeroCovariance, "covariance has no positive eigenvalue");
  }
  return validate_spectrum(std::move(lambdas), std::move(shifts), offset);
}

}  // namespace chi2w
