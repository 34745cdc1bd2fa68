#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "chi2w/charfn.hpp"
#include "chi2w/spectrum.hpp"

namespace chi2w {

struct EvalConfig {
  double eps_quad = 1e-8;        // absolute quadrature error target
  double eps_tail = 1e-9;        // truncation error target
  int grid_points = 2048;        // coarse scan size for density_max
  double bracket_sigmas = 12.0;  // scan window: [offset, mean + bracket_sigmas * std]
  double refine_tol = 1e-6;      // argmax tolerance, relative to std
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when a tolerance is not positive or grid_points < 16.
  void validate() const;
};

/// A density or probability together with its error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

enum class MaxKind { Finite, Unbounded };

struct DensityMax {
  MaxKind kind = MaxKind::Finite;
  double argmax = 0.0;
  double value = 0.0;
  double certified_error = 0.0;

  // Components of certified_error.
  double quadrature_error = 0.0;
  double grid_error = 0.0;
  double bracket_error = 0.0;

  bool finite() const noexcept { return kind == MaxKind::Finite; }
  static DensityMax unbounded(double at);
};

// Closed forms for a single term lambda (Z - a)^2, evaluated at x > 0.
double single_term_pdf(double lambda, double shift, double x);
double single_term_cdf(double lambda, double shift, double x);

/// Two-term central density written as the arcsine mixture
/// 1/(2 pi sqrt(l1 l2)) int_0^1 ((1-t) t)^{-1/2} exp(-x/2 [(1-t)/l1 + t/l2]) dt,
/// integrated numerically after t = sin^2(phi).
Estimate two_term_mixture_pdf(double lambda1, double lambda2, double x, double eps = 1e-12);

/// Two-term density (any shifts) by direct convolution of the one-term closed
/// forms; both inverse-square-root endpoints are removed by u = sqrt(.) substitutions.
Estimate convolution_pdf(const Spectrum& s, double x, double eps);

/// Fourier inversion of the characteristic function along the ray
/// t = r exp(-i theta) in the lower half-plane. For x > offset the factor
/// exp(-i t x) decays exponentially along the ray, which replaces the slowly
/// decaying real-axis integral. f(t) is precomputed on Gauss-Kronrod panels
/// covering every x in [x_lo, x_hi]; evaluations outside that window build a
/// private inverter.
class RayInverter {
 public:
  RayInverter(const Spectrum& s, double x_lo, double x_hi, const EvalConfig& cfg);

  /// Raw density (may dip below zero by at most its error).
  Estimate pdf(double x) const;
  Estimate cdf(double x) const;

  double angle() const noexcept { return theta_; }
  std::size_t panel_count() const noexcept { return panels_.size(); }

 private:
  struct Panel {
    double lo = 0.0;  // in the panel variable (r for the head, log r after)
    double hi = 0.0;
    bool log_scale = true;
    double r_start = 0.0;
    double envelope = 0.0;  // bound on |f| along the ray for r >= r_start
    int active = 0;         // weights with 2 lambda r_start >= 1
  };
  enum class Kind { Pdf, Cdf };

  Estimate evaluate(Kind kind, double y) const;
  Complex integrand(Kind kind, double y, const Panel& p, double v) const;
  double tail_bound(Kind kind, double y, const Panel& p) const;
  double envelope_at(double r, int* active) const;
  bool covers(double y) const;

  EvalConfig cfg_;
  double scale_ = 1.0;   // sqrt(A1)
  double offset_ = 0.0;
  Spectrum normalized_;  // weights / scale_, no offset
  double theta_ = 0.0;
  double y_lo_ = 0.0;
  double y_hi_ = 0.0;
  Complex direction_;    // exp(-i theta)
  std::vector<Panel> panels_;
  Panel sentinel_;  // start of the untouched tail
  // 15 entries per panel.
  std::vector<Complex> nodes_t_;
  std::vector<Complex> nodes_f_;  // f(t) * dt/dv
  std::vector<double> weights_k_;
  std::vector<double> weights_g_;
};

/// Density of W at x. Closed form for n = 1, convolution for n = 2, ray
/// inversion for n >= 3. Not clamped.
double pdf_point(const Spectrum& s, double x, const EvalConfig& cfg = {});
Estimate pdf_estimate(const Spectrum& s, double x, const EvalConfig& cfg = {});

/// P(W <= x), clamped to [0, 1].
double cdf_point(const Spectrum& s, double x, const EvalConfig& cfg = {});
Estimate cdf_estimate(const Spectrum& s, double x, const EvalConfig& cfg = {});

/// sup_x p(x).
DensityMax density_max(const Spectrum& s, const EvalConfig& cfg = {});

/// (1/pi) int_0^inf t |f(t)| dt, a Lipschitz constant for p. Needs n >= 5.
double density_lipschitz_bound(const Spectrum& s);

/// Bound on sup_{y >= x} p(y) from shifting the inversion contour to
/// Im t = -1/(4 lambda_1). Needs n >= 3.
double density_tail_bound(const Spectrum& s, double x);

/// (1/pi) int_0^inf |f(t)| dt. Needs n >= 3.
double inversion_upper_bound(const Spectrum& s);

}  // namespace chi2w
