#include "chi2w/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <limits>
#include <numbers>

#include "chi2w/error.hpp"
#include "chi2w/quadrature.hpp"

namespace chi2w {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest log-amplification of |f| tolerated along the ray.
constexpr double kGrowthCap = 9.2;
// exp(-kDamping) is below double resolution relative to the envelope, so
// panels only need to resolve oscillation for x < kDamping / (r sin theta).
constexpr double kDamping = 35.0;

Spectrum normalized(const Spectrum& s, double& scale) {
  scale = std::sqrt(derived_stats(s).a1);
  return with_offset(rescale(s, 1.0 / scale), 0.0);
}

double ray_angle(const Spectrum& s) {
  const double n = static_cast<double>(s.size());
  double sum_a2 = 0.0;
  for (double a : s.shifts()) sum_a2 += a * a;
  auto growth = [&](double theta) {
    const double c = std::cos(theta);
    return 0.5 * n * -std::log(c) + 0.5 * sum_a2 * (1.0 / c - 1.0);
  };
  double hi = kPi / 4.0;
  if (growth(hi) <= kGrowthCap) return hi;
  double lo = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (growth(mid) <= kGrowthCap ? lo : hi) = mid;
  }
  return lo;
}

// (e^w - 1) / w without cancellation near zero.
Complex expm1_over(Complex w) {
  if (std::abs(w) < 1e-3) return 1.0 + w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w / 120.0)));
  return (std::exp(w) - 1.0) / w;
}

// sqrt(y) * p_1(y) for one term lambda (Z - a)^2; finite at y = 0.
double single_term_scaled(double lambda, double shift, double y) {
  const double z = std::sqrt(std::max(y, 0.0) / lambda);
  const double e = 0.5 * (std::exp(-0.5 * (z - shift) * (z - shift)) +
                          std::exp(-0.5 * (z + shift) * (z + shift)));
  return e / std::sqrt(2.0 * kPi * lambda);
}

// sup_{y' >= y} p_1(y') for one term.
double single_term_sup_beyond(double lambda, double shift, double y) {
  const double z = std::sqrt(y / lambda);
  const double a = std::abs(shift);
  const double base = 1.0 / std::sqrt(2.0 * kPi * lambda * y);
  return z >= a ? base * std::exp(-0.5 * (z - a) * (z - a)) : base;
}

double two_term_density_at_offset(const Spectrum& s) {
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  return std::exp(-0.5 * (a[0] * a[0] + a[1] * a[1])) / (2.0 * std::sqrt(l[0] * l[1]));
}

}  // namespace

void EvalConfig::validate() const {
  if (!(eps_quad > 0.0) || !(eps_tail > 0.0) || !(bracket_sigmas > 0.0) || !(refine_tol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "tolerances must be positive");
  }
  if (grid_points < 16) throw Error(ErrorCode::InvalidConfig, "grid_points must be >= 16");
}

DensityMax DensityMax::unbounded(double at) {
  DensityMax m;
  m.kind = MaxKind::Unbounded;
  m.argmax = at;
  m.value = kInf;
  return m;
}

double single_term_pdf(double lambda, double shift, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return kInf;
  return single_term_scaled(lambda, shift, x) / std::sqrt(x);
}

double single_term_cdf(double lambda, double shift, double x) {
  if (x <= 0.0) return 0.0;
  const double z = std::sqrt(x / lambda);
  // Phi(z - a) - Phi(-z - a)
  const double v = 0.5 * (std::erfc(-(z - shift) / std::numbers::sqrt2) -
                          std::erfc((z + shift) / std::numbers::sqrt2));
  return std::clamp(v, 0.0, 1.0);
}

Estimate two_term_mixture_pdf(double lambda1, double lambda2, double x, double eps) {
  const double pref = 1.0 / (kPi * std::sqrt(lambda1 * lambda2));
  auto g = [&](double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return std::exp(-0.5 * x * (c * c / lambda1 + s * s / lambda2));
  };
  const auto r = quad::integrate(g, 0.0, kPi / 2.0, eps / pref, 2000, 4);
  return {pref * r.value, pref * r.error};
}

Estimate convolution_pdf(const Spectrum& s, double x, double eps) {
  if (s.size() != 2) throw Error(ErrorCode::TooFewTerms, "convolution path needs exactly two terms");
  const double y = x - s.offset();
  if (y < 0.0) return {0.0, 0.0};
  if (y == 0.0) return {two_term_density_at_offset(s), 0.0};
  const auto& l = s.lambdas();
  const auto& a = s.shifts();
  const double v_max = std::sqrt(0.5 * y);

  // p(y) = int_0^{y/2} p1(u) p2(y-u) du + int_0^{y/2} p1(y-v) p2(v) dv, with
  // u = s^2 and v = s^2 absorbing the inverse square roots at each endpoint.
  auto near_first = [&](double t) {
    return 2.0 * single_term_scaled(l[0], a[0], t * t) * single_term_pdf(l[1], a[1], y - t * t);
  };
  auto near_second = [&](double t) {
    return 2.0 * single_term_pdf(l[0], a[0], y - t * t) * single_term_scaled(l[1], a[1], t * t);
  };
  Estimate out;
  auto piecewise = [&](auto&& g, double scale_len) {
    const double b = std::min(v_max, 12.0 * scale_len);
    const auto r1 = quad::integrate(g, 0.0, b, 0.25 * eps, 4000, 4);
    out.value += r1.value;
    out.error += r1.error;
    if (b < v_max) {
      const auto r2 = quad::integrate(g, b, v_max, 0.25 * eps, 4000, 4);
      out.value += r2.value;
      out.error += r2.error;
    }
  };
  piecewise(near_first, std::sqrt(l[0]) * (1.0 + std::abs(a[0])));
  piecewise(near_second, std::sqrt(l[1]) * (1.0 + std::abs(a[1])));
  return out;
}

// ---------------------------------------------------------------------------
// RayInverter

RayInverter::RayInverter(const Spectrum& s, double x_lo, double x_hi, const EvalConfig& cfg)
    : cfg_(cfg),
      scale_(std::sqrt(derived_stats(s).a1)),
      offset_(s.offset()),
      normalized_(with_offset(rescale(s, 1.0 / scale_), 0.0)) {
  cfg_.validate();
  y_lo_ = std::max((x_lo - offset_) / scale_, 0.0);
  y_hi_ = std::max((x_hi - offset_) / scale_, y_lo_);
  theta_ = ray_angle(normalized_);
  direction_ = std::polar(1.0, -theta_);
  const double sin_t = std::sin(theta_);
  const double cos_t = std::cos(theta_);

  double mean_n = 0.0;
  double max_a2 = 0.0;
  for (std::size_t k = 0; k < normalized_.size(); ++k) {
    const double a2 = normalized_.shifts()[k] * normalized_.shifts()[k];
    mean_n += normalized_.lambdas()[k] * (1.0 + a2);
    max_a2 = std::max(max_a2, a2);
  }
  const double r_head = 0.25 / std::max({y_hi_, mean_n, 1.0});
  const double log_step = 0.25 / std::max(1.0, max_a2 / 6.0);
  const double eps_t = cfg_.eps_tail * scale_;

  auto add_panel = [&](const Panel& p) {
    const quad::PanelRule rule = quad::panel_rule(p.lo, p.hi);
    for (std::size_t j = 0; j < 15; ++j) {
      const double r = p.log_scale ? std::exp(rule.x[j]) : rule.x[j];
      const Complex t = r * direction_;
      const Complex jac = p.log_scale ? direction_ * r : direction_;
      nodes_t_.push_back(t);
      nodes_f_.push_back(std::exp(log_cf(normalized_, t)) * jac);
      weights_k_.push_back(rule.wk[j]);
      weights_g_.push_back(rule.wg[j]);
    }
    panels_.push_back(p);
  };

  Panel head;
  head.lo = 0.0;
  head.hi = r_head;
  head.log_scale = false;
  head.r_start = 0.0;
  head.envelope = envelope_at(0.0, &head.active);
  add_panel(head);

  double r = r_head;
  for (;;) {
    Panel p;
    p.r_start = r;
    p.envelope = envelope_at(r, &p.active);
    const bool pdf_done = tail_bound(Kind::Pdf, y_lo_, p) <= eps_t;
    const bool cdf_done = tail_bound(Kind::Cdf, y_lo_, p) <= eps_t;
    if (pdf_done && cdf_done) {
      sentinel_ = p;
      break;
    }
    if (r > 1e250) {
      throw Error(ErrorCode::NonConvergedQuadrature, "inversion tail does not decay in range");
    }
    const double x_eff = std::min(y_hi_, kDamping / (r * sin_t));
    double r_next = r * std::exp(log_step);
    if (x_eff > 0.0) r_next = std::min(r_next, r + 1.5 / (x_eff * cos_t));
    r_next = std::max(r_next, r * (1.0 + 1e-3));
    p.lo = std::log(r);
    p.hi = std::log(r_next);
    p.log_scale = true;
    add_panel(p);
    r = r_next;
  }
}

double RayInverter::envelope_at(double r, int* active) const {
  const double c = std::cos(theta_);
  double log_u = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < normalized_.size(); ++k) {
    const double lr = 2.0 * normalized_.lambdas()[k] * r;
    if (lr >= 1.0) ++m;
    const double zmin = c * std::max(1.0, lr);  // |1 - 2 i lambda t| >= zmin on the ray
    const double a = normalized_.shifts()[k];
    log_u += -0.5 * std::log(zmin) + 0.5 * a * a * (1.0 / zmin - 1.0);
  }
  if (active) *active = m;
  return std::exp(log_u);
}

double RayInverter::tail_bound(Kind kind, double y, const Panel& p) const {
  const double s = std::sin(theta_);
  const double r = p.r_start;
  const double u = p.envelope;
  const int m = p.active;
  const double damp = std::exp(-r * y * s);
  double bound = kInf;
  if (kind == Kind::Pdf) {
    // int_r^inf e^{-rho y s} |f| drho
    if (y > 0.0) bound = std::min(bound, u * damp / (y * s));
    if (m >= 3) bound = std::min(bound, u * damp * r / (0.5 * m - 1.0));
  } else {
    // int_r^inf |f| |1 - e^{-i t y}| / rho drho
    if (m >= 1) {
      double second = u * damp * 2.0 / m;
      if (y > 0.0 && r > 0.0) second = std::min(second, u * damp / (r * y * s));
      bound = u * 2.0 / m + second;
    }
  }
  return bound / kPi;
}

bool RayInverter::covers(double y) const {
  return y >= y_lo_ * (1.0 - 1e-12) && y <= y_hi_ * (1.0 + 1e-12);
}

Complex RayInverter::integrand(Kind kind, double y, const Panel& p, double v) const {
  const double r = p.log_scale ? std::exp(v) : v;
  const Complex t = r * direction_;
  const Complex jac = p.log_scale ? direction_ * r : direction_;
  const Complex f = std::exp(log_cf(normalized_, t)) * jac;
  const Complex w(y * t.imag(), -y * t.real());  // -i t y
  if (kind == Kind::Pdf) return f * std::exp(w);
  return f * (y * expm1_over(w));
}

Estimate RayInverter::evaluate(Kind kind, double y) const {
  const double eps_t = cfg_.eps_tail * scale_;
  const double eps_q = (kind == Kind::Pdf ? cfg_.eps_quad * scale_ : cfg_.eps_quad);

  struct PanelSum {
    Complex value;
    double error;
  };
  std::vector<PanelSum> sums;
  sums.reserve(panels_.size());
  double tail = tail_bound(kind, y, sentinel_);
  std::array<Complex, 15> terms;
  for (std::size_t p = 0; p < panels_.size(); ++p) {
    if (p > 0) {
      const double tb = tail_bound(kind, y, panels_[p]);
      if (tb <= eps_t) {
        tail = tb;
        break;
      }
    }
    Complex k(0.0), g(0.0);
    for (std::size_t j = 0; j < 15; ++j) {
      const std::size_t idx = 15 * p + j;
      const Complex t = nodes_t_[idx];
      const Complex w(y * t.imag(), -y * t.real());
      terms[j] = nodes_f_[idx] * (kind == Kind::Pdf ? std::exp(w) : y * expm1_over(w));
      k += weights_k_[idx] * terms[j];
      g += weights_g_[idx] * terms[j];
    }
    const double width = panels_[p].hi - panels_[p].lo;
    const Complex mean = k / width;
    double resasc = 0.0;
    for (std::size_t j = 0; j < 15; ++j) resasc += weights_k_[15 * p + j] * std::abs(terms[j] - mean);
    sums.push_back({k, quad::kronrod_error(std::abs(k - g), resasc)});
  }

  double err = 0.0;
  for (const auto& s : sums) err += s.error;
  if (err > eps_q) {
    // Refine only the panels that carry more than their share of the budget.
    const double share = 0.5 * eps_q / static_cast<double>(sums.size());
    for (std::size_t p = 0; p < sums.size(); ++p) {
      if (sums[p].error <= share) continue;
      const Panel& panel = panels_[p];
      auto g = [&](double v) { return integrand(kind, y, panel, v); };
      const auto r = quad::integrate(g, panel.lo, panel.hi, share, 2000, 2);
      sums[p] = {r.value, r.error};
    }
    err = 0.0;
    for (const auto& s : sums) err += s.error;
  }
  Complex total(0.0);
  for (const auto& s : sums) total += s.value;
  return {total.real() / kPi, err / kPi + tail};
}

Estimate RayInverter::pdf(double x) const {
  const double y = (x - offset_) / scale_;
  if (y < 0.0) return {0.0, 0.0};
  if (y == 0.0) {
    if (normalized_.size() >= 3) return {0.0, 0.0};
    throw Error(ErrorCode::InvalidConfig, "ray inversion needs x > offset for fewer than three terms");
  }
  if (!covers(y)) return RayInverter(with_offset(rescale(normalized_, scale_), offset_), x, x, cfg_).pdf(x);
  const Estimate e = evaluate(Kind::Pdf, y);
  return {e.value / scale_, e.error / scale_};
}

Estimate RayInverter::cdf(double x) const {
  const double y = (x - offset_) / scale_;
  if (y <= 0.0) return {0.0, 0.0};
  if (!covers(y)) return RayInverter(with_offset(rescale(normalized_, scale_), offset_), x, x, cfg_).cdf(x);
  return evaluate(Kind::Cdf, y);
}

// ---------------------------------------------------------------------------
// Point evaluation

Estimate pdf_estimate(const Spectrum& s, double x, const EvalConfig& cfg) {
  cfg.validate();
  const double y = x - s.offset();
  if (y < 0.0) return {0.0, 0.0};
  switch (s.size()) {
    case 1:
      return {single_term_pdf(s.lambdas()[0], s.shifts()[0], y), 0.0};
    case 2:
      return convolution_pdf(s, x, cfg.eps_quad);
    default:
      if (y == 0.0) return {0.0, 0.0};
      return RayInverter(s, x, x, cfg).pdf(x);
  }
}

double pdf_point(const Spectrum& s, double x, const EvalConfig& cfg) {
  return pdf_estimate(s, x, cfg).value;
}

Estimate cdf_estimate(const Spectrum& s, double x, const EvalConfig& cfg) {
  cfg.validate();
  const double y = x - s.offset();
  if (y <= 0.0) return {0.0, 0.0};
  if (s.size() == 1) return {single_term_cdf(s.lambdas()[0], s.shifts()[0], y), 0.0};
  return RayInverter(s, x, x, cfg).cdf(x);
}

double cdf_point(const Spectrum& s, double x, const EvalConfig& cfg) {
  return std::clamp(cdf_estimate(s, x, cfg).value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Analytic bounds used to certify the maximizer

namespace {

// Integrates a non-negative function of t over (0, inf) as a head panel on
// [0, t0] plus log-spaced panels, up to the point where `tail(T)` drops below
// `tol`.
template <class F, class Tail>
double half_line_integral(F&& g, Tail&& tail, double t0, double tol) {
  double total = quad::integrate(g, 0.0, t0, tol, 2000, 2).value;
  double hi = t0;
  double remainder = tail(hi);
  while (remainder > tol) {
    const double next = hi * 16.0;
    auto gl = [&](double u) {
      const double t = std::exp(u);
      return g(t) * t;
    };
    total += quad::integrate(gl, std::log(hi), std::log(next), tol, 2000, 8).value;
    hi = next;
    remainder = tail(hi);
    if (hi > 1e250) throw Error(ErrorCode::NonConvergedQuadrature, "half-line integral diverges");
  }
  return total + remainder;
}

}  // namespace

double density_lipschitz_bound(const Spectrum& s) {
  if (s.size() < 5) throw Error(ErrorCode::TooFewTerms, "Lipschitz bound needs n >= 5");
  double scale = 1.0;
  const Spectrum sn = normalized(s, scale);
  auto g = [&](double t) { return t * std::exp(-neg_log_cf_modulus(sn, t)); };
  auto tail = [&](double big_t) {
    double log_v = 0.0;
    int m = 0;
    for (double l : sn.lambdas()) {
      if (2.0 * l * big_t >= 1.0) {
        ++m;
        log_v -= 0.5 * std::log(2.0 * l * big_t);
      }
    }
    if (m < 5) return kInf;
    return std::exp(log_v) * big_t * big_t / (0.5 * m - 2.0);
  };
  const double integral = half_line_integral(g, tail, 0.5, 1e-10);
  return integral / kPi / (scale * scale);
}

double inversion_upper_bound(const Spectrum& s) {
  if (s.size() < 3) throw Error(ErrorCode::TooFewTerms, "inversion bound needs n >= 3");
  double scale = 1.0;
  const Spectrum sn = normalized(s, scale);
  auto g = [&](double t) { return std::exp(-neg_log_cf_modulus(sn, t)); };
  auto tail = [&](double big_t) {
    double log_v = 0.0;
    int m = 0;
    for (double l : sn.lambdas()) {
      if (2.0 * l * big_t >= 1.0) {
        ++m;
        log_v -= 0.5 * std::log(2.0 * l * big_t);
      }
    }
    if (m < 3) return kInf;
    return std::exp(log_v) * big_t / (0.5 * m - 1.0);
  };
  return half_line_integral(g, tail, 0.5, 1e-10) / kPi / scale;
}

double density_tail_bound(const Spectrum& s, double x) {
  if (s.size() < 3) throw Error(ErrorCode::TooFewTerms, "contour shift bound needs n >= 3");
  double scale = 1.0;
  const Spectrum sn = normalized(s, scale);
  const double c = 0.25 / sn.largest();
  auto g = [&](double u) { return std::exp(log_cf(sn, Complex(u, -c)).real()); };
  auto tail = [&](double big_u) {
    double log_v = 0.0;
    int m = 0;
    for (std::size_t k = 0; k < sn.size(); ++k) {
      const double l = sn.lambdas()[k];
      const double a = sn.shifts()[k];
      const double floor = 1.0 - 2.0 * l * c;
      const double zmin = std::max(floor, 2.0 * l * big_u);
      if (2.0 * l * big_u >= floor) ++m;
      log_v += -0.5 * std::log(zmin) + 0.5 * a * a * (1.0 / zmin - 1.0);
    }
    if (m < 3) return kInf;
    return std::exp(log_v) * big_u / (0.5 * m - 1.0);
  };
  const double k = half_line_integral(g, tail, 1.0, 1e-12 * std::max(1.0, g(0.0))) / kPi;
  const double y = std::max((x - s.offset()) / scale, 0.0);
  return std::exp(-c * y) * k / scale;
}

// ---------------------------------------------------------------------------
// Maximization

namespace {

struct Probe {
  double x = 0.0;
  Estimate p;
};

template <class Pdf>
Probe golden_max(Pdf&& pdf, Probe a, Probe b, double tol, double& worst_error) {
  constexpr double kInvPhi = 0.6180339887498949;
  Probe best = a.p.value >= b.p.value ? a : b;
  auto eval = [&](double x) {
    Probe pr{x, pdf(x)};
    worst_error = std::max(worst_error, pr.p.error);
    if (pr.p.value > best.p.value) best = pr;
    return pr;
  };
  double lo = a.x;
  double hi = b.x;
  Probe c = eval(hi - kInvPhi * (hi - lo));
  Probe d = eval(lo + kInvPhi * (hi - lo));
  while (hi - lo > tol) {
    if (c.p.value >= d.p.value) {
      hi = d.x;
      d = c;
      c = eval(hi - kInvPhi * (hi - lo));
    } else {
      lo = c.x;
      c = d;
      d = eval(lo + kInvPhi * (hi - lo));
    }
  }
  return best;
}

enum class GapMethod { Lipschitz, Halving };

template <class Pdf>
DensityMax scan_maximum(Pdf&& pdf, double x0, double x1, const EvalConfig& cfg, double sd,
                        GapMethod method, double lipschitz) {
  const int n = cfg.grid_points;
  const double h = (x1 - x0) / (n - 1);
  std::vector<Probe> grid(static_cast<std::size_t>(n));
  double worst_error = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = (j == n - 1) ? x1 : x0 + h * j;
    grid[j] = {x, pdf(x)};
    worst_error = std::max(worst_error, grid[j].p.error);
  }

  auto local_maxima = [&](const std::vector<Probe>& g) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double v = g[j].p.value;
      const bool left = j == 0 || v >= g[j - 1].p.value;
      const bool right = j + 1 == g.size() || v >= g[j + 1].p.value;
      if (left && right) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return g[i].p.value > g[j].p.value; });
    if (idx.size() > 3) idx.resize(3);
    return idx;
  };

  const double tol = cfg.refine_tol * sd;
  Probe best = grid[0];
  std::vector<char> refined(static_cast<std::size_t>(n), 0);
  auto refine_around = [&](std::size_t j) {
    const std::size_t lo = j == 0 ? 0 : j - 1;
    const std::size_t hi = std::min<std::size_t>(j + 1, grid.size() - 1);
    for (std::size_t q = lo; q <= hi; ++q) refined[q] = 1;
    Probe p = golden_max(pdf, grid[lo], grid[hi], tol, worst_error);
    if (grid[j].p.value > p.p.value) p = grid[j];
    if (p.p.value > best.p.value) best = p;
  };
  for (std::size_t j : local_maxima(grid)) refine_around(j);

  double gap = 0.0;
  if (method == GapMethod::Lipschitz) {
    // Bisect the cells whose Lipschitz envelope still clears the incumbent,
    // worst first, until the excess is negligible or the budget runs out.
    struct Cell {
      Probe a, b;
      double bound(double l) const {
        return 0.5 * (a.p.value + b.p.value) + 0.5 * l * (b.x - a.x);
      }
    };
    auto lower = [&](const Cell& u, const Cell& v) { return u.bound(lipschitz) < v.bound(lipschitz); };
    std::priority_queue<Cell, std::vector<Cell>, decltype(lower)> cells(lower);
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      if (refined[j] && refined[j + 1]) continue;
      cells.push({grid[j], grid[j + 1]});
    }
    const double target = 1e-7 * best.p.value;
    for (int budget = 2000; !cells.empty() && budget > 0; --budget) {
      const Cell c = cells.top();
      if (c.bound(lipschitz) - best.p.value <= target) break;
      cells.pop();
      const double xm = 0.5 * (c.a.x + c.b.x);
      const Probe m{xm, pdf(xm)};
      worst_error = std::max(worst_error, m.p.error);
      if (m.p.value > best.p.value) best = m;
      cells.push({c.a, m});
      cells.push({m, c.b});
    }
    if (!cells.empty()) gap = cells.top().bound(lipschitz) - best.p.value;
  } else {
    double coarse_max = 0.0;
    for (const auto& g : grid) coarse_max = std::max(coarse_max, g.p.value);
    double fine_max = coarse_max;
    std::size_t fine_arg = 0;
    bool found_higher = false;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      const double xm = 0.5 * (grid[j].x + grid[j + 1].x);
      const Estimate e = pdf(xm);
      worst_error = std::max(worst_error, e.error);
      if (e.value > fine_max) {
        fine_max = e.value;
        fine_arg = j;
        found_higher = e.value > best.p.value;
      }
    }
    if (found_higher) {
      Probe p = golden_max(pdf, grid[fine_arg], grid[fine_arg + 1], tol, worst_error);
      if (p.p.value > best.p.value) best = p;
    }
    gap = std::max(0.0, fine_max - coarse_max);
  }

  DensityMax out;
  out.kind = MaxKind::Finite;
  out.argmax = best.x;
  out.value = best.p.value;
  out.quadrature_error = worst_error;
  out.grid_error = std::max(gap, 0.0);
  return out;
}

}  // namespace

DensityMax density_max(const Spectrum& s, const EvalConfig& cfg) {
  cfg.validate();
  const double off = s.offset();
  if (s.size() == 1) return DensityMax::unbounded(off);

  if (s.size() == 2 && s.is_central()) {
    DensityMax m;
    m.argmax = off;
    m.value = 1.0 / (2.0 * std::sqrt(s.lambdas()[0] * s.lambdas()[1]));
    return m;
  }

  const DerivedStats st = derived_stats(s);
  const double sd = st.stddev();
  const double x1 = st.mean + cfg.bracket_sigmas * sd;
  const double h = (x1 - off) / (cfg.grid_points - 1);

  DensityMax m;
  if (s.size() == 2) {
    auto pdf = [&](double x) { return convolution_pdf(s, x, cfg.eps_quad); };
    m = scan_maximum(pdf, off, x1, cfg, sd, GapMethod::Halving, 0.0);
    const auto& l = s.lambdas();
    const auto& a = s.shifts();
    const double y = 0.5 * (x1 - off);
    const double beyond =
        single_term_sup_beyond(l[0], a[0], y) + single_term_sup_beyond(l[1], a[1], y);
    m.bracket_error = std::max(0.0, beyond - m.value);
  } else {
    const RayInverter inv(s, off + 0.5 * h, x1, cfg);
    auto pdf = [&](double x) { return inv.pdf(x); };
    if (s.size() >= 5) {
      m = scan_maximum(pdf, off, x1, cfg, sd, GapMethod::Lipschitz, density_lipschitz_bound(s));
    } else {
      m = scan_maximum(pdf, off, x1, cfg, sd, GapMethod::Halving, 0.0);
    }
    m.bracket_error = std::max(0.0, density_tail_bound(s, x1) - m.value);
  }
  m.certified_error = m.quadrature_error + m.grid_error + m.bracket_error;
  return m;
}

}  // namespace chi2w
