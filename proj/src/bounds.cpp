#include "chi2w/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "chi2w/error.hpp"

namespace chi2w {

namespace constants {
double theorem1_lower() {
  return 1.0 / (4.0 * std::exp(2.0) * std::sqrt(2.0 * std::numbers::pi));
}
double theorem1_upper() { return 2.0 / std::sqrt(std::numbers::pi); }
double theorem2_lower() { return 1.0 / (4.0 * std::sqrt(3.0)); }
}  // namespace constants

BoundPair theorem1_bounds(const DerivedStats& stats, std::size_t n, bool central) {
  if (!central) throw Error(ErrorCode::NotApplicable, "theorem 1 bounds need all shifts zero");
  if (n < 2 || !(stats.a2 > 0.0)) {
    throw Error(ErrorCode::NotApplicable, "A2 = 0: a single term has an unbounded density");
  }
  const double base = std::pow(stats.a1 * stats.a2, -0.25);
  return {constants::theorem1_lower() * base, constants::theorem1_upper() * base};
}

bool theorem2_hypothesis(const DerivedStats& stats, double lambda1) {
  return lambda1 * lambda1 <= stats.a1 / 3.0 * (1.0 + 1e-12);
}

BoundPair theorem2_bounds(const DerivedStats& stats, double lambda1) {
  const double base = 1.0 / std::sqrt(stats.a1 + stats.b1);
  BoundPair out{constants::theorem2_lower() * base, std::nullopt};
  if (theorem2_hypothesis(stats, lambda1)) out.upper = constants::theorem2_upper * base;
  return out;
}

double statulyavichus_lower(double variance) {
  if (!(variance > 0.0)) throw Error(ErrorCode::NonPositiveVariance, "variance must be positive");
  return 1.0 / std::sqrt(12.0 * variance);
}

std::optional<double> lemma3_upper(const Spectrum& s) {
  if (!s.is_central()) return std::nullopt;
  const double a1 = derived_stats(s).a1;
  const double alpha2 = s.largest() * s.largest() / a1;
  constexpr double slack = 1.0 + 1e-12;
  if (alpha2 <= 0.25 * slack) return constants::lemma3_quarter / std::sqrt(a1);
  if (alpha2 <= slack / 3.0) return constants::lemma3_third / std::sqrt(a1);
  return std::nullopt;
}

Outcome classify(double margin, double certified_error) {
  if (margin >= 0.0) return Outcome::Pass;
  if (margin >= -certified_error) return Outcome::Inconclusive;
  return Outcome::Fail;
}

bool BoundReport::has_failure() const {
  for (const auto& e : entries)
    if (e.outcome == Outcome::Fail) return true;
  return false;
}

const BoundEntry* BoundReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

BoundEntry make_entry(std::string name, BoundKind kind, std::optional<double> value,
                      std::string hypothesis, const DensityMax& measured) {
  BoundEntry e;
  e.name = std::move(name);
  e.kind = kind;
  e.value = value;
  e.applicable = value.has_value();
  e.hypothesis = std::move(hypothesis);
  if (!e.applicable) {
    e.outcome = Outcome::NotApplicable;
    return e;
  }
  if (!measured.finite()) {
    // An unbounded density sits above every lower bound and violates every
    // finite upper bound.
    e.outcome = kind == BoundKind::Lower ? Outcome::Pass : Outcome::Fail;
    return e;
  }
  const double margin = kind == BoundKind::Lower ? measured.value - *value : *value - measured.value;
  e.margin = margin;
  e.outcome = classify(margin, measured.certified_error);
  return e;
}

}  // namespace

BoundReport build_report(const Spectrum& s, const DensityMax& measured) {
  BoundReport r{s, derived_stats(s), measured, {}};
  const DerivedStats& st = r.stats;

  std::optional<double> t1_lo, t1_hi;
  if (s.is_central() && s.size() >= 2 && st.a2 > 0.0) {
    const BoundPair p = theorem1_bounds(st, s.size(), true);
    t1_lo = p.lower;
    t1_hi = p.upper;
  }
  const std::string t1_hyp = "central (all shifts zero) and n >= 2";
  r.entries.push_back(make_entry("theorem1.lower", BoundKind::Lower, t1_lo, t1_hyp, measured));
  r.entries.push_back(make_entry("theorem1.upper", BoundKind::Upper, t1_hi, t1_hyp, measured));

  const BoundPair t2 = theorem2_bounds(st, s.largest());
  r.entries.push_back(make_entry("theorem2.lower", BoundKind::Lower, t2.lower, "none", measured));
  r.entries.push_back(
      make_entry("theorem2.upper", BoundKind::Upper, t2.upper, "lambda_1^2 <= A1/3 (relative slack 1e-12)", measured));

  r.entries.push_back(make_entry("lemma1.lower", BoundKind::Lower,
                                 statulyavichus_lower(st.variance), "none", measured));
  r.entries.push_back(make_entry("lemma3.upper", BoundKind::Upper, lemma3_upper(s),
                                 "central and max alpha_k^2 <= 1/3 (0.723) or <= 1/4 (0.5)",
                                 measured));

  std::optional<double> inversion;
  if (s.size() >= 3) inversion = inversion_upper_bound(s);
  r.entries.push_back(make_entry("inversion.upper", BoundKind::Upper, inversion,
                                 "n >= 3; M <= (1/pi) int_0^inf |f(t)| dt", measured));
  return r;
}

BoundReport build_report(const Spectrum& s, const EvalConfig& cfg) {
  return build_report(s, density_max(s, cfg));
}

std::string_view to_string(BoundKind kind) { return kind == BoundKind::Lower ? "lower" : "upper"; }

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Pass: return "pass";
    case Outcome::Inconclusive: return "inconclusive";
    case Outcome::Fail: return "fail";
    case Outcome::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

}  // namespace chi2w
