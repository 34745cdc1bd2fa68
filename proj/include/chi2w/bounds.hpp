#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chi2w/density.hpp"
#include "chi2w/spectrum.hpp"

namespace chi2w {

namespace constants {
// 1 / (4 e^2 sqrt(2 pi))
double theorem1_lower();
// 2 / sqrt(pi)
double theorem1_upper();
// 1 / (4 sqrt(3))
double theorem2_lower();
inline constexpr double theorem2_upper = 2.0;
inline constexpr double lemma3_quarter = 0.5;    // all alpha_k^2 <= 1/4
inline constexpr double lemma3_third = 0.723;    // all alpha_k^2 <= 1/3
}  // namespace constants

struct BoundPair {
  double lower = 0.0;
  std::optional<double> upper;
};

/// c0 (A1 A2)^{-1/4} <= M <= c1 (A1 A2)^{-1/4} for central sums with n >= 2.
/// Throws NotApplicable for shifted sums or A2 = 0.
BoundPair theorem1_bounds(const DerivedStats& stats, std::size_t n, bool central);

/// lambda_1^2 <= A1 / 3, with a 1e-12 relative allowance so that exact ties
/// (three equal weights) survive rounding.
bool theorem2_hypothesis(const DerivedStats& stats, double lambda1);

/// Lower (A1 + B1)^{-1/2} / (4 sqrt 3) always; upper 2 (A1 + B1)^{-1/2} only
/// when lambda_1^2 <= A1 / 3.
BoundPair theorem2_bounds(const DerivedStats& stats, double lambda1);

/// (12 Var)^{-1/2}; any density satisfies M^2 Var >= 1/12.
double statulyavichus_lower(double variance);

/// 0.5 / sqrt(A1) when every alpha_k^2 = lambda_k^2 / A1 <= 1/4, 0.723 / sqrt(A1)
/// when every alpha_k^2 <= 1/3, otherwise nothing. Central sums only.
std::optional<double> lemma3_upper(const Spectrum& s);

enum class BoundKind { Lower, Upper };
enum class Outcome { Pass, Inconclusive, Fail, NotApplicable };

struct BoundEntry {
  std::string name;
  BoundKind kind = BoundKind::Lower;
  std::optional<double> value;
  bool applicable = false;
  std::string hypothesis;
  std::optional<double> margin;  // empty when the measured maximum is unbounded
  Outcome outcome = Outcome::NotApplicable;
};

struct BoundReport {
  Spectrum spectrum;
  DerivedStats stats;
  DensityMax measured;
  std::vector<BoundEntry> entries;

  bool has_failure() const;
  const BoundEntry* find(const std::string& name) const;
};

/// Classifies a signed margin against the measurement's certified error.
Outcome classify(double margin, double certified_error);

BoundReport build_report(const Spectrum& s, const EvalConfig& cfg = {});

/// Report from an already computed maximum.
BoundReport build_report(const Spectrum& s, const DensityMax& measured);

std::string_view to_string(BoundKind kind);
std::string_view to_string(Outcome outcome);

}  // namespace chi2w
