#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chi2w/bounds.hpp"
#include "chi2w/density.hpp"
#include "chi2w/spectrum.hpp"

namespace chi2w {

enum class WeightLaw { Equal, PolynomialDecay, ExponentialDecay, DirichletRandom, Mixed };
enum class ShiftLaw { Zero, Gaussian };
enum class SweepConstraint { None, Theorem2Hypothesis, Theorem2Violated };

struct SweepSpec {
  int count = 1;
  int n_min = 3;
  int n_max = 50;
  WeightLaw weight_law = WeightLaw::Mixed;
  double weight_param = 1.0;  // exponent or rate; ignored for other laws
  ShiftLaw shift_law = ShiftLaw::Zero;
  double shift_scale = 1.0;
  SweepConstraint constraint = SweepConstraint::None;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Parsers for the CLI spellings: "equal", "poly:2", "exp:0.3", "dirichlet",
/// "mixed"; "zero", "gaussian:1"; "none", "theorem2-hypothesis",
/// "theorem2-violated".
void parse_weight_law(const std::string& text, SweepSpec& spec);
void parse_shift_law(const std::string& text, SweepSpec& spec);
SweepConstraint parse_constraint(const std::string& text);

/// Spectrum number `index` of the sweep; depends only on (spec, index).
Spectrum sweep_spectrum(const SweepSpec& spec, int index);

struct SweepItem {
  int index = 0;
  std::optional<BoundReport> report;
  std::string error;  // non-empty when evaluation threw
};

struct OutcomeCounts {
  int pass = 0;
  int inconclusive = 0;
  int fail = 0;
  int not_applicable = 0;
};

struct SweepSummary {
  std::vector<SweepItem> items;
  std::map<std::string, OutcomeCounts> counts;  // per bound name
  int errors = 0;

  bool has_failure() const;
};

/// Builds every spectrum, evaluates its report, and tallies outcomes. Items
/// are ordered by index regardless of completion order.
SweepSummary run_sweep(const SweepSpec& spec, const EvalConfig& cfg);

}  // namespace chi2w
