#include "chi2w/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>

#include "chi2w/error.hpp"
#include "chi2w/io.hpp"
#include "chi2w/parallel.hpp"

namespace chi2w {

void SweepSpec::validate() const {
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "count must be at least 1");
  if (n_min < 1 || n_max > 10000 || n_min > n_max) {
    throw Error(ErrorCode::InvalidConfig, "n range must satisfy 1 <= n_min <= n_max <= 10000");
  }
  if (!std::isfinite(weight_param) || weight_param <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "weight law parameter must be positive");
  }
  if (!std::isfinite(shift_scale) || shift_scale < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "shift scale must be non-negative");
  }
}

namespace {

std::pair<std::string_view, std::optional<double>> split_param(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {text, std::nullopt};
  return {text.substr(0, colon), io::parse_real(text.substr(colon + 1))};
}

[[noreturn]] void bad(const std::string& what, const std::string& text) {
  throw Error(ErrorCode::InvalidConfig, "unknown " + what + " '" + text + "'");
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    engine_.seed(z ^ (z >> 31));
  }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double open_uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    return std::sqrt(-2.0 * std::log(open_uniform())) * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<double> weights(WeightLaw law, double param, int n, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(n));
  switch (law) {
    case WeightLaw::Equal:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case WeightLaw::PolynomialDecay:
      for (int k = 0; k < n; ++k) w[k] = std::pow(k + 1.0, -param);
      break;
    case WeightLaw::ExponentialDecay:
      for (int k = 0; k < n; ++k) w[k] = std::exp(-param * k);
      break;
    case WeightLaw::DirichletRandom:
      // Gamma(4) draws: normalised, these stay near equal.
      for (auto& v : w) {
        v = -std::log(rng.open_uniform() * rng.open_uniform() * rng.open_uniform() *
                      rng.open_uniform());
      }
      break;
    case WeightLaw::Mixed:
      switch (rng.integer(0, 3)) {
        case 0: return weights(WeightLaw::Equal, 1.0, n, rng);
        case 1: return weights(WeightLaw::PolynomialDecay, rng.uniform(0.25, 2.0), n, rng);
        case 2: return weights(WeightLaw::ExponentialDecay, rng.uniform(0.02, 1.0), n, rng);
        default: return weights(WeightLaw::DirichletRandom, 1.0, n, rng);
      }
  }
  return w;
}

bool accepts(SweepConstraint c, const Spectrum& s) {
  if (c == SweepConstraint::None) return true;
  const bool hyp = theorem2_hypothesis(derived_stats(s), s.largest());
  return c == SweepConstraint::Theorem2Hypothesis ? hyp : !hyp;
}

}  // namespace

void parse_weight_law(const std::string& text, SweepSpec& spec) {
  const auto [name, param] = split_param(text);
  if (name == "equal") {
    spec.weight_law = WeightLaw::Equal;
  } else if (name == "poly") {
    spec.weight_law = WeightLaw::PolynomialDecay;
    spec.weight_param = param.value_or(1.0);
  } else if (name == "exp") {
    spec.weight_law = WeightLaw::ExponentialDecay;
    spec.weight_param = param.value_or(0.3);
  } else if (name == "dirichlet") {
    spec.weight_law = WeightLaw::DirichletRandom;
  } else if (name == "mixed") {
    spec.weight_law = WeightLaw::Mixed;
  } else {
    bad("weight law", text);
  }
}

void parse_shift_law(const std::string& text, SweepSpec& spec) {
  const auto [name, param] = split_param(text);
  if (name == "zero") {
    spec.shift_law = ShiftLaw::Zero;
  } else if (name == "gaussian") {
    spec.shift_law = ShiftLaw::Gaussian;
    spec.shift_scale = param.value_or(1.0);
  } else {
    bad("shift law", text);
  }
}

SweepConstraint parse_constraint(const std::string& text) {
  if (text == "none") return SweepConstraint::None;
  if (text == "theorem2-hypothesis") return SweepConstraint::Theorem2Hypothesis;
  if (text == "theorem2-violated") return SweepConstraint::Theorem2Violated;
  bad("constraint", text);
}

Spectrum sweep_spectrum(const SweepSpec& spec, int index) {
  spec.validate();
  Rng rng(spec.seed, static_cast<std::uint64_t>(index));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const int n = rng.integer(spec.n_min, spec.n_max);
    std::vector<double> w = weights(spec.weight_law, spec.weight_param, n, rng);
    const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    for (auto& v : w) v *= scale;
    std::vector<double> shifts(w.size(), 0.0);
    if (spec.shift_law == ShiftLaw::Gaussian) {
      for (auto& a : shifts) a = spec.shift_scale * rng.normal();
    }
    Spectrum s = validate_spectrum(std::move(w), std::move(shifts));
    if (accepts(spec.constraint, s)) return s;
  }
  throw Error(ErrorCode::InvalidConfig, "no spectrum satisfying the constraint after 10000 draws");
}

bool SweepSummary::has_failure() const {
  for (const auto& [name, c] : counts)
    if (c.fail > 0) return true;
  return false;
}

SweepSummary run_sweep(const SweepSpec& spec, const EvalConfig& cfg) {
  spec.validate();
  cfg.validate();
  SweepSummary out;
  out.items.resize(static_cast<std::size_t>(spec.count));
  parallel_for(spec.count, [&](int i) {
    SweepItem& item = out.items[static_cast<std::size_t>(i)];
    item.index = i;
    try {
      item.report = build_report(sweep_spectrum(spec, i), cfg);
    } catch (const std::exception& e) {
      item.error = e.what();
    }
  });
  for (const auto& item : out.items) {
    if (!item.report) {
      ++out.errors;
      continue;
    }
    for (const auto& e : item.report->entries) {
      OutcomeCounts& c = out.counts[e.name];
      switch (e.outcome) {
        case Outcome::Pass: ++c.pass; break;
        case Outcome::Inconclusive: ++c.inconclusive; break;
        case Outcome::Fail: ++c.fail; break;
        case Outcome::NotApplicable: ++c.not_applicable; break;
      }
    }
  }
  return out;
}

}  // namespace chi2w
