#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chi2w/bounds.hpp"
#include "chi2w/density.hpp"
#include "chi2w/error.hpp"
#include "chi2w/io.hpp"
#include "chi2w/oracle.hpp"
#include "chi2w/spectrum.hpp"
#include "chi2w/sweep.hpp"

using namespace chi2w;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergedQuadrature:
      return kExitNumeric;
    default:
      return kExitInput;
  }
}

struct Grid {
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

Grid parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = text.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw Error(ErrorCode::ParseError, "grid must look like lo:hi:count, got '" + text + "'");
  }
  Grid g;
  g.lo = io::parse_real(text.substr(0, a));
  g.hi = io::parse_real(text.substr(a + 1, b - a - 1));
  const double n = io::parse_real(text.substr(b + 1));
  if (n < 1 || n != std::floor(n) || n > 1e7) {
    throw Error(ErrorCode::ParseError, "grid count must be a positive integer");
  }
  g.count = static_cast<int>(n);
  if (g.count > 1 && !(g.hi > g.lo)) throw Error(ErrorCode::ParseError, "grid needs lo < hi");
  return g;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  auto as_int = [&](std::string_view v) {
    const double d = io::parse_real(v);
    if (d != std::floor(d)) throw Error(ErrorCode::ParseError, "range bounds must be integers");
    return static_cast<int>(d);
  };
  if (colon == std::string::npos) {
    const int v = as_int(text);
    return {v, v};
  }
  return {as_int(std::string_view(text).substr(0, colon)),
          as_int(std::string_view(text).substr(colon + 1))};
}

void add_config_flags(CLI::App* cmd, EvalConfig& cfg) {
  cmd->add_option("--eps-quad", cfg.eps_quad, "Absolute quadrature error target")->capture_default_str();
  cmd->add_option("--eps-tail", cfg.eps_tail, "Truncation error target")->capture_default_str();
  cmd->add_option("--grid-points", cfg.grid_points, "Scan points for the maximum search")
      ->capture_default_str();
  cmd->add_option("--bracket-sigmas", cfg.bracket_sigmas,
                  "Scan window is [offset, mean + this many standard deviations]")
      ->capture_default_str();
  cmd->add_option("--refine-tol", cfg.refine_tol, "Argmax tolerance relative to the standard deviation")
      ->capture_default_str();
}

std::string num(double v) { return io::format_real(v); }

int run_density(const std::string& path, const std::string& grid_text, const EvalConfig& cfg) {
  const Spectrum s = io::read_spectrum_file(path);
  const Grid g = parse_grid(grid_text);
  cfg.validate();
  std::vector<double> xs(static_cast<std::size_t>(g.count));
  for (int j = 0; j < g.count; ++j) {
    xs[j] = g.count == 1 ? g.lo : (j + 1 == g.count ? g.hi : g.lo + (g.hi - g.lo) * j / (g.count - 1));
  }
  std::ostringstream out;
  out << "x,pdf,cdf\n";
  if (s.size() >= 3) {
    // One inverter covers every grid point right of the offset.
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (double x : xs) {
      if (x <= s.offset()) continue;
      lo = any ? std::min(lo, x) : x;
      hi = any ? std::max(hi, x) : x;
      any = true;
    }
    std::optional<RayInverter> inv;
    if (any) inv.emplace(s, lo, hi, cfg);
    for (double x : xs) {
      double p = 0.0, f = 0.0;
      if (x > s.offset()) {
        p = inv->pdf(x).value;
        f = std::clamp(inv->cdf(x).value, 0.0, 1.0);
      }
      out << num(x) << ',' << num(p) << ',' << num(f) << '\n';
    }
  } else {
    for (double x : xs) out << num(x) << ',' << num(pdf_point(s, x, cfg)) << ',' << num(cdf_point(s, x, cfg)) << '\n';
  }
  std::cout << out.str();
  return 0;
}

void warn_inconclusive(const BoundReport& r) {
  for (const auto& e : r.entries) {
    if (e.outcome == Outcome::Inconclusive) {
      std::cerr << "warning: " << e.name << " is inconclusive (margin " << num(*e.margin)
                << " within certified error " << num(r.measured.certified_error) << ")\n";
    }
  }
}

int run_bounds(const std::string& path, const EvalConfig& cfg) {
  const Spectrum s = io::read_spectrum_file(path);
  const BoundReport r = build_report(s, cfg);
  std::cout << io::to_json(r).dump(2) << '\n';
  warn_inconclusive(r);
  return r.has_failure() ? kExitFail : 0;
}

int run_verify(const SweepSpec& spec, const EvalConfig& cfg) {
  const SweepSummary sum = run_sweep(spec, cfg);
  std::cerr << std::left << std::setw(18) << "bound" << std::right << std::setw(8) << "pass"
            << std::setw(14) << "inconclusive" << std::setw(8) << "fail" << std::setw(16)
            << "not-applicable" << '\n';
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [name, c] : sum.counts) {
    std::cerr << std::left << std::setw(18) << name << std::right << std::setw(8) << c.pass
              << std::setw(14) << c.inconclusive << std::setw(8) << c.fail << std::setw(16)
              << c.not_applicable << '\n';
    counts[name] = {{"pass", c.pass},
                    {"inconclusive", c.inconclusive},
                    {"fail", c.fail},
                    {"not-applicable", c.not_applicable}};
  }
  if (sum.errors > 0) std::cerr << sum.errors << " spectra could not be evaluated\n";

  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& item : sum.items) {
    nlohmann::ordered_json j{{"index", item.index}};
    if (item.report) {
      j["report"] = io::to_json(*item.report);
    } else {
      j["error"] = item.error;
    }
    items.push_back(std::move(j));
  }
  const nlohmann::ordered_json doc{{"schema", "chi2w-verify/1"},
                           {"count", spec.count},
                           {"seed", spec.seed},
                           {"counts", counts},
                           {"errors", sum.errors},
                           {"items", items}};
  std::cout << doc.dump(2) << '\n';
  return sum.has_failure() ? kExitFail : (sum.errors > 0 ? kExitNumeric : 0);
}

int run_decompose(const std::string& cov_path, const std::string& mean_path) {
  const SymmetricMatrix cov = io::to_matrix(io::read_numeric_csv_file(cov_path));
  std::vector<double> mean(cov.dim, 0.0);
  if (!mean_path.empty()) {
    mean.clear();
    for (const auto& row : io::read_numeric_csv_file(mean_path)) mean.insert(mean.end(), row.begin(), row.end());
  }
  io::write_spectrum(std::cout, decompose_gaussian(cov, mean));
  return 0;
}

int run_sample(const std::string& path, std::size_t n, std::uint64_t seed) {
  const Spectrum s = io::read_spectrum_file(path);
  std::string out;
  out.reserve(n * 20);
  for (double w : sample(s, n, seed)) {
    out += num(w);
    out += '\n';
  }
  std::cout << out;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density maximum and bounds for weighted sums of chi-square variables"};
  app.require_subcommand(1);
  app.footer(
      "Spectrum files are CSV with header `lambda,shift` and an optional `# offset=<real>` line.\n"
      "Exit codes: 0 ok (inconclusive bounds only warn), 1 bound violated, 2 bad input, 3 numerical failure.\n"
      "CHI2W_THREADS caps the number of worker threads.");

  EvalConfig cfg;
  std::string spectrum_path, grid = "0:10:101";

  auto* density = app.add_subcommand("density", "Tabulate pdf and cdf as CSV rows x,pdf,cdf");
  density->add_option("--spectrum", spectrum_path, "Spectrum CSV")->required();
  density->add_option("--x", grid, "Grid lo:hi:count")->capture_default_str();
  add_config_flags(density, cfg);

  auto* bounds = app.add_subcommand("bounds", "Density maximum and every bound, as a JSON report");
  bounds->add_option("--spectrum", spectrum_path, "Spectrum CSV")->required();
  add_config_flags(bounds, cfg);

  SweepSpec spec;
  std::string n_range = "3:50", weights = "mixed", shifts = "zero", constraint = "none";
  auto* verify = app.add_subcommand("verify", "Random sweep; table on stderr, JSON on stdout");
  verify->add_option("--count", spec.count, "Number of spectra")->capture_default_str();
  verify->add_option("--n", n_range, "Range of n as min:max")->capture_default_str();
  verify->add_option("--weights", weights, "equal | poly:<exponent> | exp:<rate> | dirichlet | mixed")
      ->capture_default_str();
  verify->add_option("--shifts", shifts, "zero | gaussian:<scale>")->capture_default_str();
  verify->add_option("--constraint", constraint, "none | theorem2-hypothesis | theorem2-violated")
      ->capture_default_str();
  verify->add_option("--seed", spec.seed, "Sweep seed")->capture_default_str();
  add_config_flags(verify, cfg);

  std::string cov_path, mean_path;
  auto* decompose = app.add_subcommand(
      "decompose",
      "Spectrum of |Y|^2 for Y ~ N(mean, cov). Eigenvalues below 1e-12 * max|cov| * d count as zero; "
      "their mean components move into the offset");
  decompose->add_option("--cov", cov_path, "d x d covariance CSV")->required();
  decompose->add_option("--mean", mean_path, "Mean CSV with d values (default zero)");

  std::size_t sample_count = 100000;
  std::uint64_t seed = 0;
  auto* sampler = app.add_subcommand("sample", "Monte Carlo draws as a single-column CSV");
  sampler->add_option("--spectrum", spectrum_path, "Spectrum CSV")->required();
  sampler->add_option("--n", sample_count, "Number of draws")->capture_default_str();
  sampler->add_option("--seed", seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*density) return run_density(spectrum_path, grid, cfg);
    if (*bounds) return run_bounds(spectrum_path, cfg);
    if (*verify) {
      const auto [lo, hi] = parse_range(n_range);
      spec.n_min = lo;
      spec.n_max = hi;
      parse_weight_law(weights, spec);
      parse_shift_law(shifts, spec);
      spec.constraint = parse_constraint(constraint);
      return run_verify(spec, cfg);
    }
    if (*decompose) return run_decompose(cov_path, mean_path);
    if (*sampler) return run_sample(spectrum_path, sample_count, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
