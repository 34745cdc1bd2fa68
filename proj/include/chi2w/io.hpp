#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chi2w/bounds.hpp"
#include "chi2w/spectrum.hpp"

namespace chi2w::io {

inline constexpr const char* kReportSchema = "chi2w-report/1";

/// Spectrum CSV: header `lambda,shift`, one row per component, optional
/// `# offset=<real>` comment line. Numbers parse with from_chars, so the
/// decimal point never depends on the locale.
Spectrum read_spectrum(std::istream& in);
Spectrum read_spectrum_file(const std::string& path);
void write_spectrum(std::ostream& out, const Spectrum& s);

/// Parses a real with from_chars; throws ParseError.
double parse_real(std::string_view text);

/// Numeric CSV without header; blank lines and `#` comments are skipped.
std::vector<std::vector<double>> read_numeric_csv(std::istream& in);
std::vector<std::vector<double>> read_numeric_csv_file(const std::string& path);

/// Square matrix from CSV rows; throws ParseError when not d x d.
SymmetricMatrix to_matrix(const std::vector<std::vector<double>>& rows);

/// Shortest round-trip text for a double.
std::string format_real(double v);

nlohmann::ordered_json to_json(const Spectrum& s);
nlohmann::ordered_json to_json(const DerivedStats& s);
nlohmann::ordered_json to_json(const DensityMax& m);
nlohmann::ordered_json to_json(const BoundEntry& e);
nlohmann::ordered_json to_json(const BoundReport& r);

}  // namespace chi2w::io
