#include "chi2w/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "chi2w/error.hpp"

namespace chi2w::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(',');
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return out;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return in;
}

}  // namespace

double parse_real(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

Spectrum read_spectrum(std::istream& in) {
  std::vector<double> lambdas, shifts;
  std::optional<double> offset;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    if (row.front() == '#') {
      row.remove_prefix(1);
      row = trim(row);
      if (row.starts_with("offset")) {
        row.remove_prefix(6);
        row = trim(row);
        if (row.empty() || row.front() != '=') {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad offset line");
        }
        row.remove_prefix(1);
        offset = parse_real(row);
      }
      continue;
    }
    if (!header_seen && lambdas.empty() && row.starts_with("lambda")) {
      header_seen = true;
      continue;
    }
    const auto cells = split_commas(row);
    if (cells.size() > 2) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected lambda,shift");
    }
    try {
      lambdas.push_back(parse_real(cells[0]));
      shifts.push_back(cells.size() == 2 ? parse_real(cells[1]) : 0.0);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return validate_spectrum(std::move(lambdas), std::move(shifts), offset);
}

Spectrum read_spectrum_file(const std::string& path) {
  auto in = open(path);
  return read_spectrum(in);
}

void write_spectrum(std::ostream& out, const Spectrum& s) {
  out << "lambda,shift\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << format_real(s.lambdas()[k]) << ',' << format_real(s.shifts()[k]) << '\n';
  }
  out << "# offset=" << format_real(s.offset()) << '\n';
}

std::vector<std::vector<double>> read_numeric_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    std::vector<double> values;
    try {
      for (auto cell : split_commas(row)) values.push_back(parse_real(cell));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

std::vector<std::vector<double>> read_numeric_csv_file(const std::string& path) {
  auto in = open(path);
  return read_numeric_csv(in);
}

SymmetricMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.size();
  if (d == 0) throw Error(ErrorCode::ParseError, "empty matrix");
  SymmetricMatrix m{d, std::vector<double>(d * d)};
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) {
      throw Error(ErrorCode::ParseError, "matrix row " + std::to_string(i + 1) + " has " +
                                             std::to_string(rows[i].size()) + " entries, expected " +
                                             std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

nlohmann::ordered_json to_json(const Spectrum& s) {
  return {{"lambda", s.lambdas()}, {"shift", s.shifts()}, {"offset", s.offset()}};
}

nlohmann::ordered_json to_json(const DerivedStats& s) {
  return {{"A1", s.a1}, {"A2", s.a2}, {"B1", s.b1}, {"mean", s.mean}, {"variance", s.variance}};
}

nlohmann::ordered_json to_json(const DensityMax& m) {
  if (!m.finite()) return {{"kind", "unbounded"}, {"at", m.argmax}};
  return {{"kind", "finite"},
          {"argmax", m.argmax},
          {"value", m.value},
          {"certified_error", m.certified_error},
          {"quadrature_error", m.quadrature_error},
          {"grid_error", m.grid_error},
          {"bracket_error", m.bracket_error}};
}

nlohmann::ordered_json to_json(const BoundEntry& e) {
  nlohmann::ordered_json j{{"name", e.name},
                   {"kind", std::string(to_string(e.kind))},
                   {"applicable", e.applicable},
                   {"hypothesis", e.hypothesis},
                   {"outcome", std::string(to_string(e.outcome))}};
  j["value"] = e.value ? nlohmann::ordered_json(*e.value) : nlohmann::ordered_json(nullptr);
  j["margin"] = e.margin ? nlohmann::ordered_json(*e.margin) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  return {{"schema", kReportSchema},
          {"spectrum", to_json(r.spectrum)},
          {"stats", to_json(r.stats)},
          {"measured", to_json(r.measured)},
          {"entries", std::move(entries)}};
}

}  // namespace chi2w::io
