#include "alignmark/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace alignmark {

using nlohmann::json;

ParseError::ParseError(int line, int column, const std::string& message, const std::string& source)
    : std::runtime_error(fmt::format("{}line {}, column {}: {}", source.empty() ? "" : source + ": ", line,
                                     column, message)),
      line_(line),
      column_(column),
      message_(message) {}

BinaryMatrix parse_matrix(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw ParseError(1, 1, "empty matrix");

  const int rows = static_cast<int>(lines.size());
  const int cols = static_cast<int>(lines.front().size());
  if (cols == 0) throw ParseError(1, 1, "empty row");
  if (rows > BinaryMatrix::kMaxSide) {
    throw ParseError(BinaryMatrix::kMaxSide + 1, 1, "more than 16 rows");
  }
  if (cols > BinaryMatrix::kMaxSide) throw ParseError(1, BinaryMatrix::kMaxSide + 1, "more than 16 columns");

  BinaryMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string_view line = lines[i];
    for (int j = 0; j < static_cast<int>(line.size()); ++j) {
      if (j >= cols) throw ParseError(i + 1, j + 1, fmt::format("row longer than {} columns", cols));
      const char c = line[j];
      if (c != '0' && c != '1') {
        throw ParseError(i + 1, j + 1, fmt::format("unexpected character '{}'", c));
      }
      m.set(i, j, c == '1');
    }
    if (static_cast<int>(line.size()) < cols) {
      throw ParseError(i + 1, static_cast<int>(line.size()) + 1,
                       fmt::format("row shorter than {} columns", cols));
    }
  }
  return m;
}

std::string format_matrix(const BinaryMatrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.rows()) * (m.cols() + 1));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out += m.at(i, j) ? '1' : '0';
    out += '\n';
  }
  return out;
}

BinaryMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_matrix(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), e.message(), path);
  }
}

json to_json(const AutocorrelationMap& map) {
  json values = json::array();
  const int m = map.source_rows();
  const int n = map.source_cols();
  for (int t1 = -(m - 1); t1 < m; ++t1) {
    json row = json::array();
    for (int t2 = -(n - 1); t2 < n; ++t2) row.push_back(map(t1, t2));
    values.push_back(std::move(row));
  }
  return {{"M", m}, {"N", n}, {"values", std::move(values)}};
}

std::string to_csv(const AutocorrelationMap& map) {
  std::string out = "tau1,tau2,value\n";
  const int m = map.source_rows();
  const int n = map.source_cols();
  for (int t1 = -(m - 1); t1 < m; ++t1)
    for (int t2 = -(n - 1); t2 < n; ++t2) out += fmt::format("{},{},{}\n", t1, t2, map(t1, t2));
  return out;
}

json to_json(const DistanceSpectrum& spectrum) {
  return {{"p", spectrum.p}, {"s", spectrum.s}, {"d1", spectrum.d1}, {"counts", spectrum.counts}};
}

DistanceSpectrum spectrum_from_json(const json& doc) {
  DistanceSpectrum s;
  s.p = doc.at("p").get<int>();
  s.s = doc.at("s").get<int>();
  s.d1 = doc.at("d1").get<int>();
  s.counts = doc.at("counts").get<std::vector<std::int64_t>>();
  if (s.d1 != s.p - s.s || s.counts.size() != static_cast<std::size_t>(s.s) + 1) {
    throw std::invalid_argument("inconsistent spectrum JSON");
  }
  return s;
}

std::string to_csv(const BoundTable& table) {
  std::string out = "p,s_lower_I,s_lower_II,d1_upper_I,d1_upper_II\n";
  for (const BoundRow& r : table.entries) {
    out += fmt::format("{},{},{},{},{}\n", r.p, r.s_lower_I, r.s_lower_II, r.d1_upper_I, r.d1_upper_II);
  }
  return out;
}

json to_json(const SearchReport& report) {
  json optima = json::array();
  for (const RankedMatrix& r : report.optima) {
    optima.push_back({{"matrix", format_matrix(r.matrix)},
                      {"spectrum", to_json(r.spectrum)},
                      {"histogram", to_string(r.spectrum)},
                      {"orbit_size", r.orbit_size}});
  }
  json curve = json::array();
  for (const CurvePoint& c : report.curve) {
    curve.push_back({{"p", c.p},
                     {"s_min", c.s_min ? json(*c.s_min) : json(nullptr)},
                     {"count", c.classes},
                     {"count_raw", c.raw}});
  }
  const SearchStats& st = report.stats;
  return {{"M", report.rows},
          {"N", report.cols},
          {"restriction", to_string(report.restriction)},
          {"best_d1", report.best_d1},
          {"optimal_classes", report.optimal_classes},
          {"unique_optimum", report.unique_optimum},
          {"optima", std::move(optima)},
          {"per_p", report.per_p},
          {"curve", std::move(curve)},
          {"stats",
           {{"nodes", st.nodes},
            {"leaves", st.leaves},
            {"sidelobe_evaluations", st.sidelobe_evaluations},
            {"candidates_retained", st.candidates_retained},
            {"prefixes", st.prefixes},
            {"prefixes_resumed", st.prefixes_resumed},
            {"seconds", st.seconds}}}};
}

std::string curves_csv(const SearchReport& report) {
  const BoundTable bounds = bound_table(report.rows, report.cols);
  std::string out = "p,s_min,count,count_raw,s_lower_I,s_lower_II,d1_upper_I,d1_upper_II\n";
  for (const CurvePoint& c : report.curve) {
    const BoundRow& b = bounds.at(c.p);
    out += fmt::format("{},{},{},{},{},{},{},{}\n", c.p, c.s_min ? std::to_string(*c.s_min) : "",
                       c.classes, c.raw, b.s_lower_I, b.s_lower_II, b.d1_upper_I, b.d1_upper_II);
  }
  return out;
}

}  // namespace alignmark
