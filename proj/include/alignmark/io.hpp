#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "alignmark/bounds.hpp"
#include "alignmark/correlation.hpp"
#include "alignmark/matrix.hpp"
#include "alignmark/search.hpp"
#include "alignmark/spectrum.hpp"

namespace alignmark {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message, const std::string& source = {});
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// M lines of N '0'/'1' characters. A trailing newline is optional, CRLF is
/// accepted. Line and column in errors are 1-based.
BinaryMatrix parse_matrix(std::string_view text);
std::string format_matrix(const BinaryMatrix& m);

BinaryMatrix read_matrix_file(const std::string& path);

nlohmann::json to_json(const AutocorrelationMap& map);
/// tau1,tau2,value rows in grid order.
std::string to_csv(const AutocorrelationMap& map);

nlohmann::json to_json(const DistanceSpectrum& spectrum);
DistanceSpectrum spectrum_from_json(const nlohmann::json& doc);

/// p,s_lower_I,s_lower_II,d1_upper_I,d1_upper_II
std::string to_csv(const BoundTable& table);

nlohmann::json to_json(const SearchReport& report);
/// p,s_min,count,count_raw,s_lower_I,s_lower_II,d1_upper_I,d1_upper_II
std::string curves_csv(const SearchReport& report);

}  // namespace alignmark
