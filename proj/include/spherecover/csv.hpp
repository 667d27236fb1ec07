#pragma once

// Minimal RFC-4180 CSV with one optional metadata comment line:
//
//   # model_hash=0123456789abcdef units=nats
//   D,rate,lambda
//   0.3,-0.6393229086,1.1488
//
// Numbers are written in the shortest form that parses back to the same double;
// infinities are written as inf / -inf.

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spherecover::csv {

std::string format_number(double value);
double parse_number(std::string_view text);

struct Document {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws if absent.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
  /// Metadata value for `key`, or empty.
  std::string meta(std::string_view key) const;

  std::string str() const;
};

Document parse(std::string_view text);
Document read(std::istream& in);

}  // namespace spherecover::csv
