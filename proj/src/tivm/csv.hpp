#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tivm {

// Minimal reader for the comma-separated tables this project emits and reads
// (no quoting). Blank lines are skipped; CRLF is tolerated.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header; throws Format if absent.
  std::size_t column(std::string_view name) const;
};

// Throws Format on ragged rows or an empty document.
CsvTable parse_csv(std::string_view text);

// Strict numeric field parsers; throw Format naming `what` on bad input.
double parse_double(std::string_view field, std::string_view what);
long long parse_integer(std::string_view field, std::string_view what);

// "%.9g", the fixed formatting used for every real-valued CSV column.
std::string format_real(double value);

}  // namespace tivm
