#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "rankreg/errors.hpp"
#include "rankreg/estimators.hpp"

namespace rankreg::app {

/// Unreadable files and malformed input data (exit code 1).
class DataError : public Error {
 public:
  using Error::Error;
};

struct ColumnSpec {
  std::string y = "y";
  std::string x = "x";
  std::vector<std::string> w;
  std::optional<std::string> group;
  bool intercept = true;
  bool drop_missing = false;
};

struct Ingested {
  Dataset data;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Splits one CSV record; double quotes may enclose commas and "" escapes
/// a quote.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a headed CSV. A field is missing when empty, "NA", "NaN" or not a
/// decimal number. In strict mode the first missing field throws DataError
/// citing the line; with drop_missing the row is skipped and counted. The x
/// column is not read for rank-level regressions. With cols.intercept a
/// leading column named "intercept" is added to W.
Ingested ingest_csv(std::istream& in, const ColumnSpec& cols, Spec spec);
Ingested ingest_csv_file(const std::string& path, const ColumnSpec& cols, Spec spec);

}  // namespace rankreg::app
