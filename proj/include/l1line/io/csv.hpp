#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "l1line/types.hpp"

namespace l1line::io {

/// The input file could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A cell is not a finite number, or a row has the wrong number of cells.
/// Row and column are 1-based positions in the file.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what);

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct CsvTable {
  Matrix<double> values;
  std::vector<std::string> header;  // empty when the file has none
};

/// Comma-separated numbers, one point per row. A first row holding any
/// non-numeric cell is taken as a header. Blank lines are skipped.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& file);

/// Full-precision CSV rendering (round-trips through parse_csv).
std::string to_csv(const Matrix<double>& values);

/// FNV-1a over the dimensions and the IEEE-754 bit patterns, row-major.
std::uint64_t fingerprint(const Matrix<double>& values);
std::string fingerprint_string(const Matrix<double>& values);

}  // namespace l1line::io
