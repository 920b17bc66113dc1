#include "l1line/io/csv.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace l1line::io {

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& what)
    : Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
      row_(row),
      column_(column) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0;
  const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t begin = 0;
  for (;;) {
    const auto comma = line.find(',', begin);
    cells.push_back(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos
                                                                       : comma - begin));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_number = 0;
  bool first = true;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    const std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;
    if (trim(line).empty()) continue;

    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    std::optional<std::size_t> bad;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = parse_number(cells[c]);
      if (!value) {
        if (!bad) bad = c;
        continue;
      }
      row.push_back(*value);
    }
    if (first) {
      first = false;
      width = cells.size();
      if (bad) {
        for (const auto cell : cells) table.header.emplace_back(trim(cell));
        continue;
      }
    }
    if (bad) {
      throw ParseError(line_number, *bad + 1,
                       "non-numeric cell '" + std::string(trim(cells[*bad])) + "'");
    }
    if (cells.size() != width) {
      throw ParseError(line_number, std::min(cells.size(), width) + 1,
                       "expected " + std::to_string(width) + " cells, found " +
                           std::to_string(cells.size()));
    }
    rows.push_back(std::move(row));
  }

  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) table.values(Index(i), Index(j)) = rows[i][j];
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::error_code ec;
  if (std::filesystem::is_directory(file, ec)) throw IoError("'" + file.string() + "' is a directory");
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + file.string() + "'");
  return parse_csv(buffer.str());
}

std::string to_csv(const Matrix<double>& values) {
  std::string out;
  char buf[64];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, values(i, j));
      (void)ec;
      if (j > 0) out.push_back(',');
      out.append(buf, end);
    }
    out.push_back('\n');
  }
  return out;
}

std::uint64_t fingerprint(const Matrix<double>& values) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      hash ^= (word >> (8 * b)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(values.rows()));
  mix(static_cast<std::uint64_t>(values.cols()));
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) mix(std::bit_cast<std::uint64_t>(values(i, j)));
  }
  return hash;
}

std::string fingerprint_string(const Matrix<double>& values) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fingerprint(values)));
  return buf;
}

}  // namespace l1line::io
