#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "l1line/path.hpp"

namespace l1line::io {

inline constexpr const char* kPathSchema = "l1line.path/1";

/// Objective lines of one preserved coordinate, for plotting.
struct CoordinateObjective {
  Index preserved{0};
  std::vector<double> breakpoints;
  std::vector<ObjectiveSegment<double>> segments;
};

/// Serialized solution path. Feature indices are 1-based on disk and
/// 0-based in memory; an unbounded upper end is written as "inf".
struct PathDocument {
  std::string schema = kPathSchema;
  std::string fingerprint;
  Index points{0};
  Index dims{0};
  SolutionPath<double> path;
  std::optional<std::vector<CoordinateObjective>> per_coordinate;
};

PathDocument make_path_document(const DataMatrix<double>& data, const SolutionPath<double>& path,
                                std::span<const PerCoordinatePath<double>> per_coordinate = {},
                                bool include_per_coordinate = false);

nlohmann::json to_json(const PathDocument& doc);
PathDocument path_document_from_json(const nlohmann::json& j);

/// JSON text; doubles are written in shortest round-trip form.
std::string serialize(const PathDocument& doc);
PathDocument parse_path_document(std::string_view text);

/// Line-oriented key: value rendering with 12 significant digits.
std::string render_text(const PathDocument& doc);

bool operator==(const PathDocument& a, const PathDocument& b);

}  // namespace l1line::io
