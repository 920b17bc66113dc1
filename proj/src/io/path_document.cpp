#include "l1line/io/path_document.hpp"

#include <limits>
#include <sstream>

#include "l1line/io/csv.hpp"
#include "l1line/io/format.hpp"

namespace l1line::io {

using nlohmann::json;

namespace {

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index j = 0; j < v.size(); ++j) out.push_back(v(j));
  return out;
}

Vector<double> vector_from(const json& j) {
  Vector<double> v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(Index(k)) = j.at(k).get<double>();
  return v;
}

json bound_json(const std::optional<double>& hi) { return hi ? json(*hi) : json("inf"); }

std::optional<double> bound_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "inf") throw Error("unknown interval bound '" + j.get<std::string>() + "'");
    return std::nullopt;
  }
  return j.get<double>();
}

json preserved_json(const std::optional<Index>& p) { return p ? json(*p + 1) : json(nullptr); }

std::optional<Index> preserved_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<Index>() - 1;
}

}  // namespace

PathDocument make_path_document(const DataMatrix<double>& data, const SolutionPath<double>& path,
                                std::span<const PerCoordinatePath<double>> per_coordinate,
                                bool include_per_coordinate) {
  PathDocument doc;
  doc.fingerprint = fingerprint_string(data.values());
  doc.points = data.points();
  doc.dims = data.dims();
  doc.path = path;
  if (include_per_coordinate) {
    std::vector<CoordinateObjective> lines;
    for (const auto& p : per_coordinate) {
      lines.push_back({p.preserved(), p.breakpoints(), p.segments()});
    }
    doc.per_coordinate = std::move(lines);
  }
  return doc;
}

json to_json(const PathDocument& doc) {
  json intervals = json::array();
  for (const auto& iv : doc.path.intervals) {
    intervals.push_back({{"lo", iv.lo},
                         {"hi", bound_json(iv.hi)},
                         {"preserved", preserved_json(iv.preserved)},
                         {"v", vector_json(iv.v_star)},
                         {"error_intercept", iv.error_intercept},
                         {"l1_slope", iv.l1_slope}});
  }
  json out = {{"schema", doc.schema},
              {"fingerprint", doc.fingerprint},
              {"points", doc.points},
              {"dims", doc.dims},
              {"intervals", std::move(intervals)},
              {"multi_crossing", doc.path.multi_crossing}};
  if (doc.per_coordinate) {
    json lines = json::array();
    for (const auto& c : *doc.per_coordinate) {
      json segments = json::array();
      for (std::size_t s = 0; s < c.segments.size(); ++s) {
        const std::optional<double> hi =
            s + 1 < c.segments.size() ? std::optional<double>(c.segments[s + 1].lo) : std::nullopt;
        segments.push_back({{"lo", c.segments[s].lo},
                            {"hi", bound_json(hi)},
                            {"intercept", c.segments[s].intercept},
                            {"slope", c.segments[s].slope}});
      }
      lines.push_back({{"preserved", c.preserved + 1},
                       {"breakpoints", c.breakpoints},
                       {"segments", std::move(segments)}});
    }
    out["per_coordinate"] = std::move(lines);
  }
  return out;
}

PathDocument path_document_from_json(const json& j) {
  PathDocument doc;
  doc.schema = j.at("schema").get<std::string>();
  if (doc.schema != kPathSchema) throw Error("unsupported path schema '" + doc.schema + "'");
  doc.fingerprint = j.at("fingerprint").get<std::string>();
  doc.points = j.at("points").get<Index>();
  doc.dims = j.at("dims").get<Index>();
  for (const auto& item : j.at("intervals")) {
    PenaltyInterval<double> iv;
    iv.lo = item.at("lo").get<double>();
    iv.hi = bound_from(item.at("hi"));
    iv.preserved = preserved_from(item.at("preserved"));
    iv.v_star = vector_from(item.at("v"));
    iv.error_intercept = item.at("error_intercept").get<double>();
    iv.l1_slope = item.at("l1_slope").get<double>();
    doc.path.intervals.push_back(std::move(iv));
  }
  if (j.contains("multi_crossing")) doc.path.multi_crossing = j.at("multi_crossing").get<std::vector<double>>();
  if (j.contains("per_coordinate")) {
    std::vector<CoordinateObjective> lines;
    for (const auto& item : j.at("per_coordinate")) {
      CoordinateObjective c;
      c.preserved = item.at("preserved").get<Index>() - 1;
      c.breakpoints = item.at("breakpoints").get<std::vector<double>>();
      for (const auto& s : item.at("segments")) {
        c.segments.push_back({s.at("lo").get<double>(), s.at("intercept").get<double>(),
                              s.at("slope").get<double>()});
      }
      lines.push_back(std::move(c));
    }
    doc.per_coordinate = std::move(lines);
  }
  return doc;
}

std::string serialize(const PathDocument& doc) { return to_json(doc).dump(2); }

PathDocument parse_path_document(std::string_view text) {
  return path_document_from_json(json::parse(text.begin(), text.end()));
}

std::string render_text(const PathDocument& doc) {
  std::ostringstream out;
  out << "schema: " << doc.schema << '\n'
      << "fingerprint: " << doc.fingerprint << '\n'
      << "points: " << doc.points << '\n'
      << "dims: " << doc.dims << '\n'
      << "intervals: " << doc.path.intervals.size() << '\n';
  for (const auto& iv : doc.path.intervals) {
    out << "interval: lo=" << fmt_num(iv.lo) << " hi=" << (iv.hi ? fmt_num(*iv.hi) : "inf")
        << " preserved=" << (iv.preserved ? std::to_string(*iv.preserved + 1) : "none")
        << " intercept=" << fmt_num(iv.error_intercept) << " slope=" << fmt_num(iv.l1_slope)
        << " v=" << fmt_list(iv.v_star) << '\n';
  }
  if (!doc.path.multi_crossing.empty()) {
    out << "multi_crossing: " << fmt_list(doc.path.multi_crossing) << '\n';
  }
  if (doc.per_coordinate) {
    for (const auto& c : *doc.per_coordinate) {
      out << "coordinate: preserved=" << c.preserved + 1
          << " breakpoints=" << fmt_list(c.breakpoints) << '\n';
      for (std::size_t s = 0; s < c.segments.size(); ++s) {
        out << "line: preserved=" << c.preserved + 1 << " lo=" << fmt_num(c.segments[s].lo)
            << " hi=" << (s + 1 < c.segments.size() ? fmt_num(c.segments[s + 1].lo) : "inf")
            << " intercept=" << fmt_num(c.segments[s].intercept)
            << " slope=" << fmt_num(c.segments[s].slope) << '\n';
      }
    }
  }
  return out.str();
}

bool operator==(const PathDocument& a, const PathDocument& b) {
  auto same_segments = [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k].lo != y[k].lo || x[k].intercept != y[k].intercept || x[k].slope != y[k].slope) return false;
    }
    return true;
  };
  if (a.schema != b.schema || a.fingerprint != b.fingerprint || a.points != b.points ||
      a.dims != b.dims || a.path.multi_crossing != b.path.multi_crossing ||
      a.path.intervals.size() != b.path.intervals.size() ||
      a.per_coordinate.has_value() != b.per_coordinate.has_value()) {
    return false;
  }
  for (std::size_t k = 0; k < a.path.intervals.size(); ++k) {
    const auto& x = a.path.intervals[k];
    const auto& y = b.path.intervals[k];
    if (x.lo != y.lo || x.hi != y.hi || x.preserved != y.preserved ||
        x.error_intercept != y.error_intercept || x.l1_slope != y.l1_slope ||
        x.v_star.size() != y.v_star.size() || x.v_star != y.v_star) {
      return false;
    }
  }
  if (a.per_coordinate) {
    if (a.per_coordinate->size() != b.per_coordinate->size()) return false;
    for (std::size_t k = 0; k < a.per_coordinate->size(); ++k) {
      const auto& x = (*a.per_coordinate)[k];
      const auto& y = (*b.per_coordinate)[k];
      if (x.preserved != y.preserved || x.breakpoints != y.breakpoints ||
          !same_segments(x.segments, y.segments)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace l1line::io
