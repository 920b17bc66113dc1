#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "l1line/coordinate_fit.hpp"
#include "l1line/core.hpp"
#include "l1line/detail/parallel.hpp"

namespace l1line {

/// v_j takes `value` for penalties in (start, next start]; `error` is
/// sum_i |x_ij - value * x_i,preserved|.
template <typename Scalar>
struct CoordinateStep {
  Scalar start;
  Scalar value;
  Scalar error;
};

/// z(lambda) = intercept + lambda * slope from `lo` up to the next segment.
template <typename Scalar>
struct ObjectiveSegment {
  Scalar lo;
  Scalar intercept;
  Scalar slope;

  Scalar at(Scalar lambda) const { return intercept + lambda * slope; }
};

/// Every solution of the subproblems for one preserved coordinate, as a
/// function of the penalty.
template <typename Scalar>
class PerCoordinatePath {
 public:
  Index preserved() const noexcept { return preserved_; }
  Index dims() const noexcept { return static_cast<Index>(steps_.size()); }

  /// Penalties at which some coordinate changes, in increasing order.
  const std::vector<Scalar>& breakpoints() const noexcept { return breakpoints_; }
  /// Step function of coordinate j; empty for the preserved coordinate.
  const std::vector<CoordinateStep<Scalar>>& steps(Index j) const { return steps_.at(std::size_t(j)); }
  /// Piecewise-linear objective, starting at lo = 0.
  const std::vector<ObjectiveSegment<Scalar>>& segments() const noexcept { return segments_; }

  /// Index of the segment holding lambda, with (lo, hi] semantics and 0 in the first.
  std::size_t segment_index(Scalar lambda) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), lambda,
                               [](const auto& s, Scalar l) { return s.lo < l; });
    return it == segments_.begin() ? 0 : std::size_t(it - segments_.begin()) - 1;
  }

  Vector<Scalar> v_on_segment(std::size_t segment) const {
    const Scalar lo = segments_.at(segment).lo;
    Vector<Scalar> v = Vector<Scalar>::Zero(dims());
    v(preserved_) = Scalar(1);
    for (Index j = 0; j < dims(); ++j) {
      if (j == preserved_) continue;
      const auto& s = steps_[std::size_t(j)];
      auto it = std::upper_bound(s.begin(), s.end(), lo,
                                 [](Scalar l, const auto& step) { return l < step.start; });
      v(j) = (it == s.begin() ? s.front() : *std::prev(it)).value;
    }
    return v;
  }

  Vector<Scalar> v_at(Scalar lambda) const { return v_on_segment(segment_index(lambda)); }
  Scalar objective(Scalar lambda) const { return segments_[segment_index(lambda)].at(lambda); }

 private:
  template <typename S>
  friend PerCoordinatePath<S> breakpoints_for_preserved(const DataMatrix<S>&, Index);

  Index preserved_{0};
  std::vector<Scalar> breakpoints_;
  std::vector<std::vector<CoordinateStep<Scalar>>> steps_;
  std::vector<ObjectiveSegment<Scalar>> segments_;
};

namespace detail {

template <typename Scalar>
void sort_unique(std::vector<Scalar>& values, Scalar tol) {
  std::sort(values.begin(), values.end());
  std::vector<Scalar> out;
  out.reserve(values.size());
  for (const Scalar v : values) {
    if (out.empty() || v - out.back() > tol) out.push_back(v);
  }
  values = std::move(out);
}

// Step function of one target coordinate. Position k of the sorted ratios is
// optimal for lambda in [lo_k, lo_k + 2 w_k] with
//   lo_k = sgn(r_k) (sum_{i>k} w_i - sum_{i<k} w_i) - w_k.
// Ranges reaching above zero are recorded at max(0, lo_k); past the largest
// upper end the coordinate is zero.
template <typename Scalar>
std::vector<CoordinateStep<Scalar>> coordinate_steps(const RatioList<Scalar>& ratios,
                                                     std::vector<Scalar>& breakpoints) {
  using Wide = long double;
  Wide total{0}, moment{0}, abs_moment{0};
  for (const auto& e : ratios.entries) {
    total += e.weight;
    moment += Wide(e.weight) * e.ratio;
    abs_moment += Wide(e.weight) * std::abs(e.ratio);
  }
  const Scalar slack = condition_slack(Scalar(total));
  const Wide excluded = ratios.excluded_mass;

  std::vector<CoordinateStep<Scalar>> steps;
  Scalar largest_upper{0};
  Wide below{0}, below_moment{0};
  for (const auto& e : ratios.entries) {
    const Wide above = total - below - e.weight;
    const Wide above_moment = moment - below_moment - Wide(e.weight) * e.ratio;
    const Scalar lo = Scalar(ratio_sign(e.ratio) * (above - below) - e.weight);
    const Scalar upper = lo + 2 * e.weight;
    if (upper > slack) {
      if (lo >= -Scalar(kBreakpointTol)) breakpoints.push_back(std::max(lo, Scalar(0)));
      const Wide error = Wide(e.ratio) * (below - above) - below_moment + above_moment + excluded;
      steps.push_back({std::max(lo, Scalar(0)), e.ratio, Scalar(error)});
    }
    largest_upper = std::max(largest_upper, upper);
    below += e.weight;
    below_moment += Wide(e.weight) * e.ratio;
  }
  breakpoints.push_back(largest_upper);
  steps.push_back({largest_upper, Scalar(0), Scalar(abs_moment + excluded)});
  std::stable_sort(steps.begin(), steps.end(),
                   [](const auto& a, const auto& b) { return a.start < b.start; });
  steps.front().start = Scalar(0);
  return steps;
}

}  // namespace detail

/// All penalties at which the solution with coordinate `preserved` fixed to
/// 1 changes, with the solution and objective line on every piece.
template <typename Scalar>
PerCoordinatePath<Scalar> breakpoints_for_preserved(const DataMatrix<Scalar>& data, Index preserved) {
  detail::require(preserved >= 0 && preserved < data.dims(), "preserved index out of range");
  if (data.column_is_zero(preserved)) throw DegenerateColumn(static_cast<std::size_t>(preserved));

  PerCoordinatePath<Scalar> path;
  path.preserved_ = preserved;
  path.steps_.resize(std::size_t(data.dims()));
  for (Index j = 0; j < data.dims(); ++j) {
    if (j == preserved) continue;
    path.steps_[std::size_t(j)] =
        detail::coordinate_steps(build_ratio_list(data, preserved, j), path.breakpoints_);
  }
  detail::sort_unique(path.breakpoints_, Scalar(kBreakpointTol));

  // Sweep the step changes of all coordinates to get the objective line on
  // every piece.
  struct Event {
    Scalar start;
    Index coordinate;
    std::size_t step;
  };
  std::vector<Event> events;
  long double intercept = 0, slope = 1;
  for (Index j = 0; j < data.dims(); ++j) {
    const auto& s = path.steps_[std::size_t(j)];
    if (s.empty()) continue;
    intercept += s.front().error;
    slope += std::abs(s.front().value);
    for (std::size_t k = 1; k < s.size(); ++k) events.push_back({s[k].start, j, k});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.start < b.start; });

  path.segments_.push_back({Scalar(0), Scalar(intercept), Scalar(slope)});
  for (std::size_t e = 0; e < events.size();) {
    const Scalar start = events[e].start;
    for (; e < events.size() && events[e].start == start; ++e) {
      const auto& s = path.steps_[std::size_t(events[e].coordinate)];
      const auto& now = s[events[e].step];
      const auto& before = s[events[e].step - 1];
      intercept += static_cast<long double>(now.error) - before.error;
      slope += static_cast<long double>(std::abs(now.value)) - std::abs(before.value);
    }
    const ObjectiveSegment<Scalar> segment{start, Scalar(intercept), Scalar(slope)};
    if (path.segments_.back().lo == start) {
      path.segments_.back() = segment;
    } else {
      path.segments_.push_back(segment);
    }
  }
  return path;
}

/// Per-coordinate paths for every usable preserved coordinate, in index order.
template <typename Scalar>
std::vector<PerCoordinatePath<Scalar>> all_coordinate_paths(const DataMatrix<Scalar>& data,
                                                            unsigned threads = 1) {
  std::vector<Index> usable;
  for (Index p = 0; p < data.dims(); ++p) {
    if (!data.column_is_zero(p)) usable.push_back(p);
  }
  std::vector<PerCoordinatePath<Scalar>> paths(usable.size());
  detail::parallel_for(usable.size(), threads,
                       [&](std::size_t k) { paths[k] = breakpoints_for_preserved(data, usable[k]); });
  return paths;
}

namespace detail {

template <typename Scalar>
struct EnvelopePiece {
  Scalar start;
  std::size_t path;
  std::size_t segment;
};

template <typename Scalar>
Scalar objective_tol(Scalar z) {
  return Scalar(kObjectiveTol) * std::max(Scalar(1), std::abs(z));
}

template <typename Scalar>
std::vector<std::size_t> ordered_by_preserved(const DataMatrix<Scalar>& data,
                                              std::span<const PerCoordinatePath<Scalar>> paths) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return paths[a].preserved() < paths[b].preserved(); });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& p = paths[order[k]];
    if (p.dims() != data.dims()) throw PathError("per-coordinate path dimension does not match data");
    if (k > 0 && paths[order[k - 1]].preserved() == p.preserved()) {
      throw PathError("duplicate preserved coordinate in path merge");
    }
    const auto& segs = p.segments();
    if (segs.empty() || segs.front().lo != Scalar(0)) {
      throw PathError("per-coordinate path does not start at lambda = 0");
    }
    for (std::size_t s = 1; s < segs.size(); ++s) {
      if (!(segs[s].lo > segs[s - 1].lo)) throw PathError("per-coordinate breakpoints are not sorted");
    }
  }
  return order;
}

// Union of all segment starts, deduplicated.
template <typename Scalar>
std::vector<Scalar> merged_grid(std::span<const PerCoordinatePath<Scalar>> paths) {
  std::vector<Scalar> grid;
  for (const auto& p : paths) {
    for (const auto& s : p.segments()) grid.push_back(s.lo);
  }
  sort_unique(grid, Scalar(kBreakpointTol));
  return grid;
}

// Advances `cursor` to the segment of `path` in force just after `at`.
template <typename Scalar>
void advance(const PerCoordinatePath<Scalar>& path, std::size_t& cursor, Scalar at) {
  const auto& segs = path.segments();
  while (cursor + 1 < segs.size() && segs[cursor + 1].lo <= at + Scalar(kBreakpointTol)) ++cursor;
}

template <typename Scalar>
SolutionPath<Scalar> zero_line_path(const DataMatrix<Scalar>& data) {
  SolutionPath<Scalar> path;
  PenaltyInterval<Scalar> only;
  only.v_star = Vector<Scalar>::Zero(data.dims());
  only.error_intercept = data.values().cwiseAbs().sum();
  path.intervals.push_back(std::move(only));
  return path;
}

// Collapses consecutive envelope pieces into intervals with distinct v*.
template <typename Scalar>
SolutionPath<Scalar> assemble_path(std::span<const PerCoordinatePath<Scalar>> paths,
                                   const std::vector<EnvelopePiece<Scalar>>& pieces) {
  SolutionPath<Scalar> out;
  std::size_t last_path = std::numeric_limits<std::size_t>::max();
  std::size_t last_segment = 0;
  for (const auto& piece : pieces) {
    if (piece.path == last_path && piece.segment == last_segment) continue;
    const auto& source = paths[piece.path];
    Vector<Scalar> v = source.v_on_segment(piece.segment);
    const auto& seg = source.segments()[piece.segment];
    const bool same_line = !out.intervals.empty() &&
                           out.intervals.back().preserved == source.preserved() &&
                           out.intervals.back().v_star == v;
    last_path = piece.path;
    last_segment = piece.segment;
    if (same_line) continue;
    if (!out.intervals.empty()) out.intervals.back().hi = piece.start;
    PenaltyInterval<Scalar> interval;
    interval.lo = piece.start;
    interval.v_star = std::move(v);
    interval.preserved = source.preserved();
    interval.error_intercept = seg.intercept;
    interval.l1_slope = seg.slope;
    out.intervals.push_back(std::move(interval));
  }
  return out;
}

}  // namespace detail

/// Lower envelope of the per-coordinate objectives.
///
/// The union of all per-coordinate breakpoints splits the penalty axis into
/// elementary intervals on which every candidate objective is a line. On each
/// one the cheapest line at the left end is followed to its first crossing
/// with a flatter line, which takes over; a switch can only lower the slope,
/// so this stops after at most m switches. Equal objectives go to the flatter
/// line, then to the smaller preserved index.
template <typename Scalar>
SolutionPath<Scalar> merge_path(const DataMatrix<Scalar>& data,
                                std::span<const PerCoordinatePath<Scalar>> per_coordinate) {
  if (per_coordinate.empty()) {
    if ((data.values().array() == Scalar(0)).all()) return detail::zero_line_path(data);
    throw PathError("no per-coordinate paths supplied for nonzero data");
  }
  const auto order = detail::ordered_by_preserved(data, per_coordinate);
  const auto grid = detail::merged_grid(per_coordinate);
  const std::size_t count = order.size();
  std::vector<std::size_t> cursor(per_coordinate.size(), 0);
  std::vector<Scalar> intercept(count), slope(count);

  std::vector<detail::EnvelopePiece<Scalar>> pieces;
  std::vector<Scalar> multi_crossing;
  const Scalar slope_tol = Scalar(kObjectiveTol);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Scalar a = grid[k];
    const bool last = k + 1 == grid.size();
    const Scalar b = last ? std::numeric_limits<Scalar>::infinity() : grid[k + 1];
    for (std::size_t q = 0; q < count; ++q) {
      const auto& p = per_coordinate[order[q]];
      detail::advance(p, cursor[order[q]], a);
      const auto& seg = p.segments()[cursor[order[q]]];
      intercept[q] = seg.intercept;
      slope[q] = seg.slope;
    }

    std::size_t winner = 0;
    for (std::size_t q = 1; q < count; ++q) {
      const Scalar zq = intercept[q] + a * slope[q];
      const Scalar zw = intercept[winner] + a * slope[winner];
      const Scalar tol = detail::objective_tol(zw);
      if (zq < zw - tol || (zq <= zw + tol && slope[q] < slope[winner] - slope_tol)) winner = q;
    }
    auto push = [&](Scalar start, std::size_t q) {
      const std::size_t source = order[q];
      if (!pieces.empty() && start - pieces.back().start <= Scalar(kBreakpointTol) &&
          pieces.back().start >= a) {
        pieces.back().path = source;
        pieces.back().segment = cursor[source];
        return false;
      }
      pieces.push_back({start, source, cursor[source]});
      return true;
    };
    push(a, winner);

    Scalar t = a;
    int crossings = 0;
    for (;;) {
      std::optional<std::size_t> next;
      Scalar next_at = std::numeric_limits<Scalar>::infinity();
      for (std::size_t q = 0; q < count; ++q) {
        if (!(slope[q] < slope[winner] - slope_tol)) continue;
        const Scalar at = (intercept[q] - intercept[winner]) / (slope[winner] - slope[q]);
        const bool tie = next && std::abs(at - next_at) <= Scalar(kBreakpointTol);
        if ((!tie && at < next_at) || (tie && slope[q] < slope[*next] - slope_tol)) {
          next = q;
          next_at = at;
        }
      }
      if (!next || next_at >= b - Scalar(kBreakpointTol)) break;
      t = std::max(t, next_at);
      if (push(t, *next)) ++crossings;
      winner = *next;
    }
    if (crossings > 1) multi_crossing.push_back(a);
  }

  auto path = detail::assemble_path(per_coordinate, pieces);
  path.multi_crossing = std::move(multi_crossing);
  return path;
}

/// Pairwise merge that tests every candidate on every elementary interval.
/// For candidate j with objective z_j and slope s_j at the left end a,
///   beta_L = max over rivals q with s_q > s_j of (z_j - z_q) / (s_q - s_j),
///   beta_U = min over rivals q with s_q < s_j of (z_q - z_j) / (s_j - s_q),
/// so j is cheapest on [a + beta_L, a + beta_U]. A parallel rival that is
/// strictly cheaper (or equal with a smaller index) rules j out.
/// Quadratic in m per interval; used to cross-check merge_path.
template <typename Scalar>
SolutionPath<Scalar> merge_path_pairwise(const DataMatrix<Scalar>& data,
                                         std::span<const PerCoordinatePath<Scalar>> per_coordinate) {
  if (per_coordinate.empty()) {
    if ((data.values().array() == Scalar(0)).all()) return detail::zero_line_path(data);
    throw PathError("no per-coordinate paths supplied for nonzero data");
  }
  const auto order = detail::ordered_by_preserved(data, per_coordinate);
  const auto grid = detail::merged_grid(per_coordinate);
  const std::size_t count = order.size();
  std::vector<std::size_t> cursor(per_coordinate.size(), 0);
  std::vector<Scalar> z(count), slope(count);
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Scalar slope_tol = Scalar(kObjectiveTol);
  const Scalar beta_tol = Scalar(kBreakpointTol);

  std::vector<detail::EnvelopePiece<Scalar>> pieces;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Scalar a = grid[k];
    const Scalar width = k + 1 == grid.size() ? inf : grid[k + 1] - a;
    for (std::size_t q = 0; q < count; ++q) {
      const auto& p = per_coordinate[order[q]];
      detail::advance(p, cursor[order[q]], a);
      const auto& seg = p.segments()[cursor[order[q]]];
      z[q] = seg.at(a);
      slope[q] = seg.slope;
    }
    std::vector<detail::EnvelopePiece<Scalar>> local;
    for (std::size_t j = 0; j < count; ++j) {
      Scalar beta_lo = -inf, beta_hi = inf;
      bool dominated = false;
      for (std::size_t q = 0; q < count && !dominated; ++q) {
        if (q == j) continue;
        if (slope[q] > slope[j] + slope_tol) {
          beta_lo = std::max(beta_lo, (z[j] - z[q]) / (slope[q] - slope[j]));
        } else if (slope[q] < slope[j] - slope_tol) {
          beta_hi = std::min(beta_hi, (z[q] - z[j]) / (slope[j] - slope[q]));
        } else {
          const Scalar tol = detail::objective_tol(z[q]);
          dominated = z[j] > z[q] + tol || (z[j] >= z[q] - tol && q < j);
        }
      }
      if (dominated) continue;
      const std::size_t source = order[j];
      if (beta_lo > beta_tol && beta_lo < beta_hi - beta_tol && beta_lo < width - beta_tol) {
        local.push_back({a + beta_lo, source, cursor[source]});
      } else if (beta_lo <= beta_tol && beta_hi > beta_tol) {
        local.push_back({a, source, cursor[source]});
      }
    }
    std::stable_sort(local.begin(), local.end(),
                     [](const auto& x, const auto& y) { return x.start < y.start; });
    for (const auto& piece : local) {
      if (!pieces.empty() && piece.start - pieces.back().start <= Scalar(kBreakpointTol) &&
          pieces.back().start >= a) {
        continue;
      }
      pieces.push_back(piece);
    }
  }
  return detail::assemble_path(per_coordinate, pieces);
}

/// Per-coordinate paths for every usable coordinate, merged.
template <typename Scalar>
SolutionPath<Scalar> solution_path(const DataMatrix<Scalar>& data, unsigned threads = 1) {
  const auto paths = all_coordinate_paths(data, threads);
  return merge_path(data, std::span<const PerCoordinatePath<Scalar>>(paths));
}

/// Solution on the interval holding lambda ((lo, hi] semantics; lambda = 0
/// maps to the first interval). The path stores no coefficients, so alpha
/// is left empty.
template <typename Scalar>
LineFit<Scalar> query_path(const SolutionPath<Scalar>& path, Scalar lambda) {
  detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
  detail::require(!path.intervals.empty(), "empty solution path");
  const auto& intervals = path.intervals;
  auto it = std::lower_bound(intervals.begin(), intervals.end(), lambda,
                             [](const auto& iv, Scalar l) { return !iv.unbounded() && *iv.hi < l; });
  if (it == intervals.end()) it = std::prev(intervals.end());
  LineFit<Scalar> fit;
  fit.v = it->v_star;
  fit.preserved = it->preserved;
  fit.lambda = lambda;
  fit.z = it->objective(lambda);
  return fit;
}

/// query_path with alpha filled in from the data.
template <typename Scalar>
LineFit<Scalar> query_path(const DataMatrix<Scalar>& data, const SolutionPath<Scalar>& path,
                           Scalar lambda) {
  auto fit = query_path(path, lambda);
  detail::require(fit.v.size() == data.dims(), "path dimension does not match data");
  fit.alpha = fit.preserved ? Vector<Scalar>(data.column(*fit.preserved))
                            : Vector<Scalar>(Vector<Scalar>::Zero(data.points()));
  return fit;
}

}  // namespace l1line
