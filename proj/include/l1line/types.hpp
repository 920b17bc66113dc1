#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "l1line/errors.hpp"

namespace l1line {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Absolute tolerance for comparing objective values.
inline constexpr double kObjectiveTol = 1e-9;
// Slack on the adjusted weighted-median test; scaled by max(1, total weight).
inline constexpr double kConditionTol = 1e-12;
// Penalty values closer than this are treated as the same breakpoint.
inline constexpr double kBreakpointTol = 1e-9;

/// n points in m dimensions, one point per row.
///
/// Construction enforces n >= 1, m >= 2 and finite entries, so every
/// algorithm downstream can assume a well-formed matrix.
template <typename Scalar>
class DataMatrix {
 public:
  using MatrixType = Matrix<Scalar>;

  explicit DataMatrix(MatrixType values) : x_(std::move(values)) {
    detail::require(x_.rows() >= 1, "data must contain at least one point");
    detail::require(x_.cols() >= 2, "data must have at least two dimensions");
    detail::require(x_.allFinite(), "data entries must be finite");
  }

  Index points() const noexcept { return x_.rows(); }
  Index dims() const noexcept { return x_.cols(); }

  const MatrixType& values() const noexcept { return x_; }
  auto column(Index j) const { return x_.col(j); }
  auto point(Index i) const { return x_.row(i); }
  Scalar operator()(Index i, Index j) const { return x_(i, j); }

  bool column_is_zero(Index j) const { return (x_.col(j).array() == Scalar(0)).all(); }

 private:
  MatrixType x_;
};

/// A fitted line v with projection coefficients alpha.
///
/// When `preserved` holds ĵ, v(ĵ) == 1 and alpha == x(:, ĵ). An empty
/// `preserved` marks the zero line (v == 0).
template <typename Scalar>
struct LineFit {
  Vector<Scalar> v;
  std::optional<Index> preserved;
  Vector<Scalar> alpha;
  Scalar z{0};
  Scalar lambda{0};

  bool is_zero_line() const noexcept { return !preserved.has_value(); }
  Scalar l1_norm() const { return v.template lpNorm<1>(); }
};

/// One piece of the solution path. On (lo, hi] the optimal objective is
/// error_intercept + lambda * l1_slope. An empty `hi` is the unbounded end.
template <typename Scalar>
struct PenaltyInterval {
  Scalar lo{0};
  std::optional<Scalar> hi;
  Vector<Scalar> v_star;
  std::optional<Index> preserved;
  Scalar error_intercept{0};
  Scalar l1_slope{0};

  bool unbounded() const noexcept { return !hi.has_value(); }
  bool contains(Scalar lambda) const {
    return lambda > lo && (unbounded() || lambda <= *hi);
  }
  Scalar objective(Scalar lambda) const { return error_intercept + lambda * l1_slope; }
};

template <typename Scalar>
struct SolutionPath {
  std::vector<PenaltyInterval<Scalar>> intervals;
  // Left ends of elementary intervals in which the lower envelope switched
  // preserved coordinate more than once.
  std::vector<Scalar> multi_crossing;

  /// Finite interior breakpoints (the shared ends of consecutive intervals).
  std::vector<Scalar> breakpoints() const {
    std::vector<Scalar> out;
    for (std::size_t k = 1; k < intervals.size(); ++k) out.push_back(intervals[k].lo);
    return out;
  }
};

using DataMatrixd = DataMatrix<double>;
using LineFitd = LineFit<double>;
using SolutionPathd = SolutionPath<double>;

}  // namespace l1line
