#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "l1line/coordinate_fit.hpp"
#include "l1line/core.hpp"
#include "l1line/detail/parallel.hpp"

namespace l1line {

struct FitOptions {
  unsigned threads = 1;
};

namespace detail {

// Equal objectives (to tolerance) go to the sparser line; remaining ties keep
// the incumbent, which has the smaller preserved index.
template <typename Scalar>
bool improves_on(const LineFit<Scalar>& candidate, const LineFit<Scalar>& incumbent) {
  const Scalar tol =
      Scalar(kObjectiveTol) * std::max({Scalar(1), std::abs(candidate.z), std::abs(incumbent.z)});
  if (candidate.z < incumbent.z - tol) return true;
  if (candidate.z > incumbent.z + tol) return false;
  return candidate.l1_norm() < incumbent.l1_norm() - tol;
}

}  // namespace detail

/// Fits regularized L1 lines on one data matrix for any number of penalties.
///
/// Sorted ratio lists depend only on the data, so they are built once and
/// kept when their total size fits `cache_entries`; otherwise every query
/// rebuilds them. The fitter refers to `data`, which must outlive it.
template <typename Scalar>
class LineFitter {
 public:
  static constexpr std::size_t kDefaultCacheEntries = std::size_t{1} << 22;

  explicit LineFitter(const DataMatrix<Scalar>& data,
                      std::size_t cache_entries = kDefaultCacheEntries,
                      FitOptions options = {})
      : data_(data), options_(options) {
    const auto m = static_cast<std::size_t>(data.dims());
    const auto n = static_cast<std::size_t>(data.points());
    if (m * (m - 1) * n <= cache_entries) {
      cache_.resize(m * m);
      detail::parallel_for(m, options_.threads, [&](std::size_t p) {
        for (std::size_t j = 0; j < m; ++j) {
          if (j != p) cache_[p * m + j] = build_ratio_list(data_, Index(p), Index(j));
        }
      });
    }
  }

  const DataMatrix<Scalar>& data() const noexcept { return data_; }
  bool cached() const noexcept { return !cache_.empty(); }

  /// Best line with v(preserved) = 1: every other coordinate solved
  /// independently by the adjusted weighted median.
  LineFit<Scalar> fit_preserving(Index preserved, Scalar lambda) const {
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    detail::require(preserved >= 0 && preserved < data_.dims(), "preserved index out of range");
    if (data_.column_is_zero(preserved)) throw DegenerateColumn(static_cast<std::size_t>(preserved));

    LineFit<Scalar> fit;
    fit.lambda = lambda;
    fit.preserved = preserved;
    fit.v = Vector<Scalar>::Zero(data_.dims());
    fit.v(preserved) = Scalar(1);
    for (Index j = 0; j < data_.dims(); ++j) {
      if (j == preserved) continue;
      if (cached()) {
        fit.v(j) = solve_subproblem(cache_[index(preserved, j)], lambda).value;
      } else {
        fit.v(j) = solve_subproblem(build_ratio_list(data_, preserved, j), lambda).value;
      }
    }
    fit.alpha = data_.column(preserved);
    fit.z = evaluate_objective(data_, fit.v, fit.alpha, lambda);
    return fit;
  }

  /// Minimum-objective line over all usable preserved coordinates.
  LineFit<Scalar> fit(Scalar lambda) const {
    detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
    const auto m = static_cast<std::size_t>(data_.dims());
    std::vector<std::optional<LineFit<Scalar>>> candidates(m);
    detail::parallel_for(m, options_.threads, [&](std::size_t p) {
      if (!data_.column_is_zero(Index(p))) candidates[p] = fit_preserving(Index(p), lambda);
    });

    std::optional<LineFit<Scalar>> best;
    for (auto& candidate : candidates) {
      if (!candidate) continue;
      if (!best || detail::improves_on(*candidate, *best)) best = std::move(candidate);
    }
    if (best) return *std::move(best);

    LineFit<Scalar> zero;
    zero.lambda = lambda;
    zero.v = Vector<Scalar>::Zero(data_.dims());
    zero.alpha = Vector<Scalar>::Zero(data_.points());
    zero.z = evaluate_objective(data_, zero.v, zero.alpha, lambda);
    return zero;
  }

  /// The cached ratio list for (preserved, target), or a freshly built one.
  RatioList<Scalar> ratios(Index preserved, Index target) const {
    if (cached() && preserved != target && preserved >= 0 && target >= 0 &&
        preserved < data_.dims() && target < data_.dims()) {
      return cache_[index(preserved, target)];
    }
    return build_ratio_list(data_, preserved, target);
  }

 private:
  std::size_t index(Index preserved, Index target) const {
    return static_cast<std::size_t>(preserved) * static_cast<std::size_t>(data_.dims()) +
           static_cast<std::size_t>(target);
  }

  const DataMatrix<Scalar>& data_;
  FitOptions options_;
  std::vector<RatioList<Scalar>> cache_;
};

template <typename Scalar>
LineFit<Scalar> fit_line(const DataMatrix<Scalar>& data, Scalar lambda, FitOptions options = {}) {
  return LineFitter<Scalar>(data, 0, options).fit(lambda);
}

template <typename Scalar>
LineFit<Scalar> fit_line_preserving(const DataMatrix<Scalar>& data, Index preserved, Scalar lambda) {
  return LineFitter<Scalar>(data, 0).fit_preserving(preserved, lambda);
}

}  // namespace l1line
