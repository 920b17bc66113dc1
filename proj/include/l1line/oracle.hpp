#pragma once

// Brute-force references used to verify the sorting-based solvers. They
// evaluate the convex piecewise-linear subproblem at every kink instead of
// scanning sorted ratios, and share no code with that scan.

#include <cmath>
#include <limits>
#include <vector>

#include "l1line/coordinate_fit.hpp"

namespace l1line::oracle {

template <typename Scalar>
struct SubproblemOptimum {
  Scalar value{0};
  Scalar objective{0};
};

namespace detail {

// Among near-equal minima prefer smaller |t|, then smaller t.
template <typename Scalar>
bool better_candidate(Scalar f, Scalar t, Scalar best_f, Scalar best_t) {
  const Scalar tol = Scalar(kObjectiveTol) * std::max(Scalar(1), std::abs(best_f));
  if (f < best_f - tol) return true;
  if (f > best_f + tol) return false;
  if (std::abs(t) != std::abs(best_t)) return std::abs(t) < std::abs(best_t);
  return t < best_t;
}

}  // namespace detail

/// argmin of sum_i w_i |r_i - t| + lambda |t| over the kinks {0} U {r_i}.
template <typename Scalar>
SubproblemOptimum<Scalar> oracle_subproblem(const RatioList<Scalar>& ratios, Scalar lambda) {
  auto f = [&](Scalar t) {
    Scalar total = lambda * std::abs(t);
    for (const auto& e : ratios.entries) total += e.weight * std::abs(e.ratio - t);
    return total;
  };
  SubproblemOptimum<Scalar> best{Scalar(0), f(Scalar(0))};
  for (const auto& e : ratios.entries) {
    const Scalar value = f(e.ratio);
    if (detail::better_candidate(value, e.ratio, best.objective, best.value)) best = {e.ratio, value};
  }
  return best;
}

/// Optimal objective with coordinate `preserved` fixed to 1, computed from
/// the raw columns: each other coordinate is minimized independently over
/// t in {0} U {x_ij / x_i,preserved}.
template <typename Scalar>
Scalar separable_objective(const DataMatrix<Scalar>& data, Index preserved, Scalar lambda) {
  const auto& x = data.values();
  Scalar total = lambda;  // |v_preserved| = 1, and that column fits exactly
  for (Index j = 0; j < data.dims(); ++j) {
    if (j == preserved) continue;
    std::vector<Scalar> candidates{Scalar(0)};
    for (Index i = 0; i < data.points(); ++i) {
      if (x(i, preserved) != Scalar(0)) candidates.push_back(x(i, j) / x(i, preserved));
    }
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const Scalar t : candidates) {
      const Scalar value = (x.col(j) - t * x.col(preserved)).cwiseAbs().sum() + lambda * std::abs(t);
      best = std::min(best, value);
    }
    total += best;
  }
  return total;
}

/// Minimum of separable_objective over usable preserved coordinates, or the
/// all-zero objective when every column vanishes.
template <typename Scalar>
Scalar best_separable_objective(const DataMatrix<Scalar>& data, Scalar lambda) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Index p = 0; p < data.dims(); ++p) {
    if (data.column_is_zero(p)) continue;
    best = std::min(best, separable_objective(data, p, lambda));
  }
  return std::isinf(best) ? Scalar(0) : best;
}

}  // namespace l1line::oracle
