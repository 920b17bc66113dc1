#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "l1line/types.hpp"

namespace l1line {

template <typename Scalar>
struct BaselineResult {
  Vector<Scalar> direction;  // unit L2 norm, first nonzero entry positive
  bool converged{false};
  int iterations{0};
  std::vector<Scalar> rayleigh;  // Rayleigh quotient of each iterate
};

namespace detail {

template <typename Scalar>
void fix_sign(Vector<Scalar>& v) {
  for (Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > Scalar(1e-12)) {
      if (v(j) < Scalar(0)) v = -v;
      return;
    }
  }
}

}  // namespace detail

/// Dominant right singular vector of the data (first principal direction,
/// uncentered) by power iteration on the Gram matrix X^T X.
///
/// Starts from the normalized all-ones vector; if an iterate collapses to
/// zero the start is redrawn from a fixed-seed generator. Stops when two
/// consecutive iterates differ by less than `tol` after sign alignment;
/// otherwise returns the last iterate with converged = false.
template <typename Scalar>
BaselineResult<Scalar> l2_best_fit_line(const DataMatrix<Scalar>& data, int max_iter = 10000,
                                        Scalar tol = Scalar(1e-10)) {
  detail::require(max_iter > 0, "max_iter must be positive");
  detail::require(tol > Scalar(0), "tol must be positive");
  const Matrix<Scalar> gram = data.values().transpose() * data.values();
  detail::require(gram.trace() > Scalar(0), "baseline needs nonzero data");

  const Index m = data.dims();
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;
  auto redraw = [&] {
    Vector<Scalar> v(m);
    for (Index j = 0; j < m; ++j) v(j) = Scalar(normal(rng));
    return Vector<Scalar>(v.normalized());
  };

  BaselineResult<Scalar> result;
  Vector<Scalar> v = Vector<Scalar>::Ones(m).normalized();
  const Scalar floor = std::numeric_limits<Scalar>::epsilon() * gram.trace();
  for (int it = 1; it <= max_iter; ++it) {
    Vector<Scalar> next = gram * v;
    Scalar norm = next.norm();
    if (!(norm > floor)) {
      v = redraw();
      continue;
    }
    next /= norm;
    if (next.dot(v) < Scalar(0)) next = -next;
    result.rayleigh.push_back(next.dot(gram * next));
    const Scalar change = (next - v).norm();
    v = std::move(next);
    result.iterations = it;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  detail::fix_sign(v);
  result.direction = std::move(v);
  return result;
}

}  // namespace l1line
