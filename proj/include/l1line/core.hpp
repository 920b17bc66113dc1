#pragma once

#include <algorithm>
#include <cmath>

#include "l1line/types.hpp"

namespace l1line {

/// Sum over points of ||x_i - v alpha_i||_1 plus lambda ||v||_1.
///
/// The penalty sums every coordinate of v, the preserved one included.
template <typename Scalar, typename VDerived, typename ADerived>
Scalar evaluate_objective(const DataMatrix<Scalar>& data, const Eigen::MatrixBase<VDerived>& v,
                          const Eigen::MatrixBase<ADerived>& alpha, Scalar lambda) {
  detail::require(v.size() == data.dims(), "v must have one entry per dimension");
  detail::require(alpha.size() == data.points(), "alpha must have one entry per point");
  detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
  const Scalar error = (data.values() - alpha * v.transpose()).cwiseAbs().sum();
  return error + lambda * v.template lpNorm<1>();
}

/// The L1 distance term alone (lambda = 0).
template <typename Scalar, typename VDerived, typename ADerived>
Scalar fit_error(const DataMatrix<Scalar>& data, const Eigen::MatrixBase<VDerived>& v,
                 const Eigen::MatrixBase<ADerived>& alpha) {
  return evaluate_objective(data, v, alpha, Scalar(0));
}

/// Projections v * alpha_i, one per row.
template <typename Scalar>
Matrix<Scalar> reconstruct(const DataMatrix<Scalar>& data, const LineFit<Scalar>& fit) {
  detail::require(fit.v.size() == data.dims(), "fit dimension does not match data");
  if (fit.is_zero_line()) return Matrix<Scalar>::Zero(data.points(), data.dims());
  detail::require(fit.alpha.size() == data.points(), "fit point count does not match data");
  return fit.alpha * fit.v.transpose();
}

/// data - reconstruct(data, fit): the part of each point the line does not explain.
template <typename Scalar>
Matrix<Scalar> residual(const DataMatrix<Scalar>& data, const LineFit<Scalar>& fit) {
  return data.values() - reconstruct(data, fit);
}

/// 1 - |<v, w>| after scaling both to unit L2 norm; 0 for the same line,
/// 1 for orthogonal lines. Invariant under sign and scale of either input.
template <typename ADerived, typename BDerived>
typename ADerived::Scalar discordance(const Eigen::MatrixBase<ADerived>& v,
                                      const Eigen::MatrixBase<BDerived>& v_true) {
  using Scalar = typename ADerived::Scalar;
  detail::require(v.size() == v_true.size(), "discordance needs vectors of equal length");
  const Scalar nv = v.norm();
  const Scalar nt = v_true.norm();
  detail::require(nv > Scalar(0) && nt > Scalar(0), "discordance is undefined for a zero vector");
  const Scalar cosine = std::abs(v.dot(v_true)) / (nv * nt);
  return std::clamp(Scalar(1) - cosine, Scalar(0), Scalar(1));
}

/// Number of coordinates with |v_j| > tol.
template <typename Derived>
Index l0_count(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar tol) {
  return (v.array().abs() > tol).count();
}

}  // namespace l1line
