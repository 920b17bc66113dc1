#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "l1line/types.hpp"

namespace l1line {

template <typename Scalar>
struct RatioEntry {
  Scalar ratio;   // x(i, target) / x(i, preserved)
  Scalar weight;  // |x(i, preserved)|, strictly positive
  Index point;
};

/// Ratios of one target column against a preserved column, sorted ascending
/// (ties by point index). Points whose preserved coordinate is zero are left
/// out; their |x(i, target)| is collected in `excluded_mass`.
template <typename Scalar>
struct RatioList {
  Index preserved{0};
  Index target{0};
  std::vector<RatioEntry<Scalar>> entries;
  Scalar excluded_mass{0};

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }

  Scalar total_weight() const {
    Scalar total{0};
    for (const auto& e : entries) total += e.weight;
    return total;
  }
};

template <typename Scalar>
RatioList<Scalar> build_ratio_list(const DataMatrix<Scalar>& data, Index preserved, Index target) {
  detail::require(preserved >= 0 && preserved < data.dims(), "preserved index out of range");
  detail::require(target >= 0 && target < data.dims(), "target index out of range");
  detail::require(preserved != target, "preserved and target coordinates must differ");

  RatioList<Scalar> list;
  list.preserved = preserved;
  list.target = target;
  list.entries.reserve(static_cast<std::size_t>(data.points()));
  for (Index i = 0; i < data.points(); ++i) {
    const Scalar base = data(i, preserved);
    const Scalar value = data(i, target);
    if (base == Scalar(0)) {
      list.excluded_mass += std::abs(value);
    } else {
      list.entries.push_back({value / base, std::abs(base), i});
    }
  }
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
  return list;
}

/// sgn with sgn(0) = +1.
template <typename Scalar>
constexpr Scalar ratio_sign(Scalar r) noexcept {
  return r < Scalar(0) ? Scalar(-1) : Scalar(1);
}

/// f(t) = sum_i w_i |r_i - t| + lambda |t|, the per-coordinate objective
/// without the constant contribution of excluded points.
template <typename Scalar>
Scalar subproblem_objective(const RatioList<Scalar>& ratios, Scalar t, Scalar lambda) {
  Scalar total = lambda * std::abs(t);
  for (const auto& e : ratios.entries) total += e.weight * std::abs(e.ratio - t);
  return total;
}

template <typename Scalar>
struct SubproblemSolution {
  Scalar value{0};
  // Sorted position of the entry whose ratio was selected; empty when the
  // coordinate was shrunk to zero.
  std::optional<std::size_t> position;
};

namespace detail {

template <typename Scalar>
Scalar condition_slack(Scalar total_weight) {
  return Scalar(kConditionTol) * std::max(Scalar(1), total_weight);
}

// t = 0 minimizes f iff |W(r<0) - W(r>0)| <= lambda + W(r=0).
template <typename Scalar>
bool zero_is_optimal(const RatioList<Scalar>& ratios, Scalar lambda, Scalar slack) {
  Scalar negative{0}, positive{0}, zero{0};
  for (const auto& e : ratios.entries) {
    if (e.ratio < Scalar(0)) {
      negative += e.weight;
    } else if (e.ratio > Scalar(0)) {
      positive += e.weight;
    } else {
      zero += e.weight;
    }
  }
  return std::abs(negative - positive) <= lambda + zero + slack;
}

}  // namespace detail

/// Adjusted weighted median. Scans the sorted entries and selects the first
/// position k with
///
///   | sgn(r_k) lambda + sum_{i<k} w_i - sum_{i>k} w_i | <= w_k,
///
/// returning r_k; returns 0 when no position qualifies. When a nonzero ratio
/// qualifies but t = 0 is equally optimal (the boundary where the
/// coordinate is about to vanish), 0 is returned.
template <typename Scalar>
SubproblemSolution<Scalar> solve_subproblem(const RatioList<Scalar>& ratios, Scalar lambda) {
  detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
  SubproblemSolution<Scalar> solution;
  if (ratios.empty()) return solution;

  const Scalar total = ratios.total_weight();
  const Scalar slack = detail::condition_slack(total);
  Scalar below{0};
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const auto& e = ratios.entries[k];
    const Scalar above = total - below - e.weight;
    if (std::abs(ratio_sign(e.ratio) * lambda + below - above) <= e.weight + slack) {
      solution.value = e.ratio;
      solution.position = k;
      break;
    }
    below += e.weight;
  }
  if (solution.position && solution.value != Scalar(0) &&
      detail::zero_is_optimal(ratios, lambda, slack)) {
    return {};
  }
  return solution;
}

/// Multipliers of the dual of the per-coordinate LP:
///   max sum_i r_i pi_i  s.t.  sum_i pi_i + gamma = 0, |pi_i| <= w_i, |gamma| <= lambda.
/// pi is indexed by sorted position.
template <typename Scalar>
struct DualCertificate {
  Vector<Scalar> pi;
  Scalar gamma{0};
};

template <typename Scalar>
struct CertificateCheck {
  Scalar balance_residual{0};  // |sum pi + gamma|
  Scalar bound_violation{0};   // largest excess over |pi_i| <= w_i or |gamma| <= lambda
  Scalar dual_objective{0};
  Scalar primal_objective{0};
  Scalar tolerance{0};

  Scalar gap() const { return std::abs(primal_objective - dual_objective); }
  bool feasible() const { return balance_residual <= tolerance && bound_violation <= tolerance; }
  bool ok() const { return feasible() && gap() <= tolerance; }
};

/// Checks `cert` against the primal value f(value). The tolerance is
/// absolute `tol` for objectives up to 1 and relative beyond.
template <typename Scalar>
CertificateCheck<Scalar> check_certificate(const RatioList<Scalar>& ratios, Scalar lambda,
                                           Scalar value, const DualCertificate<Scalar>& cert,
                                           Scalar tol = Scalar(kObjectiveTol)) {
  detail::require(cert.pi.size() == static_cast<Index>(ratios.size()),
                  "certificate size does not match the ratio list");
  CertificateCheck<Scalar> check;
  Scalar balance = cert.gamma;
  Scalar scale{1};
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const auto& e = ratios.entries[k];
    const Scalar p = cert.pi(static_cast<Index>(k));
    balance += p;
    check.bound_violation = std::max(check.bound_violation, std::abs(p) - e.weight);
    check.dual_objective += e.ratio * p;
    scale = std::max(scale, e.weight);
  }
  check.bound_violation = std::max(check.bound_violation, std::abs(cert.gamma) - lambda);
  check.balance_residual = std::abs(balance);
  check.primal_objective = subproblem_objective(ratios, value, lambda);
  check.tolerance = tol * std::max({Scalar(1), std::abs(check.primal_objective), scale});
  return check;
}

/// Builds the dual solution that certifies `solution`.
///
/// With a selected position k: gamma = -sgn(r_k) lambda, pi_i = +w_i above k,
/// -w_i below k and pi_k closes the balance. Without one: pi_i = sgn(r_i) w_i
/// for nonzero ratios, zero ratios absorb as much imbalance as their weight
/// allows, and gamma takes the rest.
///
/// Throws CertificateInfeasible when the constructed pair is not dual
/// feasible or leaves a duality gap, i.e. `solution` is not optimal for
/// (ratios, lambda).
template <typename Scalar>
DualCertificate<Scalar> build_dual_certificate(const RatioList<Scalar>& ratios, Scalar lambda,
                                               const SubproblemSolution<Scalar>& solution) {
  detail::require(lambda >= Scalar(0), "lambda must be nonnegative");
  const auto count = static_cast<Index>(ratios.size());
  DualCertificate<Scalar> cert{Vector<Scalar>::Zero(count), Scalar(0)};

  if (solution.position) {
    const std::size_t chosen = *solution.position;
    detail::require(chosen < ratios.size(), "selected position out of range");
    cert.gamma = -ratio_sign(ratios.entries[chosen].ratio) * lambda;
    Scalar others{0};
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      if (k == chosen) continue;
      const Scalar w = ratios.entries[k].weight;
      cert.pi(static_cast<Index>(k)) = k > chosen ? w : -w;
      others += cert.pi(static_cast<Index>(k));
    }
    cert.pi(static_cast<Index>(chosen)) = -cert.gamma - others;
  } else {
    Scalar signed_mass{0};
    Scalar zero_mass{0};
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      const auto& e = ratios.entries[k];
      if (e.ratio == Scalar(0)) {
        zero_mass += e.weight;
      } else {
        cert.pi(static_cast<Index>(k)) = e.ratio > Scalar(0) ? e.weight : -e.weight;
        signed_mass += cert.pi(static_cast<Index>(k));
      }
    }
    // Spread the absorbed amount over zero-ratio entries in proportion to weight.
    const Scalar absorbed = std::clamp(-signed_mass, -zero_mass, zero_mass);
    if (zero_mass > Scalar(0)) {
      for (std::size_t k = 0; k < ratios.size(); ++k) {
        const auto& e = ratios.entries[k];
        if (e.ratio == Scalar(0)) cert.pi(static_cast<Index>(k)) = absorbed * (e.weight / zero_mass);
      }
    }
    cert.gamma = -(signed_mass + absorbed);
  }

  const auto check = check_certificate(ratios, lambda, solution.value, cert);
  if (!check.ok()) {
    throw CertificateInfeasible("certificate for coordinate " + std::to_string(ratios.target) +
                                " (preserved " + std::to_string(ratios.preserved) +
                                ") fails: balance " + std::to_string(double(check.balance_residual)) +
                                ", bound excess " + std::to_string(double(check.bound_violation)) +
                                ", gap " + std::to_string(double(check.gap())));
  }
  return cert;
}

}  // namespace l1line
