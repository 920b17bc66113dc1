#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "l1line/baseline.hpp"
#include "l1line/core.hpp"
#include "l1line/fixed_lambda.hpp"
#include "l1line/path.hpp"

namespace l1line {

/// Design of one synthetic experiment: n points near a random line in m
/// dimensions, with `contaminated_dims` coordinates of `contaminated_points`
/// points replaced by outliers.
struct SimConfig {
  Index n = 1000;
  Index m = 100;
  Index contaminated_points = 0;
  Index contaminated_dims = 0;
  double noise_scale = 1.0;
  std::optional<double> outlier_scale;  // defaults to 50 * noise_scale
  std::uint64_t seed = 1;

  double effective_outlier_scale() const { return outlier_scale.value_or(50.0 * noise_scale); }

  void validate() const {
    detail::require(n >= 1, "n must be at least 1");
    detail::require(m >= 2, "m must be at least 2");
    detail::require(contaminated_points >= 0 && contaminated_points <= n,
                    "contaminated point count must lie in [0, n]");
    detail::require(contaminated_dims >= 0 && contaminated_dims <= m,
                    "contaminated dimension count must lie in [0, m]");
    detail::require(noise_scale > 0 && std::isfinite(noise_scale), "noise scale must be positive");
    detail::require(effective_outlier_scale() > 0 && std::isfinite(effective_outlier_scale()),
                    "outlier scale must be positive");
  }
};

template <typename Scalar>
struct SyntheticData {
  DataMatrix<Scalar> data;
  Vector<Scalar> v_true;
  Matrix<Scalar> clean;                              // before contamination
  std::vector<std::pair<Index, Index>> contaminated;  // (point, coordinate)
};

/// Draws v_true uniformly on the unit sphere, points alpha_i v_true + noise
/// with alpha_i ~ 10 N(0, 1) and Laplace(0, noise_scale) noise, then replaces
/// one shared set of `contaminated_dims` coordinates on `contaminated_points`
/// random points with values of random sign and magnitude uniform in
/// [outlier/2, outlier]. Contamination draws come after the clean draws, so
/// the clean matrix depends on the seed only.
template <typename Scalar = double>
SyntheticData<Scalar> generate(const SimConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> exponential(1.0);

  Vector<Scalar> v_true(config.m);
  do {
    for (Index j = 0; j < config.m; ++j) v_true(j) = Scalar(normal(rng));
  } while (v_true.norm() == Scalar(0));
  v_true.normalize();

  Matrix<Scalar> x(config.n, config.m);
  for (Index i = 0; i < config.n; ++i) {
    const double alpha = 10.0 * normal(rng);
    for (Index j = 0; j < config.m; ++j) {
      const double laplace = config.noise_scale * (exponential(rng) - exponential(rng));
      x(i, j) = Scalar(alpha * double(v_true(j)) + laplace);
    }
  }
  Matrix<Scalar> clean = x;

  std::vector<std::pair<Index, Index>> touched;
  if (config.contaminated_points > 0 && config.contaminated_dims > 0) {
    std::vector<Index> rows(std::size_t(config.n)), cols(std::size_t(config.m));
    std::iota(rows.begin(), rows.end(), Index{0});
    std::iota(cols.begin(), cols.end(), Index{0});
    std::vector<Index> picked_rows, picked_cols;
    std::sample(rows.begin(), rows.end(), std::back_inserter(picked_rows), config.contaminated_points, rng);
    std::sample(cols.begin(), cols.end(), std::back_inserter(picked_cols), config.contaminated_dims, rng);
    const double outlier = config.effective_outlier_scale();
    std::uniform_real_distribution<double> magnitude(outlier / 2, outlier);
    std::bernoulli_distribution negative(0.5);
    for (const Index i : picked_rows) {
      for (const Index j : picked_cols) {
        const double value = magnitude(rng);
        x(i, j) = Scalar(negative(rng) ? -value : value);
        touched.emplace_back(i, j);
      }
    }
  }
  return {DataMatrix<Scalar>(std::move(x)), std::move(v_true), std::move(clean), std::move(touched)};
}

template <typename Scalar>
struct LambdaSummary {
  Scalar min{0};
  Scalar avg{0};
  Scalar max{0};
  bool degenerate{true};
};

/// Minimum, mean and maximum of the finite positive values in `breakpoints`.
template <typename Scalar>
LambdaSummary<Scalar> summarize_breakpoints(std::span<const Scalar> breakpoints) {
  LambdaSummary<Scalar> summary;
  std::size_t count = 0;
  Scalar sum{0};
  for (const Scalar b : breakpoints) {
    if (!(b > Scalar(0)) || !std::isfinite(double(b))) continue;
    summary.min = count == 0 ? b : std::min(summary.min, b);
    summary.max = count == 0 ? b : std::max(summary.max, b);
    sum += b;
    ++count;
  }
  if (count == 0) return {};
  summary.avg = sum / Scalar(count);
  summary.degenerate = false;
  return summary;
}

/// Penalty levels from the merged path's interior breakpoints.
template <typename Scalar>
LambdaSummary<Scalar> lambda_summaries(const SolutionPath<Scalar>& path) {
  detail::require(!path.intervals.empty(), "empty solution path");
  const auto breakpoints = path.breakpoints();
  return summarize_breakpoints(std::span<const Scalar>(breakpoints));
}

/// Penalty levels from the union of per-coordinate breakpoints.
template <typename Scalar>
LambdaSummary<Scalar> lambda_summaries(std::span<const PerCoordinatePath<Scalar>> paths) {
  std::vector<Scalar> all;
  for (const auto& p : paths) all.insert(all.end(), p.breakpoints().begin(), p.breakpoints().end());
  detail::sort_unique(all, Scalar(kBreakpointTol));
  return summarize_breakpoints(std::span<const Scalar>(all));
}

enum class BreakpointSource { merged, per_coordinate_union };

struct SimulationOptions {
  int replications = 10;
  unsigned threads = 1;
  BreakpointSource source = BreakpointSource::merged;
  double l0_tol = 1e-9;
};

/// Columns of the summary: the L2 baseline, then the regularized fit at
/// lambda = 0, min, mean and max breakpoint.
inline constexpr std::array<const char*, 5> kSimulationColumns = {"PCA", "lambda_0", "lambda_min",
                                                                   "lambda_avg", "lambda_max"};

struct ReplicationRecord {
  std::uint64_t seed{0};
  std::array<double, 5> lambda{};  // penalty used per column; 0 for the baseline
  std::array<double, 5> l0{};
  std::array<double, 5> discordance{};
  bool degenerate_lambdas{false};
  bool baseline_converged{true};
  std::size_t path_intervals{0};
};

struct Moments {
  double mean{0};
  double sd{0};
};

struct SimulationSummary {
  SimConfig config;
  std::vector<ReplicationRecord> replications;
  std::array<Moments, 5> l0{};
  std::array<Moments, 5> discordance{};
  double seconds{0};
};

namespace detail {

inline Moments moments(const std::vector<double>& values) {
  Moments out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / double(values.size() - 1));
  }
  return out;
}

}  // namespace detail

inline ReplicationRecord run_replication(const SimConfig& config, const SimulationOptions& options) {
  const auto synthetic = generate<double>(config);
  const auto& data = synthetic.data;
  ReplicationRecord record;
  record.seed = config.seed;

  const auto baseline = l2_best_fit_line(data);
  record.baseline_converged = baseline.converged;
  record.l0[0] = double(l0_count(baseline.direction, options.l0_tol));
  record.discordance[0] = discordance(baseline.direction, synthetic.v_true);

  const auto per_coordinate = all_coordinate_paths(data);
  const std::span<const PerCoordinatePath<double>> view(per_coordinate);
  const auto path = merge_path(data, view);
  record.path_intervals = path.intervals.size();
  const auto levels = options.source == BreakpointSource::merged ? lambda_summaries(path)
                                                                 : lambda_summaries(view);
  record.degenerate_lambdas = levels.degenerate;
  record.lambda = {0.0, 0.0, levels.min, levels.avg, levels.max};

  const LineFitter<double> fitter(data);
  for (std::size_t c = 1; c < kSimulationColumns.size(); ++c) {
    const auto fit = fitter.fit(record.lambda[c]);
    record.l0[c] = double(l0_count(fit.v, options.l0_tol));
    record.discordance[c] = fit.is_zero_line() ? 1.0 : discordance(fit.v, synthetic.v_true);
  }
  return record;
}

/// Replication r uses seed config.seed + r; replications run in parallel.
inline SimulationSummary simulate(const SimConfig& config, const SimulationOptions& options = {}) {
  config.validate();
  detail::require(options.replications >= 1, "at least one replication is required");
  const auto started = std::chrono::steady_clock::now();

  SimulationSummary summary;
  summary.config = config;
  summary.replications.resize(std::size_t(options.replications));
  detail::parallel_for(summary.replications.size(), options.threads, [&](std::size_t r) {
    SimConfig replica = config;
    replica.seed = config.seed + r;
    summary.replications[r] = run_replication(replica, options);
  });

  for (std::size_t c = 0; c < kSimulationColumns.size(); ++c) {
    std::vector<double> l0, disc;
    for (const auto& rec : summary.replications) {
      l0.push_back(rec.l0[c]);
      disc.push_back(rec.discordance[c]);
    }
    summary.l0[c] = detail::moments(l0);
    summary.discordance[c] = detail::moments(disc);
  }
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return summary;
}

}  // namespace l1line
