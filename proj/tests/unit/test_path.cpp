#include <doctest.h>

#include <cmath>
#include <random>
#include <span>

#include "l1line/fixed_lambda.hpp"
#include "l1line/oracle.hpp"
#include "l1line/path.hpp"
#include "support/fixtures.hpp"

using namespace l1line;
using l1line::testing::illustrative;

namespace {

using Paths = std::vector<PerCoordinatePath<double>>;

std::span<const PerCoordinatePath<double>> view(const Paths& paths) { return paths; }

// Penalties in (0, upto) at which the oracle's per-coordinate solution
// changes, located to within `step`.
std::vector<double> oracle_change_points(const DataMatrixd& data, Index preserved, double upto,
                                         double step) {
  std::vector<RatioList<double>> lists;
  for (Index j = 0; j < data.dims(); ++j) {
    if (j != preserved) lists.push_back(build_ratio_list(data, preserved, j));
  }
  auto solution = [&](double lambda) {
    std::vector<double> v;
    for (const auto& l : lists) v.push_back(oracle::oracle_subproblem(l, lambda).value);
    return v;
  };
  std::vector<double> changes;
  auto previous = solution(step / 2);
  for (double lambda = step / 2 + step; lambda < upto; lambda += step) {
    auto current = solution(lambda);
    if (current != previous) changes.push_back(lambda - step / 2);
    previous = std::move(current);
  }
  return changes;
}

void check_path_shape(const SolutionPathd& path) {
  REQUIRE_FALSE(path.intervals.empty());
  CHECK(path.intervals.front().lo == 0);
  CHECK(path.intervals.back().unbounded());
  for (std::size_t k = 0; k + 1 < path.intervals.size(); ++k) {
    const auto& a = path.intervals[k];
    const auto& b = path.intervals[k + 1];
    REQUIRE(a.hi);
    CHECK(*a.hi == b.lo);
    CHECK(a.lo < *a.hi);
    CHECK(b.l1_slope <= a.l1_slope + 1e-9);
    // The envelope is continuous at every breakpoint.
    CHECK(a.objective(*a.hi) == doctest::Approx(b.objective(b.lo)).epsilon(1e-9));
  }
  const double last = path.intervals.back().l1_slope;
  CHECK((std::abs(last - 1) < 1e-12 || last == 0));
}

}  // namespace

TEST_CASE("per-coordinate breakpoints on the five-point example") {
  const auto data = illustrative();
  const std::vector<std::vector<double>> expected = {{1, 3, 11}, {4, 6}, {0, 2}, {3, 5, 11}};
  for (Index p = 0; p < 4; ++p) {
    const auto path = breakpoints_for_preserved(data, p);
    CHECK(path.preserved() == p);
    const auto& bp = path.breakpoints();
    REQUIRE(bp.size() == expected[p].size());
    for (std::size_t k = 0; k < bp.size(); ++k) CHECK(bp[k] == doctest::Approx(expected[p][k]).epsilon(1e-12));

    // Every positive breakpoint is a change of the brute-force solution and
    // vice versa.
    const auto changes = oracle_change_points(data, p, 15, 0.01);
    std::vector<double> positive;
    for (const double b : bp) {
      if (b > 0) positive.push_back(b);
    }
    REQUIRE(changes.size() == positive.size());
    for (std::size_t k = 0; k < changes.size(); ++k) CHECK(std::abs(changes[k] - positive[k]) <= 0.005 + 1e-12);
  }
}

TEST_CASE("per-coordinate objective lines") {
  const auto data = illustrative();
  struct Line {
    double lo, intercept, slope;
  };
  const std::vector<std::vector<Line>> expected = {
      {{0, 36.1, 2.9}, {1, 37.3, 1.7}, {3, 38.8, 1.2}, {11, 41, 1}},
      {{0, 35, 2.5}, {4, 39, 1.5}, {6, 42, 1}},
      {{0, 43 + 2.0 / 3, 2 + 1.0 / 6}, {2, 46, 1}},
      {{0, 34.5, 2.5}, {3, 36, 2}, {5, 37 + 2.0 / 3, 1 + 2.0 / 3}, {11, 45, 1}},
  };
  for (Index p = 0; p < 4; ++p) {
    const auto path = breakpoints_for_preserved(data, p);
    const auto& segs = path.segments();
    REQUIRE(segs.size() == expected[p].size());
    for (std::size_t s = 0; s < segs.size(); ++s) {
      CHECK(segs[s].lo == doctest::Approx(expected[p][s].lo).epsilon(1e-12).scale(1));
      CHECK(segs[s].intercept == doctest::Approx(expected[p][s].intercept).epsilon(1e-12));
      CHECK(segs[s].slope == doctest::Approx(expected[p][s].slope).epsilon(1e-12));
    }
    // The lines agree with direct evaluation away from breakpoints.
    for (double lambda : {0.5, 2.5, 3.7, 5.5, 8.0, 12.0}) {
      CHECK(path.objective(lambda) ==
            doctest::Approx(fit_line_preserving(data, p, lambda).z).epsilon(1e-12));
      CHECK(path.v_at(lambda) == fit_line_preserving(data, p, lambda).v);
    }
  }
}

TEST_CASE("single point") {
  Matrix<double> x(1, 2);
  x << 2, 4;
  const DataMatrixd data(x);
  const auto path = breakpoints_for_preserved(data, 0);
  REQUIRE(path.breakpoints().size() == 1);
  CHECK(path.breakpoints()[0] == 2);
  CHECK(path.v_at(1.0)(1) == 2);
  CHECK(path.v_at(3.0)(1) == 0);

  const auto merged = solution_path(data);
  CHECK(merged.intervals.size() <= 2);
  check_path_shape(merged);
}

TEST_CASE("zero preserved column is rejected") {
  Matrix<double> x(2, 2);
  x << 0, 1, 0, 2;
  CHECK_THROWS_AS(breakpoints_for_preserved(DataMatrixd(x), 0), DegenerateColumn);
}

TEST_CASE("merged path on the five-point example") {
  const auto data = illustrative();
  const auto paths = all_coordinate_paths(data);
  const auto path = merge_path(data, view(paths));
  check_path_shape(path);
  REQUIRE(path.intervals.size() == 4);

  const double his[] = {3, 3.5, 11};
  const Index preserved[] = {3, 3, 0, 0};
  const double v[4][4] = {{-2.0 / 3, 1.0 / 3, -0.5, 1}, {-2.0 / 3, 1.0 / 3, 0, 1}, {1, 0, 0, -0.2}, {1, 0, 0, 0}};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& iv = path.intervals[k];
    if (k < 3) CHECK(*iv.hi == doctest::Approx(his[k]).epsilon(1e-12));
    CHECK(iv.preserved == preserved[k]);
    for (Index j = 0; j < 4; ++j) CHECK(iv.v_star(j) == doctest::Approx(v[k][j]).epsilon(1e-12).scale(1));
  }
  // 3.5 comes from the merge alone.
  for (const auto& p : paths) {
    for (const double b : p.breakpoints()) CHECK(std::abs(b - 3.5) > 1e-6);
  }
  CHECK(path.breakpoints().size() == 3);
  CHECK(path.multi_crossing.empty());
}

TEST_CASE("queries on the five-point path") {
  const auto data = illustrative();
  const auto path = solution_path(data);
  CHECK(query_path(path, 2.0).z == doctest::Approx(39.5).epsilon(1e-12));
  const auto far = query_path(data, path, 12.0);
  CHECK(far.z == doctest::Approx(53).epsilon(1e-12));
  CHECK(far.v == Vector<double>::Unit(4, 0));
  CHECK(far.alpha == data.column(0));
  CHECK(query_path(path, 0.0).preserved == Index{3});
  // Breakpoints belong to the interval on their left.
  CHECK(query_path(path, 3.0).v(2) == doctest::Approx(-0.5));
  CHECK(query_path(path, 3.5 - 1e-9).preserved == Index{3});
  CHECK(query_path(path, 3.5 + 1e-9).preserved == Index{0});
  CHECK_THROWS_AS(query_path(path, -1.0), ContractViolation);
}

TEST_CASE("sweep merge agrees with the pairwise merge") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> n(1, 30), m(2, 7);
  int multi = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const bool integer = trial % 2 == 0;
    const Index rows = n(rng), cols = m(rng);
    const DataMatrixd data(integer ? l1line::testing::random_integer_matrix(rng, rows, cols, 4)
                                   : l1line::testing::random_gaussian_matrix(rng, rows, cols));
    const auto paths = all_coordinate_paths(data);
    const auto sweep = merge_path(data, view(paths));
    const auto pairwise = merge_path_pairwise(data, view(paths));
    check_path_shape(sweep);
    multi += sweep.multi_crossing.empty() ? 0 : 1;
    // Tie-breaking may differ on degenerate intervals, so compare objectives.
    std::uniform_real_distribution<double> penalty(0, 2 * data.values().cwiseAbs().sum());
    for (int q = 0; q < 40; ++q) {
      const double lambda = penalty(rng);
      CHECK(query_path(sweep, lambda).z == doctest::Approx(query_path(pairwise, lambda).z).epsilon(1e-9));
    }
    for (const double b : sweep.breakpoints()) {
      CHECK(query_path(sweep, b).z == doctest::Approx(query_path(pairwise, b).z).epsilon(1e-9));
    }
  }
  MESSAGE("instances with several crossings in one elementary interval: " << multi);
}

TEST_CASE("path agrees with pointwise fits") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> n(1, 40), m(2, 6);
  for (int trial = 0; trial < 60; ++trial) {
    const DataMatrixd data(trial % 3 == 0 ? l1line::testing::random_integer_matrix(rng, n(rng), m(rng))
                                          : l1line::testing::random_gaussian_matrix(rng, n(rng), m(rng)));
    const auto path = solution_path(data);
    const LineFitter<double> fitter(data);
    std::uniform_real_distribution<double> penalty(0, 2 * data.values().cwiseAbs().sum());
    std::vector<double> probes{0.0};
    for (int q = 0; q < 60; ++q) probes.push_back(penalty(rng));
    for (const double b : path.breakpoints()) probes.push_back(b);
    for (const double lambda : probes) {
      const auto pointwise = fitter.fit(lambda);
      const auto queried = query_path(data, path, lambda);
      CHECK(queried.z == doctest::Approx(pointwise.z).epsilon(1e-9));
      CHECK(evaluate_objective(data, queried.v, queried.alpha, lambda) ==
            doctest::Approx(pointwise.z).epsilon(1e-9));
    }
  }
}

TEST_CASE("a dominant column keeps its own path") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Matrix<double> x(12, 2);
  for (Index i = 0; i < 12; ++i) {
    x(i, 0) = 5 + std::abs(normal(rng));
    x(i, 1) = 1e-3 * normal(rng);
  }
  const DataMatrixd data(x);
  const auto own = breakpoints_for_preserved(data, 0);
  const auto path = solution_path(data);
  for (const auto& iv : path.intervals) CHECK(iv.preserved == Index{0});
  std::vector<double> positive;
  for (const double b : own.breakpoints()) {
    if (b > 0) positive.push_back(b);
  }
  CHECK(path.breakpoints() == positive);
  for (double lambda = 0; lambda < 1; lambda += 1e-3) {
    CHECK(query_path(path, lambda).v == own.v_at(lambda));
    CHECK(query_path(path, lambda).z == doctest::Approx(fit_line(data, lambda).z).epsilon(1e-12));
  }
}

TEST_CASE("all-zero data gives the zero line") {
  const DataMatrixd data(Matrix<double>::Zero(3, 2));
  const auto path = solution_path(data);
  REQUIRE(path.intervals.size() == 1);
  CHECK_FALSE(path.intervals[0].preserved);
  CHECK(path.intervals[0].v_star.isZero());
  CHECK(query_path(path, 5.0).z == 0);
}

TEST_CASE("merge validates its input") {
  const auto data = illustrative();
  auto paths = all_coordinate_paths(data);
  CHECK_THROWS_AS(merge_path(data, std::span<const PerCoordinatePath<double>>{}), PathError);
  paths.push_back(paths.front());
  CHECK_THROWS_AS(merge_path(data, view(paths)), PathError);

  Matrix<double> wider = Matrix<double>::Ones(2, 5);
  CHECK_THROWS_AS(merge_path(DataMatrixd(wider), view(all_coordinate_paths(data))), PathError);
}

TEST_CASE("threaded path matches serial path") {
  std::mt19937_64 rng(12);
  const DataMatrixd data(l1line::testing::random_gaussian_matrix(rng, 60, 7));
  const auto serial = solution_path(data, 1);
  const auto threaded = solution_path(data, 4);
  REQUIRE(serial.intervals.size() == threaded.intervals.size());
  for (std::size_t k = 0; k < serial.intervals.size(); ++k) {
    CHECK(serial.intervals[k].lo == threaded.intervals[k].lo);
    CHECK(serial.intervals[k].v_star == threaded.intervals[k].v_star);
  }
}
