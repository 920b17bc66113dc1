#include <doctest.h>

#include <set>

#include "l1line/synth.hpp"
#include "support/fixtures.hpp"

using namespace l1line;

TEST_CASE("generator is deterministic per seed") {
  SimConfig config;
  config.n = 50;
  config.m = 8;
  config.contaminated_points = 5;
  config.contaminated_dims = 2;
  config.seed = 42;
  const auto a = generate(config);
  const auto b = generate(config);
  CHECK(a.data.values() == b.data.values());
  CHECK(a.v_true == b.v_true);
  CHECK(a.contaminated == b.contaminated);

  config.seed = 43;
  CHECK(generate(config).data.values() != a.data.values());
}

TEST_CASE("true direction is a unit vector") {
  SimConfig config;
  config.n = 10;
  config.m = 30;
  CHECK(generate(config).v_true.norm() == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("uncontaminated data equals the clean draw") {
  SimConfig config;
  config.n = 40;
  config.m = 6;
  const auto s = generate(config);
  CHECK(s.data.values() == s.clean);
  CHECK(s.contaminated.empty());

  config.contaminated_points = 10;
  config.contaminated_dims = 3;
  // Contamination draws come last, so the clean part does not move.
  CHECK(generate(config).clean == s.clean);
}

TEST_CASE("contamination touches exactly nc x mc entries on shared columns") {
  SimConfig config;
  config.n = 100;
  config.m = 12;
  config.contaminated_points = 10;
  config.contaminated_dims = 3;
  config.noise_scale = 0.5;
  const auto s = generate(config);
  CHECK(s.contaminated.size() == 30);

  std::set<Index> rows, cols;
  for (const auto& [i, j] : s.contaminated) {
    rows.insert(i);
    cols.insert(j);
    const double magnitude = std::abs(s.data(i, j));
    CHECK(magnitude >= 0.5 * config.effective_outlier_scale());
    CHECK(magnitude <= config.effective_outlier_scale());
  }
  CHECK(rows.size() == 10);
  CHECK(cols.size() == 3);

  const Matrix<double> diff = s.data.values() - s.clean;
  CHECK((diff.array() != 0).count() <= 30);
  CHECK(config.effective_outlier_scale() == 25);
}

TEST_CASE("configuration is validated") {
  SimConfig config;
  config.n = 10;
  config.m = 5;
  config.contaminated_points = 11;
  CHECK_THROWS_AS(generate(config), ContractViolation);
  config.contaminated_points = 1;
  config.contaminated_dims = 6;
  CHECK_THROWS_AS(generate(config), ContractViolation);
  config.contaminated_dims = 1;
  config.noise_scale = 0;
  CHECK_THROWS_AS(generate(config), ContractViolation);
  config.noise_scale = 1;
  config.m = 1;
  CHECK_THROWS_AS(generate(config), ContractViolation);
}

TEST_CASE("penalty summaries") {
  const auto data = l1line::testing::illustrative();
  const auto paths = all_coordinate_paths(data);
  const std::span<const PerCoordinatePath<double>> view(paths);
  const auto merged = lambda_summaries(merge_path(data, view));
  CHECK_FALSE(merged.degenerate);
  CHECK(merged.min == doctest::Approx(3));
  CHECK(merged.avg == doctest::Approx(17.5 / 3));
  CHECK(merged.max == doctest::Approx(11));

  const auto joint = lambda_summaries(view);
  CHECK(joint.min == doctest::Approx(1));
  CHECK(joint.avg == doctest::Approx(32.0 / 7));
  CHECK(joint.max == doctest::Approx(11));

  const std::vector<double> one{5};
  const auto single = summarize_breakpoints(std::span<const double>(one));
  CHECK(single.min == 5);
  CHECK(single.avg == 5);
  CHECK(single.max == 5);

  const std::vector<double> none;
  const auto empty = summarize_breakpoints(std::span<const double>(none));
  CHECK(empty.degenerate);
  CHECK(empty.min == 0);
  CHECK(empty.avg == 0);
  CHECK(empty.max == 0);
}

TEST_CASE("small simulation") {
  SimConfig config;
  config.n = 80;
  config.m = 6;
  config.contaminated_points = 8;
  config.contaminated_dims = 2;
  config.seed = 7;
  SimulationOptions options;
  options.replications = 3;
  const auto serial = simulate(config, options);
  options.threads = 3;
  const auto threaded = simulate(config, options);

  REQUIRE(serial.replications.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(serial.replications[r].seed == 7 + r);
    CHECK(serial.replications[r].l0 == threaded.replications[r].l0);
    CHECK(serial.replications[r].discordance == threaded.replications[r].discordance);
    CHECK(serial.replications[r].lambda[0] == 0);
    const auto& lam = serial.replications[r].lambda;
    CHECK(lam[2] <= lam[3]);
    CHECK(lam[3] <= lam[4]);
    CHECK(serial.replications[r].l0[4] >= 1);
  }
  for (std::size_t c = 0; c < kSimulationColumns.size(); ++c) {
    CHECK(serial.discordance[c].mean >= 0);
    CHECK(serial.discordance[c].mean <= 1);
    CHECK(serial.l0[c].sd >= 0);
  }
  // The largest breakpoint leaves only the preserved coordinate.
  CHECK(serial.l0[4].mean == 1);
}
