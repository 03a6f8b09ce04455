#include <doctest.h>

#include <sstream>

#include "mmcast/errors.hpp"
#include "mmcast/sweep.hpp"
#include "helpers.hpp"

using namespace mmcast;

TEST_CASE("policy kind strings round-trip") {
  for (PolicyKind k : {PolicyKind::exact, PolicyKind::unicast, PolicyKind::broadcast,
                       PolicyKind::hierarchical})
    CHECK(policy_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(policy_kind_from_string("greedy"), validation_error);
}

TEST_CASE("default epsilon grid brackets the airtime scale") {
  Scenario s = testutil::two_user();
  auto grid = default_epsilon_grid(s);
  REQUIRE(grid.size() == 12);
  CHECK(grid.back() / grid.front() == doctest::Approx(1000.0).epsilon(1e-9));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  // centered on m * tau_min * N
  double tau16 = packet_duration_s(s.modulations[1], s.phy.bandwidth_hz, s.packet_bits());
  CHECK(grid.front() == doctest::Approx(0.1 * s.m * tau16 * 2).epsilon(1e-12));
}

TEST_CASE("csv header and layout are fixed") {
  SweepRow row;
  row.scenario = "twouser";
  row.policy = "unicast";
  row.epsilon = 1e-4;
  row.m = 5;
  row.r_max = 2;
  row.n_runs = 10;
  row.seed = 1;
  std::stringstream ss;
  write_csv({row}, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "scenario,policy,epsilon,m,rmax,mean_duration_s,ci_duration_s,mean_failures,"
        "ci_failures,J0,n_runs,seed");
  std::string line;
  std::getline(ss, line);
  CHECK(line.rfind("twouser,unicast,0.0001", 0) == 0);
}

TEST_CASE("epsilon zero sweeps to the silent policy row") {
  Scenario s = testutil::two_user();
  SimConfig cfg{200, 5, ReceptionMode::worst_user, 0.0};
  auto rows = sweep(s, PolicyKind::broadcast, {0.0}, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean_duration_s == 0.0);
  CHECK(rows[0].mean_failures == doctest::Approx(2.0));
  CHECK(rows[0].j0 == 0.0);
}

TEST_CASE("sweeps are deterministic under a fixed seed") {
  Scenario s = testutil::two_user();
  SimConfig cfg{500, 99, ReceptionMode::worst_user, 0.0};
  std::vector<double> eps = {1e-5, 5e-5, 2e-4};
  std::stringstream a, b;
  write_csv(sweep(s, PolicyKind::unicast, eps, cfg), a);
  write_csv(sweep(s, PolicyKind::unicast, eps, cfg), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("unicast") != std::string::npos);
}

TEST_CASE("rows carry the scenario context") {
  Scenario s = testutil::two_user();
  s.name = "probe";
  SimConfig cfg{100, 3, ReceptionMode::worst_user, 0.0};
  auto rows = sweep(s, PolicyKind::hierarchical, {1e-5, 1e-4}, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.scenario == "probe");
    CHECK(r.policy == "hierarchical");
    CHECK(r.m == 5);
    CHECK(r.r_max == 2);
    CHECK(r.n_runs == 100);
    CHECK(r.seed == 3);
  }
  CHECK(rows[0].epsilon == 1e-5);
  CHECK(rows[1].epsilon == 1e-4);
}

TEST_CASE("figure recipes produce the expected families") {
  Scenario twouser = testutil::two_user();
  twouser.name = "twouser";
  SimConfig cfg{50, 2, ReceptionMode::worst_user, 0.0};
  auto rows = figure5_rows(twouser, cfg);
  CHECK(rows.size() == 6 * 2 * 12);  // 6 panels x {unicast, hierarchical} x grid
  bool seen = false;
  for (const auto& r : rows) seen |= (r.scenario == "twouser_r50_th8");
  CHECK(seen);
}
