#include <doctest.h>

#include <cmath>

#include "mmcast/errors.hpp"
#include "mmcast/sim.hpp"
#include "mmcast/tree.hpp"
#include "helpers.hpp"

using namespace mmcast;

TEST_CASE("identical seeds give bitwise-identical statistics") {
  Scenario s = testutil::two_user();
  HierarchicalPolicy h(s, 5e-4);
  SimConfig cfg{2000, 42, ReceptionMode::worst_user, 5e-4};
  SimStats a = simulate(h, s, cfg);
  SimStats b = simulate(h, s, cfg);
  CHECK(a.mean_duration_s == b.mean_duration_s);
  CHECK(a.ci95_duration_s == b.ci95_duration_s);
  CHECK(a.mean_failures == b.mean_failures);
  CHECK(a.mean_cost == b.mean_cost);

  cfg.seed = 43;
  SimStats c = simulate(h, s, cfg);
  CHECK(a.mean_duration_s != c.mean_duration_s);
}

TEST_CASE("zero-action policy scores zero duration and all users failed") {
  Scenario s = testutil::two_user();
  BroadcastPolicy silent(s, 0.0);
  SimConfig cfg{500, 1, ReceptionMode::worst_user, 3e-4};
  SimStats st = simulate(silent, s, cfg);
  CHECK(st.mean_duration_s == 0.0);
  CHECK(st.ci95_duration_s == 0.0);
  CHECK(st.mean_failures == doctest::Approx(2.0));
  CHECK(st.ci95_failures == 0.0);
  CHECK(st.mean_cost == doctest::Approx(3e-4 * 2.0));
}

TEST_CASE("a certain channel is deterministic: m packets, zero failures") {
  Scenario s = testutil::two_user();
  s.phy.tx_power_w = 1e9;  // decode probability is exactly 1 at this power
  BroadcastPolicy b(s, 1.0);
  SimConfig cfg{200, 9, ReceptionMode::worst_user, 1.0};
  SimStats st = simulate(b, s, cfg);
  CHECK(st.mean_failures == 0.0);
  CHECK(st.ci95_duration_s == 0.0);  // every run takes exactly the same airtime
  CHECK(st.mean_duration_s > 0.0);
}

TEST_CASE("monte carlo cost matches the solver expectation within 3 SE") {
  Scenario s = testutil::two_user();
  double eps = 5e-4;
  SimConfig cfg{20000, 7, ReceptionMode::worst_user, eps};
  for (const Policy* p :
       std::initializer_list<const Policy*>{new UnicastPolicy(s, eps),
                                            new BroadcastPolicy(s, eps)}) {
    SimStats st = simulate(*p, s, cfg);
    CHECK(std::fabs(st.mean_cost - p->expected_cost()) < 3.0 * st.se_cost + 1e-15);
    delete p;
  }
}

TEST_CASE("standard error shrinks like the square root of the run count") {
  Scenario s = testutil::two_user();
  double eps = 5e-4;
  UnicastPolicy u(s, eps);
  SimConfig small{1000, 3, ReceptionMode::worst_user, eps};
  SimConfig large{100000, 3, ReceptionMode::worst_user, eps};
  double ratio = simulate(u, s, small).se_cost / simulate(u, s, large).se_cost;
  CHECK(ratio > 5.0);   // expect ~10
  CHECK(ratio < 20.0);
}

TEST_CASE("per-user reception mode is accepted and distinct") {
  Scenario s = testutil::two_user();
  double eps = 5e-4;
  BroadcastPolicy b(s, eps);
  SimConfig worst{5000, 11, ReceptionMode::worst_user, eps};
  SimConfig per{5000, 11, ReceptionMode::per_user, eps};
  SimStats w = simulate(b, s, worst);
  SimStats p = simulate(b, s, per);
  // independent per-user draws can only help the best-placed user
  CHECK(p.mean_failures <= w.mean_failures + w.ci95_failures + p.ci95_failures);
}

TEST_CASE("invalid run counts are rejected") {
  Scenario s = testutil::two_user();
  BroadcastPolicy b(s, 0.0);
  SimConfig cfg{0, 1, ReceptionMode::worst_user, 0.0};
  CHECK_THROWS_AS(simulate(b, s, cfg), validation_error);
}
