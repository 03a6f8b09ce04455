#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mmcast/errors.hpp"
#include "mmcast/mdp.hpp"
#include "mmcast/phy.hpp"
#include "helpers.hpp"

using namespace mmcast;

TEST_CASE("state enumeration is lexicographic and indexable") {
  SUBCASE("N=1, m=1") {
    auto states = enumerate_states(1, 1);
    REQUIRE(states.size() == 2);
    CHECK(states[0].residuals == std::vector<int>{0});
    CHECK(states[1].residuals == std::vector<int>{1});
  }
  SUBCASE("N=2, m=1 gives the four joint states") {
    auto states = enumerate_states(2, 1);
    REQUIRE(states.size() == 4);
    CHECK(states[0].residuals == std::vector<int>{0, 0});
    CHECK(states[1].residuals == std::vector<int>{0, 1});
    CHECK(states[2].residuals == std::vector<int>{1, 0});
    CHECK(states[3].residuals == std::vector<int>{1, 1});
  }
  SUBCASE("N=3, m=5 has (m+1)^N states") {
    CHECK(enumerate_states(3, 5).size() == 216);
  }
  SUBCASE("index round-trips") {
    auto states = enumerate_states(3, 2);
    for (long i = 0; i < static_cast<long>(states.size()); ++i)
      CHECK(state_index(states[i].residuals, 2) == i);
  }
  SUBCASE("state cap raises a capacity error") {
    CHECK_THROWS_AS(enumerate_states(10, 10, 1000), capacity_error);
  }
}

TEST_CASE("receive pmf is binomial") {
  SUBCASE("no transmission") {
    auto pmf = receive_pmf(0, 0.7);
    REQUIRE(pmf.size() == 1);
    CHECK(pmf[0] == 1.0);
  }
  SUBCASE("x=3, p=0.5") {
    auto pmf = receive_pmf(3, 0.5);
    CHECK(pmf[2] == doctest::Approx(0.375).epsilon(1e-12));
  }
  SUBCASE("error-free channel") {
    auto pmf = receive_pmf(2, 1.0);
    CHECK(pmf[2] == 1.0);
    CHECK(pmf[0] == 0.0);
  }
  SUBCASE("rows sum to one") {
    for (int x : {0, 1, 5, 13}) {
      for (double p : {0.0, 0.3, 0.77, 1.0}) {
        auto pmf = receive_pmf(x, p);
        double s = 0.0;
        for (double v : pmf) s += v;
        CHECK(std::fabs(s - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("joint transitions follow the shared-draw model") {
  SUBCASE("empty action set is the identity") {
    JointState st{{1, 1}};
    auto pmf = joint_transition(st, {}, {}, 1);
    CHECK(pmf[state_index({1, 1}, 1)] == 1.0);
  }
  SUBCASE("one shared beam moves both users together") {
    JointState st{{1, 1}};
    ActionSet as{{BeamAction{{0, 1}, 1, 0}}};
    auto pmf = joint_transition(st, as, {0.8}, 1);
    CHECK(pmf[state_index({0, 0}, 1)] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(pmf[state_index({1, 1}, 1)] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(pmf[state_index({0, 1}, 1)] == 0.0);
    CHECK(pmf[state_index({1, 0}, 1)] == 0.0);
  }
  SUBCASE("two unicast beams draw independently") {
    JointState st{{1, 1}};
    ActionSet as{{BeamAction{{0}, 1, 0}, BeamAction{{1}, 1, 0}}};
    auto pmf = joint_transition(st, as, {0.8, 0.8}, 1);
    CHECK(pmf[state_index({0, 0}, 1)] == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(pmf[state_index({0, 1}, 1)] == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(pmf[state_index({1, 0}, 1)] == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(pmf[state_index({1, 1}, 1)] == doctest::Approx(0.04).epsilon(1e-12));
  }
  SUBCASE("overlapping beams accumulate deliveries") {
    JointState st{{2, 2}};
    ActionSet as{{BeamAction{{0}, 1, 0}, BeamAction{{0, 1}, 1, 0}}};
    auto pmf = joint_transition(st, as, {1.0, 1.0}, 2);
    CHECK(pmf[state_index({0, 1}, 2)] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("rows sum to one and residuals never increase") {
    JointState st{{2, 1}};
    ActionSet as{{BeamAction{{0, 1}, 2, 0}, BeamAction{{1}, 1, 0}}};
    auto pmf = joint_transition(st, as, {0.6, 0.9}, 2);
    double sum = 0.0;
    auto states = enumerate_states(2, 2);
    for (long i = 0; i < static_cast<long>(pmf.size()); ++i) {
      sum += pmf[i];
      if (pmf[i] > 0.0) {
        CHECK(states[i].residuals[0] <= 2);
        CHECK(states[i].residuals[1] <= 1);
      }
    }
    CHECK(std::fabs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("value iteration basics") {
  Scenario s = testutil::two_user(8.0, 50.0, 2, 1, 2);

  SUBCASE("epsilon zero solves to the silent policy") {
    PolicyTable t = value_iteration(s, 0.0);
    CHECK(t.j0() == 0.0);
    for (const auto& per_state : t.actions)
      for (const auto& as : per_state) CHECK(as.beams.empty());
  }
  SUBCASE("do-nothing upper bound") {
    for (double eps : {1e-6, 1e-4, 1e-2}) {
      PolicyTable t = value_iteration(s, eps);
      CHECK(t.j0() <= eps * s.n_users() + 1e-15);
    }
  }
  SUBCASE("J is monotone in the state and zero at the origin") {
    PolicyTable t = value_iteration(s, 1e-4);
    CHECK(t.values[0][state_index({0, 0}, s.m)] == 0.0);
    CHECK(t.actions[0][state_index({0, 0}, s.m)].beams.empty());
    auto states = enumerate_states(2, s.m);
    for (const auto& a : states) {
      for (const auto& b : states) {
        if (a.residuals[0] <= b.residuals[0] && a.residuals[1] <= b.residuals[1])
          CHECK(t.values[0][state_index(a.residuals, s.m)] <=
                t.values[0][state_index(b.residuals, s.m)] + 1e-15);
      }
    }
  }
  SUBCASE("J0 is non-decreasing in epsilon") {
    double prev = 0.0;
    for (double eps : {0.0, 1e-6, 1e-5, 1e-4, 1e-3}) {
      double j0 = value_iteration(s, eps).j0();
      CHECK(j0 >= prev - 1e-18);
      prev = j0;
    }
  }
}

TEST_CASE("single-user value iteration matches the closed-form scan") {
  Scenario s = testutil::make_scenario({{1, 80.0, 0.0}}, 1, 0, 2);
  s.modulations = {default_modulations()[0]};
  double tau = packet_duration_s(s.modulations[0], s.phy.bandwidth_hz, s.packet_bits());
  BeamGroup beam = beam_for(s.users, {1}, s.phy.min_beamwidth_rad());
  double p = decode_probs(s.modulations[0], beam, s.users, s.phy, s.packet_bits())[0];

  for (double eps : {1e-7, 3e-6, 1e-5, 1e-4}) {
    double expect = std::numeric_limits<double>::infinity();
    for (int x = 0; x <= 2; ++x)
      expect = std::min(expect, x * tau + eps * std::pow(1.0 - p, x));
    CHECK(value_iteration(s, eps).j0() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("singleton group restriction reproduces the unicast chain sum") {
  Scenario s = testutil::two_user(8.0, 50.0, 2, 1, 4);
  SolveOptions opt;
  opt.candidate_groups = {{1}, {2}};
  double eps = 5e-5;
  PolicyTable restricted = value_iteration(s, eps, opt);

  double total = 0.0;
  for (const auto& u : s.users) {
    BeamGroup beam = beam_for(s.users, {u.id}, s.phy.min_beamwidth_rad());
    std::vector<double> p, tau;
    for (const auto& mod : s.modulations) {
      std::vector<double> ps = decode_probs(mod, beam, s.users, s.phy, s.packet_bits());
      p.push_back(*std::min_element(ps.begin(), ps.end()));
      tau.push_back(packet_duration_s(mod, s.phy.bandwidth_hz, s.packet_bits()));
    }
    total += solve_chain(p, tau, s.m, s.r_max, s.effective_x_cap(), eps, 1.0).j0();
  }
  CHECK(restricted.j0() == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("exact solver refuses large joint problems") {
  Scenario s = testutil::make_scenario(
      {{1, 80, 0}, {2, 70, 10}, {3, 60, 20}, {4, 50, 30}, {5, 40, 40}}, 1, 0, 1);
  CHECK_THROWS_AS(value_iteration(s, 1e-4), capacity_error);
  SolveOptions opt;
  opt.allow_large_n = true;
  opt.max_actionsets = 100;
  CHECK_THROWS_AS(value_iteration(s, 1e-4, opt), capacity_error);
}

TEST_CASE("chain solver respects budgets and absorbing zero") {
  std::vector<double> p = {0.7, 0.4};
  std::vector<double> tau = {2e-5, 1e-5};
  ChainSolution c = solve_chain(p, tau, 3, 1, 6, 1e-4, 1.0);
  CHECK(c.values[0][0] == 0.0);
  for (int t = 0; t <= 1; ++t) {
    for (int a = 0; a <= 6; ++a) {
      for (int r = 0; r <= 3; ++r) {
        const ChainDecision& d = c.decisions[t][a][r];
        CHECK(d.packets <= a);
        double sum = 0.0;
        for (double v : d.pmf) sum += v;
        CHECK(std::fabs(sum - 1.0) < 1e-10);
        if (r == 0) CHECK(d.packets == 0);
      }
      // more budget never hurts
      if (a > 0)
        for (int r = 0; r <= 3; ++r)
          CHECK(c.decisions[t][a][r].value <= c.decisions[t][a - 1][r].value + 1e-15);
    }
  }
}
