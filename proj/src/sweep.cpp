#include "mmcast/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>

#include "mmcast/errors.hpp"
#include "mmcast/tree.hpp"

namespace mmcast {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::exact: return "exact";
    case PolicyKind::unicast: return "unicast";
    case PolicyKind::broadcast: return "broadcast";
    case PolicyKind::hierarchical: return "hierarchical";
  }
  throw validation_error("unknown policy kind");
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "exact") return PolicyKind::exact;
  if (s == "unicast") return PolicyKind::unicast;
  if (s == "broadcast") return PolicyKind::broadcast;
  if (s == "hierarchical") return PolicyKind::hierarchical;
  throw validation_error("unknown policy kind '" + s + "'");
}

std::unique_ptr<Policy> solve_policy(const Scenario& scenario, PolicyKind kind,
                                     double epsilon, const SolveOptions& options) {
  switch (kind) {
    case PolicyKind::exact:
      return std::make_unique<ExactPolicy>(scenario, epsilon, options);
    case PolicyKind::unicast:
      return std::make_unique<UnicastPolicy>(scenario, epsilon);
    case PolicyKind::broadcast:
      return std::make_unique<BroadcastPolicy>(scenario, epsilon);
    case PolicyKind::hierarchical:
      return std::make_unique<HierarchicalPolicy>(scenario, epsilon, options);
  }
  throw validation_error("unknown policy kind");
}

std::vector<double> default_epsilon_grid(const Scenario& scenario) {
  scenario.validate();
  double tau_min = std::numeric_limits<double>::infinity();
  for (const auto& mod : scenario.modulations)
    tau_min = std::min(tau_min, packet_duration_s(mod, scenario.phy.bandwidth_hz,
                                                  scenario.packet_bits()));
  const double base = scenario.m * tau_min * scenario.n_users();
  const double lo = 0.1 * base, hi = 100.0 * base;
  const int n = 12;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return grid;
}

std::vector<SweepRow> sweep(const Scenario& scenario, PolicyKind kind,
                            const std::vector<double>& epsilons, const SimConfig& sim) {
  scenario.validate();
  if (epsilons.empty()) throw validation_error("epsilon list must not be empty");

  auto point = [&scenario, kind, &sim](double eps) {
    std::unique_ptr<Policy> policy = solve_policy(scenario, kind, eps);
    SimConfig cfg = sim;
    cfg.mode = scenario.reception_mode;
    cfg.epsilon = eps;
    SimStats st = simulate(*policy, scenario, cfg);
    SweepRow row;
    row.scenario = scenario.name;
    row.policy = policy->kind();
    row.epsilon = eps;
    row.m = scenario.m;
    row.r_max = scenario.r_max;
    row.mean_duration_s = st.mean_duration_s;
    row.ci_duration_s = st.ci95_duration_s;
    row.mean_failures = st.mean_failures;
    row.ci_failures = st.ci95_failures;
    row.j0 = policy->expected_cost();
    row.n_runs = st.n_runs;
    row.seed = st.seed;
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(epsilons.size());
  for (double eps : epsilons)
    futures.push_back(std::async(std::launch::async, point, eps));
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "scenario,policy,epsilon,m,rmax,mean_duration_s,ci_duration_s,mean_failures,"
        "ci_failures,J0,n_runs,seed\n";
  for (const SweepRow& r : rows) {
    os << r.scenario << ',' << r.policy << ',' << fmt(r.epsilon) << ',' << r.m << ','
       << r.r_max << ',' << fmt(r.mean_duration_s) << ',' << fmt(r.ci_duration_s) << ','
       << fmt(r.mean_failures) << ',' << fmt(r.ci_failures) << ',' << fmt(r.j0) << ','
       << r.n_runs << ',' << r.seed << '\n';
  }
}

namespace {

void append_sweeps(std::vector<SweepRow>& out, const Scenario& scenario,
                   const std::vector<PolicyKind>& kinds, const SimConfig& sim) {
  const std::vector<double> grid = default_epsilon_grid(scenario);
  for (PolicyKind kind : kinds) {
    std::vector<SweepRow> rows = sweep(scenario, kind, grid, sim);
    out.insert(out.end(), rows.begin(), rows.end());
  }
}

}  // namespace

std::vector<SweepRow> figure2_rows(const Scenario& table1, const SimConfig& sim) {
  std::vector<SweepRow> out;
  for (int r_max : {0, 1, 2}) {
    Scenario s = table1;
    s.m = 5;
    s.r_max = r_max;
    s.x_cap = 2 * s.m;
    s.name = table1.name + "_rmax" + std::to_string(r_max);
    append_sweeps(out, s, {PolicyKind::hierarchical}, sim);
  }
  return out;
}

std::vector<SweepRow> figure3_rows(const Scenario& table1, const SimConfig& sim) {
  std::vector<SweepRow> out;
  for (int m : {5, 7, 10}) {
    Scenario s = table1;
    s.m = m;
    s.r_max = 2;
    s.x_cap = 2 * m;
    s.name = table1.name + "_m" + std::to_string(m);
    append_sweeps(out, s, {PolicyKind::hierarchical, PolicyKind::unicast}, sim);
  }
  return out;
}

std::vector<SweepRow> figure5_rows(const Scenario& twouser, const SimConfig& sim) {
  if (twouser.n_users() != 2)
    throw validation_error("the geometry-grid recipe needs a two-user scenario");
  std::vector<SweepRow> out;
  for (double radius : {30.0, 50.0, 80.0}) {
    for (double theta : {8.0, 40.0}) {
      Scenario s = twouser;
      s.users[1].radius_m = radius;
      s.users[1].angle_deg = theta;
      s.name = twouser.name + "_r" + std::to_string(static_cast<int>(radius)) + "_th" +
               std::to_string(static_cast<int>(theta));
      append_sweeps(out, s, {PolicyKind::unicast, PolicyKind::hierarchical}, sim);
    }
  }
  return out;
}

}  // namespace mmcast
