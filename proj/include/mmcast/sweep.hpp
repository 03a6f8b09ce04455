#ifndef MMCAST_SWEEP_HPP
#define MMCAST_SWEEP_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mmcast/sim.hpp"

namespace mmcast {

enum class PolicyKind { exact, unicast, broadcast, hierarchical };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& s);

/// Solves the scenario with the requested solver.
std::unique_ptr<Policy> solve_policy(const Scenario& scenario, PolicyKind kind,
                                     double epsilon, const SolveOptions& options = {});

/// Logarithmic 12-point grid spanning 0.1x .. 100x of m * tau_min * N, the
/// airtime scale at which the deadline penalty starts to bite.
std::vector<double> default_epsilon_grid(const Scenario& scenario);

/// One (policy, epsilon) measurement point.
struct SweepRow {
  std::string scenario;
  std::string policy;
  double epsilon = 0.0;
  int m = 0;
  int r_max = 0;
  double mean_duration_s = 0.0;
  double ci_duration_s = 0.0;
  double mean_failures = 0.0;
  double ci_failures = 0.0;
  double j0 = 0.0;
  long n_runs = 0;
  std::uint64_t seed = 0;
};

/// Solves once per epsilon (points run concurrently), simulates each policy,
/// and returns rows in epsilon order.
std::vector<SweepRow> sweep(const Scenario& scenario, PolicyKind kind,
                            const std::vector<double>& epsilons, const SimConfig& sim);

/// Writes the fixed-schema CSV (header + one row per point, %.17g doubles).
void write_csv(const std::vector<SweepRow>& rows, std::ostream& os);

// Figure recipes: each returns the rows of one ready-to-plot data file.

/// Retransmission-budget comparison: hierarchical policy on the 8-user
/// scenario with r_max in {0, 1, 2} at m = 5.
std::vector<SweepRow> figure2_rows(const Scenario& table1, const SimConfig& sim);

/// File-size comparison: hierarchical vs unicast on the 8-user scenario with
/// m in {5, 7, 10}, r_max = 2, x_cap = 2m.
std::vector<SweepRow> figure3_rows(const Scenario& table1, const SimConfig& sim);

/// Two-user geometry grid: unicast vs hierarchical with user 2 at radius
/// {30, 50, 80} m and angle {8, 40} degrees; panels named like twouser_r50_th8.
std::vector<SweepRow> figure5_rows(const Scenario& twouser, const SimConfig& sim);

}  // namespace mmcast

#endif  // MMCAST_SWEEP_HPP
