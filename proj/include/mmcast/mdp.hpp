#ifndef MMCAST_MDP_HPP
#define MMCAST_MDP_HPP

#include <limits>
#include <vector>

#include "mmcast/scenario.hpp"

namespace mmcast {

/// Residual packet demands <r_1,...,r_N>, each in {0,...,m}.
struct JointState {
  std::vector<int> residuals;

  bool operator==(const JointState&) const = default;
};

/// One beam transmission: x packets to a user group with one scheme.
struct BeamAction {
  std::vector<int> group;  // user ids, strictly increasing
  int packets = 0;
  int scheme = 0;  // index into Scenario::modulations

  bool operator==(const BeamAction&) const = default;
};

/// The beams fired in one slot, at most one per distinct group.
struct ActionSet {
  std::vector<BeamAction> beams;

  double total_duration(const Scenario& s) const;
  bool operator==(const ActionSet&) const = default;
};

struct SolveOptions {
  long max_states = 200000;
  long max_actionsets = 400000;  // per-state action enumeration budget
  bool allow_large_n = false;    // exact solver refuses N > 4 otherwise
  // Restrict the candidate beam groups (user-id lists); empty = all 2^N - 1
  // ordered subsets.
  std::vector<std::vector<int>> candidate_groups;
};

/// Per-slot optimal actions and cost-to-go over the joint state space.
struct PolicyTable {
  int n_users = 0;
  int m = 0;
  int r_max = 0;
  std::vector<std::vector<ActionSet>> actions;  // [t][state_index], t = 0..r_max
  std::vector<std::vector<double>> values;      // [t][state_index], t = 0..r_max+1

  double j0() const;  // J_0(<m,...,m>)
};

/// Mixed-radix index of a residual vector; inverse of enumerate_states order.
long state_index(const std::vector<int>& residuals, int m);

/// All (m+1)^N residual vectors in lexicographic order.
std::vector<JointState> enumerate_states(int n, int m, long max_states = 200000);

/// Binomial(x, p) over the number of received packets y in {0,...,x}.
std::vector<double> receive_pmf(int x, double p);

/// pmf over {0..m} of max(0, r - y) with y ~ Binomial(x, p).
std::vector<double> residual_step_pmf(int r, int x, double p, int m);

/// One-slot joint transition under worst-user reception: beam b delivers a
/// single shared draw y_b ~ Binomial(x_b, beam_p[b]) to all its members.
/// Group entries are 0-based positions into the residual vector here.
/// Returns a pmf over state indices.
std::vector<double> joint_transition(const JointState& state, const ActionSet& actions,
                                     const std::vector<double>& beam_p, int m);

/// Backward value iteration over the full joint state/action space (Bellman
/// recursion with terminal penalty epsilon per still-failed user).
PolicyTable value_iteration(const Scenario& scenario, double epsilon,
                            const SolveOptions& options = {});

// One-dimensional residual chain, shared by the baselines and the tree
// solver: state r in {0..m}, actions (x <= budget, scheme).

struct ChainDecision {
  int packets = 0;
  int scheme = 0;
  double duration = 0.0;    // current-slot airtime
  double value = 0.0;
  double efail = 0.0;       // expected terminal failure weight
  double edur = 0.0;        // expected remaining airtime (all slots)
  std::vector<double> pmf;  // over r' in {0..m}
};

struct ChainSolution {
  int m = 0;
  int r_max = 0;
  int x_cap = 0;
  // decisions[t][budget][r], t = 0..r_max, budget = 0..x_cap
  std::vector<std::vector<std::vector<ChainDecision>>> decisions;
  // values[t][r] for the unconstrained (budget = x_cap) problem, t = 0..r_max+1
  std::vector<std::vector<double>> values;
  // expected terminal failure weight and remaining airtime, same indexing
  std::vector<std::vector<double>> failures;
  std::vector<std::vector<double>> durations;

  double j0() const { return values[0][m]; }
};

/// Lexicographic improvement test shared by the solvers: strictly smaller
/// expected cost wins. Near-ties in cost are real — e.g. deferring a slot can
/// match acting early to below double precision — and are broken first toward
/// fewer expected residual failures, then toward less expected airtime, so the
/// selected plans vary smoothly along an epsilon sweep.
inline bool lex_better(double cost, double efail, double edur, double best_cost,
                       double best_efail, double best_edur) {
  if (!(best_cost < std::numeric_limits<double>::infinity())) return true;
  double tol = 1e-12 * (cost + best_cost);
  if (cost < best_cost - tol) return true;
  if (cost > best_cost + tol) return false;
  double ftol = 1e-12 * (efail + best_efail);
  if (efail < best_efail - ftol) return true;
  if (efail > best_efail + ftol) return false;
  return edur < best_edur - 1e-12 * (edur + best_edur);
}

/// Solves the chain for every slot and budget. Terminal cost is
/// epsilon * terminal_weight when r > 0 (terminal_weight = users represented
/// by one chain state: 1 for unicast, N for broadcast).
ChainSolution solve_chain(const std::vector<double>& p_per_scheme,
                          const std::vector<double>& tau_per_scheme, int m, int r_max,
                          int x_cap, double epsilon, double terminal_weight);

}  // namespace mmcast

#endif  // MMCAST_MDP_HPP
