#ifndef MMCAST_POLICY_HPP
#define MMCAST_POLICY_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mmcast/mdp.hpp"

namespace mmcast {

/// A solved transmission policy, executable slot by slot by the simulator.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string kind() const = 0;
  /// Beams to fire in slot t given the observed residual demands.
  virtual ActionSet actions(int t, const std::vector<int>& residuals) const = 0;
  /// The solver's cost estimate J0 from the all-m start state.
  virtual double expected_cost() const = 0;
  /// Structured text dump, parseable by load_policy.
  virtual void dump(std::ostream& os) const = 0;
};

struct SlotDecision {
  int packets = 0;
  int scheme = 0;
};

/// Optimal joint policy from full value iteration.
class ExactPolicy final : public Policy {
 public:
  ExactPolicy(const Scenario& scenario, double epsilon, const SolveOptions& options = {});
  ExactPolicy(PolicyTable table, std::vector<int> user_ids, double epsilon);

  std::string kind() const override { return "exact"; }
  ActionSet actions(int t, const std::vector<int>& residuals) const override;
  double expected_cost() const override { return table_.j0(); }
  void dump(std::ostream& os) const override;

  const PolicyTable& table() const { return table_; }

 private:
  PolicyTable table_;
  std::vector<int> user_ids_;
  double epsilon_ = 0.0;
};

/// Per-user independent chains, each on its own minimum-width beam.
class UnicastPolicy final : public Policy {
 public:
  UnicastPolicy(const Scenario& scenario, double epsilon);
  UnicastPolicy(std::vector<int> user_ids, std::vector<std::vector<std::vector<SlotDecision>>> grid,
                double j0, double epsilon, int m);

  std::string kind() const override { return "unicast"; }
  ActionSet actions(int t, const std::vector<int>& residuals) const override;
  double expected_cost() const override { return j0_; }
  void dump(std::ostream& os) const override;

  double per_user_j0(int user_pos) const { return per_user_j0_.at(user_pos); }

 private:
  std::vector<int> user_ids_;
  // grid_[user][t][r] with the unconstrained budget
  std::vector<std::vector<std::vector<SlotDecision>>> grid_;
  std::vector<double> per_user_j0_;
  double j0_ = 0.0;
  double epsilon_ = 0.0;
  int m_ = 0;
};

/// Single all-users beam driven by the max-residual chain.
class BroadcastPolicy final : public Policy {
 public:
  BroadcastPolicy(const Scenario& scenario, double epsilon);
  BroadcastPolicy(std::vector<int> user_ids, std::vector<std::vector<SlotDecision>> grid,
                  double j0, double epsilon, int m);

  std::string kind() const override { return "broadcast"; }
  ActionSet actions(int t, const std::vector<int>& residuals) const override;
  double expected_cost() const override { return j0_; }
  void dump(std::ostream& os) const override;

 private:
  std::vector<int> user_ids_;
  std::vector<std::vector<SlotDecision>> grid_;  // [t][r]
  double j0_ = 0.0;
  double epsilon_ = 0.0;
  int m_ = 0;
};

/// Parses a dump produced by any Policy::dump (the scenario supplies tree
/// structure and user identities where the dump omits them).
std::unique_ptr<Policy> load_policy(std::istream& is, const Scenario& scenario);

}  // namespace mmcast

#endif  // MMCAST_POLICY_HPP
