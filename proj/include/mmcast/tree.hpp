#ifndef MMCAST_TREE_HPP
#define MMCAST_TREE_HPP

#include <map>
#include <memory>
#include <vector>

#include "mmcast/policy.hpp"

namespace mmcast {

/// A node of the user hierarchy; every node owns the beam covering its group.
struct TreeNode {
  int id = 0;  // post-order index, root last
  std::vector<int> members;
  std::vector<std::unique_ptr<TreeNode>> children;
  BeamGroup beam;
  int leaf_count = 1;

  bool is_leaf() const { return children.empty(); }
};

/// Builds the tree from the scenario's tree spec: "binary-index-order"
/// (balanced binary over users sorted by id) or an explicit nesting of user
/// ids, validated as a partition with singleton leaves.
std::unique_ptr<TreeNode> build_tree(const Scenario& scenario);

/// Worst-case compression of children residuals (their maximum).
int aggregate(const std::vector<int>& children_residuals);

/// One solved cell of a node's budget-indexed reduced MDP.
struct NodeDecision {
  int packets = 0;
  int scheme = 0;
  std::vector<int> budgets;  // per child, empty for leaves
  double duration = 0.0;     // expected current-slot subtree airtime
  double value = 0.0;
  double efail = 0.0;        // expected leaf members still failed at the end
  double edur = 0.0;         // expected remaining subtree airtime (all slots)
  std::vector<double> pmf;   // over r' in {0..m}
};

/// Suboptimal policy from the per-node reduced MDPs with max-aggregation.
class HierarchicalPolicy final : public Policy {
 public:
  HierarchicalPolicy(const Scenario& scenario, double epsilon,
                     const SolveOptions& options = {});
  /// Rebuilds a policy from parsed tables (dump loader path).
  HierarchicalPolicy(const Scenario& scenario, double epsilon, double j0,
                     std::vector<std::vector<std::vector<std::vector<NodeDecision>>>> tables);

  std::string kind() const override { return "hierarchical"; }
  ActionSet actions(int t, const std::vector<int>& residuals) const override;
  double expected_cost() const override { return j0_; }
  void dump(std::ostream& os) const override;

  const TreeNode& root() const { return *root_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int node_id) const { return *nodes_.at(node_id); }
  /// The one-step outcome of a node constrained by a packet budget.
  const NodeDecision& decision(int node_id, int t, int budget, int r) const;
  /// J^node_t(r) for t = 0..r_max+1 (unconstrained future budgets).
  const std::vector<std::vector<double>>& node_values(int node_id) const;

 private:
  void index_nodes();
  void solve(const Scenario& scenario);

  std::unique_ptr<TreeNode> root_;
  std::vector<const TreeNode*> nodes_;  // by id, post-order
  // tables_[node][t][budget][r]
  std::vector<std::vector<std::vector<std::vector<NodeDecision>>>> tables_;
  std::vector<std::vector<std::vector<double>>> values_;  // [node][t][r]
  std::map<int, int> pos_of_id_;  // user id -> residual-vector position
  std::vector<int> user_ids_;     // residual-vector order
  int m_ = 0;
  int r_max_ = 0;
  int x_cap_ = 0;
  double epsilon_ = 0.0;
  double j0_ = 0.0;
};

}  // namespace mmcast

#endif  // MMCAST_TREE_HPP
