#include "mmcast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "mmcast/errors.hpp"

namespace mmcast {

namespace {

std::unique_ptr<TreeNode> balanced_binary(const std::vector<int>& ids, std::size_t lo,
                                          std::size_t hi) {
  auto node = std::make_unique<TreeNode>();
  if (hi - lo == 1) {
    node->members = {ids[lo]};
    return node;
  }
  std::size_t mid = lo + (hi - lo + 1) / 2;
  node->children.push_back(balanced_binary(ids, lo, mid));
  node->children.push_back(balanced_binary(ids, mid, hi));
  for (const auto& c : node->children)
    node->members.insert(node->members.end(), c->members.begin(), c->members.end());
  return node;
}

std::unique_ptr<TreeNode> from_nested(const nlohmann::json& spec) {
  auto node = std::make_unique<TreeNode>();
  if (spec.is_number_integer()) {
    node->members = {spec.get<int>()};
    return node;
  }
  if (!spec.is_array() || spec.size() < 2)
    throw validation_error("tree spec: internal nodes need at least two children");
  for (const auto& child_spec : spec) node->children.push_back(from_nested(child_spec));
  for (const auto& c : node->children)
    node->members.insert(node->members.end(), c->members.begin(), c->members.end());
  std::sort(node->members.begin(), node->members.end());
  return node;
}

void finalize(TreeNode& node, const Scenario& scenario, int& next_id) {
  node.leaf_count = 0;
  for (auto& c : node.children) {
    finalize(*c, scenario, next_id);
    node.leaf_count += c->leaf_count;
  }
  if (node.children.empty()) node.leaf_count = 1;
  node.beam = beam_for(scenario.users, node.members, scenario.phy.min_beamwidth_rad());
  node.id = next_id++;  // post-order: children first
}

void collect(const TreeNode& node, std::vector<const TreeNode*>& out) {
  for (const auto& c : node.children) collect(*c, out);
  out.push_back(&node);
}

std::string members_key(const std::vector<int>& members) {
  std::string s;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(members[i]);
  }
  return s;
}

}  // namespace

std::unique_ptr<TreeNode> build_tree(const Scenario& scenario) {
  std::vector<int> ids;
  for (const auto& u : scenario.users) ids.push_back(u.id);
  std::sort(ids.begin(), ids.end());

  std::unique_ptr<TreeNode> root;
  if (scenario.tree.is_string() && scenario.tree.get<std::string>() == "binary-index-order") {
    root = balanced_binary(ids, 0, ids.size());
  } else if (scenario.tree.is_array() || scenario.tree.is_number_integer()) {
    root = from_nested(scenario.tree);
  } else {
    throw validation_error("tree spec: expected \"binary-index-order\" or nested id lists");
  }

  // The leaves must partition the user set.
  std::multiset<int> leaf_ids;
  std::vector<const TreeNode*> stack = {root.get()};
  while (!stack.empty()) {
    const TreeNode* n = stack.back();
    stack.pop_back();
    if (n->children.empty()) leaf_ids.insert(n->members.front());
    for (const auto& c : n->children) stack.push_back(c.get());
  }
  if (std::multiset<int>(ids.begin(), ids.end()) != leaf_ids)
    throw validation_error("tree spec: leaves must partition the user set exactly");

  int next_id = 0;
  finalize(*root, scenario, next_id);
  return root;
}

int aggregate(const std::vector<int>& children_residuals) {
  if (children_residuals.empty())
    throw validation_error("aggregate requires a non-empty residual list");
  return *std::max_element(children_residuals.begin(), children_residuals.end());
}

HierarchicalPolicy::HierarchicalPolicy(const Scenario& scenario, double epsilon,
                                       const SolveOptions& /*options*/) {
  scenario.validate();
  if (epsilon < 0.0) throw validation_error("epsilon must be >= 0");
  epsilon_ = epsilon;
  m_ = scenario.m;
  r_max_ = scenario.r_max;
  x_cap_ = scenario.effective_x_cap();
  root_ = build_tree(scenario);
  index_nodes();
  for (int i = 0; i < scenario.n_users(); ++i) {
    pos_of_id_[scenario.users[i].id] = i;
    user_ids_.push_back(scenario.users[i].id);
  }
  solve(scenario);
}

HierarchicalPolicy::HierarchicalPolicy(
    const Scenario& scenario, double epsilon, double j0,
    std::vector<std::vector<std::vector<std::vector<NodeDecision>>>> tables) {
  scenario.validate();
  epsilon_ = epsilon;
  m_ = scenario.m;
  r_max_ = scenario.r_max;
  x_cap_ = scenario.effective_x_cap();
  j0_ = j0;
  root_ = build_tree(scenario);
  index_nodes();
  for (int i = 0; i < scenario.n_users(); ++i) {
    pos_of_id_[scenario.users[i].id] = i;
    user_ids_.push_back(scenario.users[i].id);
  }
  if (tables.size() != nodes_.size())
    throw validation_error("hierarchical dump does not match the scenario tree");
  tables_ = std::move(tables);
}

void HierarchicalPolicy::index_nodes() {
  nodes_.clear();
  collect(*root_, nodes_);
  // collect() is post-order, matching the ids assigned in finalize().
}

void HierarchicalPolicy::solve(const Scenario& scenario) {
  const int n_nodes = static_cast<int>(nodes_.size());
  const int n_schemes = static_cast<int>(scenario.modulations.size());
  const int packet_bits = scenario.packet_bits();

  std::vector<double> tau(n_schemes);
  for (int s = 0; s < n_schemes; ++s)
    tau[s] = packet_duration_s(scenario.modulations[s], scenario.phy.bandwidth_hz, packet_bits);

  // Worst-member decode probability of every node's beam, per scheme.
  std::vector<std::vector<double>> node_p(n_nodes, std::vector<double>(n_schemes));
  for (int k = 0; k < n_nodes; ++k) {
    for (int s = 0; s < n_schemes; ++s) {
      std::vector<double> ps = decode_probs(scenario.modulations[s], nodes_[k]->beam,
                                            scenario.users, scenario.phy, packet_bits);
      node_p[k][s] = *std::min_element(ps.begin(), ps.end());
    }
  }

  tables_.assign(n_nodes,
                 std::vector<std::vector<std::vector<NodeDecision>>>(
                     r_max_ + 1, std::vector<std::vector<NodeDecision>>(
                                     x_cap_ + 1, std::vector<NodeDecision>(m_ + 1))));
  values_.assign(n_nodes, std::vector<std::vector<double>>(
                              r_max_ + 2, std::vector<double>(m_ + 1, 0.0)));
  // Expected terminal failures and remaining subtree airtime, used only to
  // break cost ties.
  std::vector<std::vector<std::vector<double>>> fvalues(
      n_nodes, std::vector<std::vector<double>>(r_max_ + 2,
                                                std::vector<double>(m_ + 1, 0.0)));
  std::vector<std::vector<std::vector<double>>> dvalues(
      n_nodes, std::vector<std::vector<double>>(r_max_ + 2,
                                                std::vector<double>(m_ + 1, 0.0)));
  for (int k = 0; k < n_nodes; ++k) {
    for (int r = 1; r <= m_; ++r) {
      values_[k][r_max_ + 1][r] = epsilon_ * nodes_[k]->leaf_count;
      fvalues[k][r_max_ + 1][r] = nodes_[k]->leaf_count;
    }
  }

  for (int t = r_max_; t >= 0; --t) {
    for (int k = 0; k < n_nodes; ++k) {  // post-order: children before parents
      const TreeNode& node = *nodes_[k];
      const std::vector<double>& next = values_[k][t + 1];
      const std::vector<double>& fnext = fvalues[k][t + 1];
      const std::vector<double>& dnext = dvalues[k][t + 1];

      if (node.is_leaf()) {
        for (int a = 0; a <= x_cap_; ++a) {
          for (int r = 0; r <= m_; ++r) {
            NodeDecision best;
            best.value = std::numeric_limits<double>::infinity();
            for (int x = 0; x <= a; ++x) {
              for (int s = 0; s < (x == 0 ? 1 : n_schemes); ++s) {
                std::vector<double> pmf = residual_step_pmf(r, x, node_p[k][s], m_);
                double dur = x * tau[s];
                double cost = dur;
                double efail = 0.0;
                double edur = dur;
                for (int rp = 0; rp <= m_; ++rp) {
                  cost += pmf[rp] * next[rp];
                  efail += pmf[rp] * fnext[rp];
                  edur += pmf[rp] * dnext[rp];
                }
                if (lex_better(cost, efail, edur, best.value, best.efail, best.edur)) {
                  best.packets = x;
                  best.scheme = x == 0 ? 0 : s;
                  best.duration = dur;
                  best.value = cost;
                  best.efail = efail;
                  best.edur = edur;
                  best.pmf = std::move(pmf);
                }
              }
            }
            tables_[k][t][a][r] = std::move(best);
          }
        }
      } else {
        const int p = static_cast<int>(node.children.size());
        std::vector<int> child_ids;
        for (const auto& c : node.children) child_ids.push_back(c->id);

        // Beam step of this node's own transmission: B[x][s][u][r'].
        std::vector<std::vector<std::vector<std::vector<double>>>> beam_step(
            x_cap_ + 1,
            std::vector<std::vector<std::vector<double>>>(
                n_schemes, std::vector<std::vector<double>>(m_ + 1)));
        for (int x = 1; x <= x_cap_; ++x)
          for (int s = 0; s < n_schemes; ++s)
            for (int u = 0; u <= m_; ++u)
              beam_step[x][s][u] = residual_step_pmf(u, x, node_p[k][s], m_);

        // One-step pmf of a child's aggregate under budget a_l, from the
        // child's own solved slot-t cell.
        auto child_row = [&](int l, int a_l, int r) -> const std::vector<double>& {
          return tables_[child_ids[l]][t][a_l][r].pmf;
        };

        // This node's beam delivers one shared worst-member draw, so the
        // aggregate evolves as max over children first, then the beam step.
        std::vector<double> cdf(m_ + 1), upmf(m_ + 1), pmf(m_ + 1);
        for (int a = 0; a <= x_cap_; ++a) {
          for (int r = 0; r <= m_; ++r) {
            NodeDecision best;
            best.value = std::numeric_limits<double>::infinity();
            std::vector<int> budgets(p, 0);
            while (true) {
              double children_dur = 0.0;
              for (int l = 0; l < p; ++l)
                children_dur += tables_[child_ids[l]][t][budgets[l]][r].duration;
              // Max over children via the product of their CDFs.
              for (int rp = 0; rp <= m_; ++rp) {
                double acc = 1.0;
                for (int l = 0; l < p; ++l) {
                  const std::vector<double>& row = child_row(l, budgets[l], r);
                  double c = 0.0;
                  for (int q = 0; q <= rp; ++q) c += row[q];
                  acc *= c;
                }
                cdf[rp] = acc;
              }
              double prev = 0.0;
              for (int rp = 0; rp <= m_; ++rp) {
                upmf[rp] = cdf[rp] - prev;
                prev = cdf[rp];
              }
              for (int x = 0; x <= a; ++x) {
                for (int s = 0; s < (x == 0 ? 1 : n_schemes); ++s) {
                  if (x == 0) {
                    pmf = upmf;
                  } else {
                    std::fill(pmf.begin(), pmf.end(), 0.0);
                    for (int u = 0; u <= m_; ++u) {
                      if (upmf[u] == 0.0) continue;
                      const std::vector<double>& brow = beam_step[x][s][u];
                      for (int rp = 0; rp <= m_; ++rp) pmf[rp] += upmf[u] * brow[rp];
                    }
                  }
                  double dur = x * tau[s] + children_dur;
                  double cost = dur;
                  double efail = 0.0;
                  double edur = dur;
                  for (int rp = 0; rp <= m_; ++rp) {
                    cost += pmf[rp] * next[rp];
                    efail += pmf[rp] * fnext[rp];
                    edur += pmf[rp] * dnext[rp];
                  }
                  if (lex_better(cost, efail, edur, best.value, best.efail, best.edur)) {
                    best.packets = x;
                    best.scheme = x == 0 ? 0 : s;
                    best.budgets = budgets;
                    best.duration = dur;
                    best.value = cost;
                    best.efail = efail;
                    best.edur = edur;
                    best.pmf = pmf;
                  }
                }
              }
              int l = p - 1;
              while (l >= 0 && budgets[l] == a) budgets[l--] = 0;
              if (l < 0) break;
              ++budgets[l];
            }
            tables_[k][t][a][r] = std::move(best);
          }
        }
      }

      for (int r = 0; r <= m_; ++r) {
        values_[k][t][r] = tables_[k][t][x_cap_][r].value;
        fvalues[k][t][r] = tables_[k][t][x_cap_][r].efail;
        dvalues[k][t][r] = tables_[k][t][x_cap_][r].edur;
      }
    }
  }
  j0_ = values_[root_->id][0][m_];
}

namespace {

int node_aggregate(const TreeNode& node, const std::vector<int>& residuals,
                   const std::map<int, int>& pos_of_id) {
  if (node.is_leaf()) return residuals[pos_of_id.at(node.members.front())];
  std::vector<int> child_states;
  for (const auto& c : node.children)
    child_states.push_back(node_aggregate(*c, residuals, pos_of_id));
  return aggregate(child_states);
}

}  // namespace

ActionSet HierarchicalPolicy::actions(int t, const std::vector<int>& residuals) const {
  if (t < 0 || t > r_max_) throw validation_error("slot index out of range");
  if (static_cast<int>(residuals.size()) != static_cast<int>(user_ids_.size()))
    throw validation_error("residual vector size mismatch");
  for (int r : residuals)
    if (r < 0 || r > m_) throw validation_error("residual out of range");

  ActionSet out;
  // Budgets propagate root to leaves; every node is indexed by the max of
  // its leaves' observed residuals.
  std::vector<std::pair<const TreeNode*, int>> stack = {{root_.get(), x_cap_}};
  while (!stack.empty()) {
    auto [node, budget] = stack.back();
    stack.pop_back();
    int r = node_aggregate(*node, residuals, pos_of_id_);
    const NodeDecision& d = tables_[node->id][t][budget][r];
    if (d.packets > 0) out.beams.push_back({node->members, d.packets, d.scheme});
    for (std::size_t l = 0; l < node->children.size(); ++l)
      stack.emplace_back(node->children[l].get(), d.budgets.empty() ? 0 : d.budgets[l]);
  }
  std::sort(out.beams.begin(), out.beams.end(),
            [](const BeamAction& a, const BeamAction& b) { return a.group < b.group; });
  return out;
}

const NodeDecision& HierarchicalPolicy::decision(int node_id, int t, int budget, int r) const {
  return tables_.at(node_id).at(t).at(budget).at(r);
}

const std::vector<std::vector<double>>& HierarchicalPolicy::node_values(int node_id) const {
  return values_.at(node_id);
}

void HierarchicalPolicy::dump(std::ostream& os) const {
  os << "policy hierarchical\n";
  os.precision(17);
  os << "epsilon " << epsilon_ << "\n";
  os << "m " << m_ << "\n";
  os << "r_max " << r_max_ << "\n";
  os << "x_cap " << x_cap_ << "\n";
  os << "j0 " << j0_ << "\n";
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    for (int t = 0; t <= r_max_; ++t) {
      for (int a = 0; a <= x_cap_; ++a) {
        for (int r = 0; r <= m_; ++r) {
          const NodeDecision& d = tables_[k][t][a][r];
          os << "node=" << members_key(nodes_[k]->members) << " t=" << t << " a=" << a
             << " r=" << r << " x=" << d.packets << " s=" << d.scheme << " budgets=";
          if (d.budgets.empty()) {
            os << "-";
          } else {
            for (std::size_t l = 0; l < d.budgets.size(); ++l)
              os << (l ? "," : "") << d.budgets[l];
          }
          os << " J=" << d.value << "\n";
        }
      }
    }
  }
}

}  // namespace mmcast
