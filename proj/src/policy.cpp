#include "mmcast/policy.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "mmcast/errors.hpp"
#include "mmcast/tree.hpp"

namespace mmcast {

namespace {

std::string join_ids(const std::vector<int>& ids, char sep) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(ids[i]);
  }
  return s;
}

std::vector<int> split_ids(const std::string& s, char sep) {
  std::vector<int> out;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, sep)) out.push_back(std::stoi(tok));
  return out;
}

// Parses "key=value" tokens of one dump row.
std::map<std::string, std::string> parse_row(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw validation_error("policy dump: malformed token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

const std::string& field(const std::map<std::string, std::string>& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw validation_error(std::string("policy dump: missing field '") + key + "'");
  return it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExactPolicy

ExactPolicy::ExactPolicy(const Scenario& scenario, double epsilon, const SolveOptions& options)
    : epsilon_(epsilon) {
  table_ = value_iteration(scenario, epsilon, options);
  for (const auto& u : scenario.users) user_ids_.push_back(u.id);
}

ExactPolicy::ExactPolicy(PolicyTable table, std::vector<int> user_ids, double epsilon)
    : table_(std::move(table)), user_ids_(std::move(user_ids)), epsilon_(epsilon) {}

ActionSet ExactPolicy::actions(int t, const std::vector<int>& residuals) const {
  if (t < 0 || t > table_.r_max) throw validation_error("slot index out of range");
  if (static_cast<int>(residuals.size()) != table_.n_users)
    throw validation_error("residual vector size mismatch");
  for (int r : residuals)
    if (r < 0 || r > table_.m) throw validation_error("residual out of range");
  return table_.actions[t][state_index(residuals, table_.m)];
}

void ExactPolicy::dump(std::ostream& os) const {
  os << "policy exact\n";
  os.precision(17);
  os << "n_users " << table_.n_users << "\n";
  os << "m " << table_.m << "\n";
  os << "r_max " << table_.r_max << "\n";
  os << "epsilon " << epsilon_ << "\n";
  os << "j0 " << table_.j0() << "\n";
  const long n_states = static_cast<long>(table_.values[0].size());
  std::vector<int> r(table_.n_users, 0);
  for (int t = 0; t <= table_.r_max; ++t) {
    std::fill(r.begin(), r.end(), 0);
    for (long s = 0; s < n_states; ++s) {
      os << "t=" << t << " state=" << join_ids(r, ',') << " J=" << table_.values[t][s]
         << " beams=";
      const ActionSet& as = table_.actions[t][s];
      if (as.beams.empty()) {
        os << "-";
      } else {
        for (std::size_t b = 0; b < as.beams.size(); ++b) {
          if (b) os << ";";
          os << join_ids(as.beams[b].group, '+') << ":" << as.beams[b].packets << ":"
             << as.beams[b].scheme;
        }
      }
      os << "\n";
      int i = table_.n_users - 1;
      while (i >= 0 && r[i] == table_.m) r[i--] = 0;
      if (i >= 0) ++r[i];
    }
  }
}

// ---------------------------------------------------------------------------
// UnicastPolicy

UnicastPolicy::UnicastPolicy(const Scenario& scenario, double epsilon) : epsilon_(epsilon) {
  scenario.validate();
  m_ = scenario.m;
  const int x_cap = scenario.effective_x_cap();
  const int packet_bits = scenario.packet_bits();
  const int n_schemes = static_cast<int>(scenario.modulations.size());

  std::vector<double> tau(n_schemes);
  for (int s = 0; s < n_schemes; ++s)
    tau[s] = packet_duration_s(scenario.modulations[s], scenario.phy.bandwidth_hz, packet_bits);

  for (const auto& u : scenario.users) {
    user_ids_.push_back(u.id);
    BeamGroup beam = beam_for(scenario.users, {u.id}, scenario.phy.min_beamwidth_rad());
    std::vector<double> p(n_schemes);
    for (int s = 0; s < n_schemes; ++s)
      p[s] = decode_prob(scenario.modulations[s], mean_snr(u, beam, scenario.phy),
                         scenario.phy, packet_bits);
    ChainSolution chain =
        solve_chain(p, tau, scenario.m, scenario.r_max, x_cap, epsilon, 1.0);
    per_user_j0_.push_back(chain.j0());
    j0_ += chain.j0();
    std::vector<std::vector<SlotDecision>> user_grid;
    for (int t = 0; t <= scenario.r_max; ++t) {
      std::vector<SlotDecision> row(scenario.m + 1);
      for (int r = 0; r <= scenario.m; ++r) {
        const ChainDecision& d = chain.decisions[t][x_cap][r];
        row[r] = {d.packets, d.scheme};
      }
      user_grid.push_back(std::move(row));
    }
    grid_.push_back(std::move(user_grid));
  }
}

UnicastPolicy::UnicastPolicy(std::vector<int> user_ids,
                             std::vector<std::vector<std::vector<SlotDecision>>> grid,
                             double j0, double epsilon, int m)
    : user_ids_(std::move(user_ids)),
      grid_(std::move(grid)),
      j0_(j0),
      epsilon_(epsilon),
      m_(m) {
  per_user_j0_.assign(user_ids_.size(), 0.0);
}

ActionSet UnicastPolicy::actions(int t, const std::vector<int>& residuals) const {
  if (t < 0 || t >= static_cast<int>(grid_.empty() ? 0 : grid_[0].size()))
    throw validation_error("slot index out of range");
  if (residuals.size() != user_ids_.size())
    throw validation_error("residual vector size mismatch");
  ActionSet out;
  for (std::size_t i = 0; i < user_ids_.size(); ++i) {
    if (residuals[i] < 0 || residuals[i] > m_)
      throw validation_error("residual out of range");
    const SlotDecision& d = grid_[i][t][residuals[i]];
    if (d.packets > 0) out.beams.push_back({{user_ids_[i]}, d.packets, d.scheme});
  }
  return out;
}

void UnicastPolicy::dump(std::ostream& os) const {
  os << "policy unicast\n";
  os.precision(17);
  os << "n_users " << user_ids_.size() << "\n";
  os << "m " << m_ << "\n";
  os << "r_max " << (grid_.empty() ? 0 : static_cast<int>(grid_[0].size()) - 1) << "\n";
  os << "epsilon " << epsilon_ << "\n";
  os << "j0 " << j0_ << "\n";
  for (std::size_t i = 0; i < user_ids_.size(); ++i)
    for (std::size_t t = 0; t < grid_[i].size(); ++t)
      for (int r = 0; r <= m_; ++r)
        os << "user=" << user_ids_[i] << " t=" << t << " r=" << r
           << " x=" << grid_[i][t][r].packets << " s=" << grid_[i][t][r].scheme << "\n";
}

// ---------------------------------------------------------------------------
// BroadcastPolicy

BroadcastPolicy::BroadcastPolicy(const Scenario& scenario, double epsilon)
    : epsilon_(epsilon) {
  scenario.validate();
  m_ = scenario.m;
  const int x_cap = scenario.effective_x_cap();
  const int packet_bits = scenario.packet_bits();
  const int n_schemes = static_cast<int>(scenario.modulations.size());

  for (const auto& u : scenario.users) user_ids_.push_back(u.id);
  std::sort(user_ids_.begin(), user_ids_.end());
  BeamGroup beam = beam_for(scenario.users, user_ids_, scenario.phy.min_beamwidth_rad());

  std::vector<double> p(n_schemes), tau(n_schemes);
  for (int s = 0; s < n_schemes; ++s) {
    tau[s] = packet_duration_s(scenario.modulations[s], scenario.phy.bandwidth_hz, packet_bits);
    std::vector<double> ps =
        decode_probs(scenario.modulations[s], beam, scenario.users, scenario.phy, packet_bits);
    p[s] = *std::min_element(ps.begin(), ps.end());
  }
  ChainSolution chain = solve_chain(p, tau, scenario.m, scenario.r_max, x_cap, epsilon,
                                    static_cast<double>(scenario.n_users()));
  j0_ = chain.j0();
  for (int t = 0; t <= scenario.r_max; ++t) {
    std::vector<SlotDecision> row(scenario.m + 1);
    for (int r = 0; r <= scenario.m; ++r) {
      const ChainDecision& d = chain.decisions[t][x_cap][r];
      row[r] = {d.packets, d.scheme};
    }
    grid_.push_back(std::move(row));
  }
}

BroadcastPolicy::BroadcastPolicy(std::vector<int> user_ids,
                                 std::vector<std::vector<SlotDecision>> grid, double j0,
                                 double epsilon, int m)
    : user_ids_(std::move(user_ids)), grid_(std::move(grid)), j0_(j0), epsilon_(epsilon), m_(m) {}

ActionSet BroadcastPolicy::actions(int t, const std::vector<int>& residuals) const {
  if (t < 0 || t >= static_cast<int>(grid_.size()))
    throw validation_error("slot index out of range");
  if (residuals.size() != user_ids_.size())
    throw validation_error("residual vector size mismatch");
  int r_max_state = 0;
  for (int r : residuals) {
    if (r < 0 || r > m_) throw validation_error("residual out of range");
    r_max_state = std::max(r_max_state, r);
  }
  ActionSet out;
  const SlotDecision& d = grid_[t][r_max_state];
  if (d.packets > 0) out.beams.push_back({user_ids_, d.packets, d.scheme});
  return out;
}

void BroadcastPolicy::dump(std::ostream& os) const {
  os << "policy broadcast\n";
  os.precision(17);
  os << "n_users " << user_ids_.size() << "\n";
  os << "m " << m_ << "\n";
  os << "r_max " << static_cast<int>(grid_.size()) - 1 << "\n";
  os << "epsilon " << epsilon_ << "\n";
  os << "j0 " << j0_ << "\n";
  for (std::size_t t = 0; t < grid_.size(); ++t)
    for (int r = 0; r <= m_; ++r)
      os << "t=" << t << " r=" << r << " x=" << grid_[t][r].packets
         << " s=" << grid_[t][r].scheme << "\n";
}

// ---------------------------------------------------------------------------
// Loader

std::unique_ptr<Policy> load_policy(std::istream& is, const Scenario& scenario) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("policy ", 0) != 0)
    throw validation_error("policy dump: expected a 'policy <kind>' first line");
  std::string kind = line.substr(7);

  std::map<std::string, double> header;
  std::vector<std::string> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      std::istringstream h(line);
      std::string key;
      double value;
      if (!(h >> key >> value))
        throw validation_error("policy dump: malformed header line '" + line + "'");
      header[key] = value;
    } else {
      rows.push_back(line);
    }
  }
  auto hval = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end())
      throw validation_error(std::string("policy dump: missing header '") + key + "'");
    return it->second;
  };

  const int m = static_cast<int>(hval("m"));
  const int r_max = static_cast<int>(hval("r_max"));
  const double epsilon = hval("epsilon");

  if (kind == "exact") {
    PolicyTable table;
    table.n_users = static_cast<int>(hval("n_users"));
    table.m = m;
    table.r_max = r_max;
    long n_states = 1;
    for (int i = 0; i < table.n_users; ++i) n_states *= (m + 1);
    table.actions.assign(r_max + 1, std::vector<ActionSet>(n_states));
    table.values.assign(r_max + 2, std::vector<double>(n_states, 0.0));
    for (const auto& row : rows) {
      auto kv = parse_row(row);
      int t = std::stoi(field(kv, "t"));
      std::vector<int> state = split_ids(field(kv, "state"), ',');
      long idx = state_index(state, m);
      table.values[t][idx] = std::stod(field(kv, "J"));
      const std::string& beams = field(kv, "beams");
      ActionSet as;
      if (beams != "-") {
        std::istringstream bs(beams);
        std::string beam;
        while (std::getline(bs, beam, ';')) {
          auto c1 = beam.find(':');
          auto c2 = beam.find(':', c1 + 1);
          as.beams.push_back({split_ids(beam.substr(0, c1), '+'),
                              std::stoi(beam.substr(c1 + 1, c2 - c1 - 1)),
                              std::stoi(beam.substr(c2 + 1))});
        }
      }
      table.actions[t][idx] = std::move(as);
    }
    std::vector<int> ids;
    for (const auto& u : scenario.users) ids.push_back(u.id);
    return std::make_unique<ExactPolicy>(std::move(table), std::move(ids), epsilon);
  }

  if (kind == "unicast") {
    std::vector<int> ids;
    for (const auto& u : scenario.users) ids.push_back(u.id);
    std::vector<std::vector<std::vector<SlotDecision>>> grid(
        ids.size(), std::vector<std::vector<SlotDecision>>(
                        r_max + 1, std::vector<SlotDecision>(m + 1)));
    for (const auto& row : rows) {
      auto kv = parse_row(row);
      int id = std::stoi(field(kv, "user"));
      auto it = std::find(ids.begin(), ids.end(), id);
      if (it == ids.end())
        throw validation_error("policy dump: unknown user id " + std::to_string(id));
      grid[it - ids.begin()][std::stoi(field(kv, "t"))][std::stoi(field(kv, "r"))] = {
          std::stoi(field(kv, "x")), std::stoi(field(kv, "s"))};
    }
    return std::make_unique<UnicastPolicy>(std::move(ids), std::move(grid), hval("j0"),
                                           epsilon, m);
  }

  if (kind == "broadcast") {
    std::vector<int> ids;
    for (const auto& u : scenario.users) ids.push_back(u.id);
    std::sort(ids.begin(), ids.end());
    std::vector<std::vector<SlotDecision>> grid(r_max + 1,
                                                std::vector<SlotDecision>(m + 1));
    for (const auto& row : rows) {
      auto kv = parse_row(row);
      grid[std::stoi(field(kv, "t"))][std::stoi(field(kv, "r"))] = {
          std::stoi(field(kv, "x")), std::stoi(field(kv, "s"))};
    }
    return std::make_unique<BroadcastPolicy>(std::move(ids), std::move(grid), hval("j0"),
                                             epsilon, m);
  }

  if (kind == "hierarchical") {
    const int x_cap = static_cast<int>(hval("x_cap"));
    if (x_cap != scenario.effective_x_cap())
      throw validation_error("policy dump: x_cap does not match the scenario");
    std::unique_ptr<TreeNode> root = build_tree(scenario);
    std::map<std::string, int> id_of_members;
    int n_nodes = 0;
    {
      std::vector<const TreeNode*> stack = {root.get()};
      while (!stack.empty()) {
        const TreeNode* n = stack.back();
        stack.pop_back();
        id_of_members[join_ids(n->members, '+')] = n->id;
        ++n_nodes;
        for (const auto& c : n->children) stack.push_back(c.get());
      }
    }
    std::vector<std::vector<std::vector<std::vector<NodeDecision>>>> tables(
        n_nodes, std::vector<std::vector<std::vector<NodeDecision>>>(
                     r_max + 1, std::vector<std::vector<NodeDecision>>(
                                    x_cap + 1, std::vector<NodeDecision>(m + 1))));
    for (const auto& row : rows) {
      auto kv = parse_row(row);
      auto it = id_of_members.find(field(kv, "node"));
      if (it == id_of_members.end())
        throw validation_error("policy dump: node '" + field(kv, "node") +
                               "' is not in the scenario tree");
      NodeDecision d;
      d.packets = std::stoi(field(kv, "x"));
      d.scheme = std::stoi(field(kv, "s"));
      d.value = std::stod(field(kv, "J"));
      const std::string& budgets = field(kv, "budgets");
      if (budgets != "-") d.budgets = split_ids(budgets, ',');
      tables[it->second][std::stoi(field(kv, "t"))][std::stoi(field(kv, "a"))]
            [std::stoi(field(kv, "r"))] = std::move(d);
    }
    return std::make_unique<HierarchicalPolicy>(scenario, epsilon, hval("j0"),
                                                std::move(tables));
  }

  throw validation_error("policy dump: unknown kind '" + kind + "'");
}

}  // namespace mmcast
