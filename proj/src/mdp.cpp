#include "mmcast/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmcast/errors.hpp"

namespace mmcast {

double ActionSet::total_duration(const Scenario& s) const {
  double total = 0.0;
  for (const auto& b : beams)
    total += b.packets *
             packet_duration_s(s.modulations.at(b.scheme), s.phy.bandwidth_hz, s.packet_bits());
  return total;
}

double PolicyTable::j0() const {
  // All-m state is the last index in lexicographic order.
  return values[0].back();
}

long state_index(const std::vector<int>& residuals, int m) {
  long idx = 0;
  for (int r : residuals) idx = idx * (m + 1) + r;
  return idx;
}

std::vector<JointState> enumerate_states(int n, int m, long max_states) {
  if (n < 1 || m < 1) throw validation_error("enumerate_states requires n >= 1, m >= 1");
  double count = std::pow(static_cast<double>(m + 1), n);
  if (count > static_cast<double>(max_states))
    throw capacity_error("joint state space (m+1)^N = " + std::to_string(count) +
                         " exceeds the cap of " + std::to_string(max_states) +
                         "; use the hierarchical solver");
  std::vector<JointState> states;
  states.reserve(static_cast<std::size_t>(count));
  std::vector<int> r(n, 0);
  while (true) {
    states.push_back({r});
    int i = n - 1;
    while (i >= 0 && r[i] == m) r[i--] = 0;
    if (i < 0) break;
    ++r[i];
  }
  return states;
}

std::vector<double> receive_pmf(int x, double p) {
  if (x < 0) throw validation_error("receive_pmf requires x >= 0");
  if (p < 0.0 || p > 1.0) throw validation_error("receive_pmf requires p in [0,1]");
  std::vector<double> pmf(x + 1, 0.0);
  if (x == 0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[x] = 1.0;
    return pmf;
  }
  // C(x,y) p^y (1-p)^(x-y) via the multiplicative recurrence.
  double q = 1.0 - p;
  double term = std::pow(q, x);
  pmf[0] = term;
  for (int y = 1; y <= x; ++y) {
    term *= (static_cast<double>(x - y + 1) / y) * (p / q);
    pmf[y] = term;
  }
  return pmf;
}

std::vector<double> residual_step_pmf(int r, int x, double p, int m) {
  std::vector<double> out(m + 1, 0.0);
  std::vector<double> y_pmf = receive_pmf(x, p);
  for (int y = 0; y <= x; ++y) out[std::max(0, r - y)] += y_pmf[y];
  return out;
}

std::vector<double> joint_transition(const JointState& state, const ActionSet& actions,
                                     const std::vector<double>& beam_p, int m) {
  const int n = static_cast<int>(state.residuals.size());
  if (actions.beams.size() != beam_p.size())
    throw validation_error("joint_transition: one decode probability per beam required");
  long n_states = 1;
  for (int i = 0; i < n; ++i) n_states *= (m + 1);
  std::vector<double> out(n_states, 0.0);

  // Enumerate the joint per-beam draws iteratively (odometer).
  std::vector<std::vector<double>> pmfs;
  std::vector<std::vector<int>> member_pos;
  for (std::size_t b = 0; b < actions.beams.size(); ++b) {
    pmfs.push_back(receive_pmf(actions.beams[b].packets, beam_p[b]));
    // For this low-level operation, group entries are 0-based positions
    // into the residual vector.
    member_pos.push_back(actions.beams[b].group);
  }

  std::vector<int> y(actions.beams.size(), 0);
  while (true) {
    double prob = 1.0;
    for (std::size_t b = 0; b < y.size(); ++b) prob *= pmfs[b][y[b]];
    if (prob > 0.0) {
      std::vector<int> next(state.residuals);
      for (std::size_t b = 0; b < y.size(); ++b)
        for (int pos : member_pos[b]) next[pos] = std::max(0, next[pos] - y[b]);
      out[state_index(next, m)] += prob;
    }
    int b = static_cast<int>(y.size()) - 1;
    while (b >= 0 && y[b] == static_cast<int>(pmfs[b].size()) - 1) y[b--] = 0;
    if (b < 0) break;
    ++y[b];
  }
  if (actions.beams.empty()) out[state_index(state.residuals, m)] = 1.0;
  return out;
}

namespace {

struct BeamOption {
  int packets = 0;
  int scheme = -1;  // -1 means "no transmission"
};

struct CompiledAction {
  double duration = 0.0;
  std::vector<std::pair<long, double>> delivered;  // (delivered-vector index, prob)
  std::vector<std::pair<int, BeamOption>> active;  // (group index, option)
};

}  // namespace

PolicyTable value_iteration(const Scenario& scenario, double epsilon,
                            const SolveOptions& options) {
  scenario.validate();
  if (epsilon < 0.0) throw validation_error("epsilon must be >= 0");
  const int n = scenario.n_users();
  const int m = scenario.m;
  const int r_max = scenario.r_max;
  const int x_cap = scenario.effective_x_cap();
  const int n_schemes = static_cast<int>(scenario.modulations.size());

  if (n > 4 && !options.allow_large_n)
    throw capacity_error("exact solver refuses N > 4 (joint action space explodes); "
                         "use the hierarchical solver or allow_large_n");

  std::vector<JointState> states = enumerate_states(n, m, options.max_states);
  const long n_states = static_cast<long>(states.size());

  // Candidate beam groups, lexicographically ordered by member-id list.
  std::vector<int> ids;
  for (const auto& u : scenario.users) ids.push_back(u.id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::vector<int>> groups = options.candidate_groups;
  if (groups.empty()) {
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<int> g;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) g.push_back(ids[i]);
      groups.push_back(g);
    }
  }
  std::sort(groups.begin(), groups.end());

  // id -> position in the residual vector (scenario user order).
  auto pos_of = [&](int id) {
    for (int i = 0; i < n; ++i)
      if (scenario.users[i].id == id) return i;
    throw validation_error("candidate group refers to unknown user id " + std::to_string(id));
  };

  const int packet_bits = scenario.packet_bits();
  std::vector<double> tau(n_schemes);
  for (int s = 0; s < n_schemes; ++s)
    tau[s] = packet_duration_s(scenario.modulations[s], scenario.phy.bandwidth_hz, packet_bits);

  struct GroupInfo {
    std::vector<int> members;
    std::vector<int> positions;
    std::vector<double> worst_p;  // per scheme
  };
  std::vector<GroupInfo> ginfo;
  for (const auto& g : groups) {
    GroupInfo info;
    info.members = g;
    for (int id : g) info.positions.push_back(pos_of(id));
    BeamGroup beam = beam_for(scenario.users, g, scenario.phy.min_beamwidth_rad());
    for (int s = 0; s < n_schemes; ++s) {
      std::vector<double> ps =
          decode_probs(scenario.modulations[s], beam, scenario.users, scenario.phy, packet_bits);
      info.worst_p.push_back(*std::min_element(ps.begin(), ps.end()));
    }
    ginfo.push_back(std::move(info));
  }

  // Per-group options: no transmission, then (x, scheme) with x ascending.
  const long options_per_group = 1 + static_cast<long>(x_cap) * n_schemes;
  double actionset_count = 1.0;
  for (std::size_t g = 0; g < groups.size(); ++g) actionset_count *= options_per_group;
  if (actionset_count > static_cast<double>(options.max_actionsets))
    throw capacity_error("action enumeration needs " + std::to_string(actionset_count) +
                         " action sets per state, beyond the budget of " +
                         std::to_string(options.max_actionsets));
  if (actionset_count * n_states > 2e7)
    throw capacity_error("action-set/state product too large for exact enumeration");

  auto option_at = [&](long digit) {
    BeamOption opt;
    if (digit == 0) return opt;
    opt.packets = static_cast<int>((digit - 1) / n_schemes) + 1;
    opt.scheme = static_cast<int>((digit - 1) % n_schemes);
    return opt;
  };

  // Compile every action set once: duration plus the joint pmf of capped
  // delivered counts (shared draw per beam in worst-user mode).
  std::vector<CompiledAction> compiled;
  compiled.reserve(static_cast<std::size_t>(actionset_count));
  std::vector<long> digits(groups.size(), 0);
  std::vector<double> dense(n_states);
  while (true) {
    CompiledAction ca;
    std::vector<std::vector<double>> pmfs;
    std::vector<const std::vector<int>*> positions;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      BeamOption opt = option_at(digits[g]);
      if (opt.packets > 0) {
        ca.duration += opt.packets * tau[opt.scheme];
        ca.active.emplace_back(static_cast<int>(g), opt);
        pmfs.push_back(receive_pmf(opt.packets, ginfo[g].worst_p[opt.scheme]));
        positions.push_back(&ginfo[g].positions);
      }
    }

    std::fill(dense.begin(), dense.end(), 0.0);
    std::vector<int> y(pmfs.size(), 0);
    while (true) {
      double prob = 1.0;
      for (std::size_t b = 0; b < y.size(); ++b) prob *= pmfs[b][y[b]];
      if (prob > 0.0) {
        std::vector<int> delivered(n, 0);
        for (std::size_t b = 0; b < y.size(); ++b)
          for (int pos : *positions[b]) delivered[pos] = std::min(m, delivered[pos] + y[b]);
        dense[state_index(delivered, m)] += prob;
      }
      int b = static_cast<int>(y.size()) - 1;
      while (b >= 0 && y[b] == static_cast<int>(pmfs[b].size()) - 1) y[b--] = 0;
      if (b < 0) break;
      ++y[b];
    }
    if (pmfs.empty()) dense[0] = 1.0;
    for (long u = 0; u < n_states; ++u)
      if (dense[u] > 0.0) ca.delivered.emplace_back(u, dense[u]);
    compiled.push_back(std::move(ca));

    int g = static_cast<int>(groups.size()) - 1;
    while (g >= 0 && digits[g] == options_per_group - 1) digits[g--] = 0;
    if (g < 0) break;
    ++digits[g];
  }

  PolicyTable table;
  table.n_users = n;
  table.m = m;
  table.r_max = r_max;
  table.actions.assign(r_max + 1, std::vector<ActionSet>(n_states));
  table.values.assign(r_max + 2, std::vector<double>(n_states, 0.0));
  std::vector<std::vector<double>> fail_values(r_max + 2, std::vector<double>(n_states, 0.0));
  std::vector<std::vector<double>> dur_values(r_max + 2, std::vector<double>(n_states, 0.0));

  for (long s = 0; s < n_states; ++s) {
    int fails = 0;
    for (int r : states[s].residuals) fails += (r > 0);
    table.values[r_max + 1][s] = epsilon * fails;
    fail_values[r_max + 1][s] = fails;
  }

  // Next-state index for (state, delivered) pairs, r' = max(0, r - u).
  auto next_index = [&](const std::vector<int>& r, const std::vector<int>& u) {
    long idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * (m + 1) + std::max(0, r[i] - u[i]);
    return idx;
  };

  for (int t = r_max; t >= 0; --t) {
    const std::vector<double>& next_values = table.values[t + 1];
    const std::vector<double>& next_fails = fail_values[t + 1];
    const std::vector<double>& next_durs = dur_values[t + 1];
    for (long s = 0; s < n_states; ++s) {
      const std::vector<int>& r = states[s].residuals;
      double best_cost = std::numeric_limits<double>::infinity();
      double best_efail = 0.0;
      double best_edur = 0.0;
      const CompiledAction* best = nullptr;
      for (const CompiledAction& ca : compiled) {
        double expect = 0.0;
        double expect_fail = 0.0;
        double expect_dur = 0.0;
        for (const auto& [u_idx, prob] : ca.delivered) {
          long nx = next_index(r, states[u_idx].residuals);
          expect += prob * next_values[nx];
          expect_fail += prob * next_fails[nx];
          expect_dur += prob * next_durs[nx];
        }
        double cost = ca.duration + expect;
        double edur = ca.duration + expect_dur;
        if (lex_better(cost, expect_fail, edur, best_cost, best_efail, best_edur)) {
          best_cost = cost;
          best_efail = expect_fail;
          best_edur = edur;
          best = &ca;
        }
      }
      table.values[t][s] = best_cost;
      fail_values[t][s] = best_efail;
      dur_values[t][s] = best_edur;
      ActionSet as;
      for (const auto& [g, opt] : best->active)
        as.beams.push_back({ginfo[g].members, opt.packets, opt.scheme});
      table.actions[t][s] = std::move(as);
    }
  }
  return table;
}

ChainSolution solve_chain(const std::vector<double>& p_per_scheme,
                          const std::vector<double>& tau_per_scheme, int m, int r_max,
                          int x_cap, double epsilon, double terminal_weight) {
  if (p_per_scheme.empty() || p_per_scheme.size() != tau_per_scheme.size())
    throw validation_error("solve_chain: need matching decode/duration vectors");
  if (m < 1 || r_max < 0 || x_cap < 0) throw validation_error("solve_chain: bad parameters");
  const int n_schemes = static_cast<int>(p_per_scheme.size());

  ChainSolution sol;
  sol.m = m;
  sol.r_max = r_max;
  sol.x_cap = x_cap;
  sol.values.assign(r_max + 2, std::vector<double>(m + 1, 0.0));
  sol.failures.assign(r_max + 2, std::vector<double>(m + 1, 0.0));
  sol.durations.assign(r_max + 2, std::vector<double>(m + 1, 0.0));
  for (int r = 1; r <= m; ++r) {
    sol.values[r_max + 1][r] = epsilon * terminal_weight;
    sol.failures[r_max + 1][r] = terminal_weight;
  }
  sol.decisions.assign(
      r_max + 1,
      std::vector<std::vector<ChainDecision>>(x_cap + 1, std::vector<ChainDecision>(m + 1)));

  for (int t = r_max; t >= 0; --t) {
    const std::vector<double>& next = sol.values[t + 1];
    const std::vector<double>& fnext = sol.failures[t + 1];
    const std::vector<double>& dnext = sol.durations[t + 1];
    for (int budget = 0; budget <= x_cap; ++budget) {
      for (int r = 0; r <= m; ++r) {
        ChainDecision best;
        best.value = std::numeric_limits<double>::infinity();
        for (int x = 0; x <= budget; ++x) {
          for (int s = 0; s < (x == 0 ? 1 : n_schemes); ++s) {
            std::vector<double> pmf = residual_step_pmf(r, x, p_per_scheme[s], m);
            double dur = x * tau_per_scheme[s];
            double cost = dur;
            double efail = 0.0;
            double edur = dur;
            for (int rp = 0; rp <= m; ++rp) {
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
        sol.decisions[t][budget][r] = std::move(best);
      }
    }
    for (int r = 0; r <= m; ++r) {
      sol.values[t][r] = sol.decisions[t][x_cap][r].value;
      sol.failures[t][r] = sol.decisions[t][x_cap][r].efail;
      sol.durations[t][r] = sol.decisions[t][x_cap][r].edur;
    }
  }
  return sol;
}

}  // namespace mmcast
