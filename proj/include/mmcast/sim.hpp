#ifndef MMCAST_SIM_HPP
#define MMCAST_SIM_HPP

#include <cstdint>

#include "mmcast/policy.hpp"

namespace mmcast {

struct SimConfig {
  long n_runs = 10000;
  std::uint64_t seed = 1;
  ReceptionMode mode = ReceptionMode::worst_user;
  double epsilon = 0.0;  // per-failed-user weight of the realized cost
};

/// Sample statistics over independent episodes, with 95% normal CIs.
struct SimStats {
  double mean_duration_s = 0.0;
  double ci95_duration_s = 0.0;
  double mean_failures = 0.0;
  double ci95_failures = 0.0;
  double mean_cost = 0.0;  // duration + epsilon * failures
  double se_cost = 0.0;    // standard error of mean_cost
  long n_runs = 0;
  std::uint64_t seed = 0;
};

/// Runs the policy over n_runs independent episodes. Each run draws from its
/// own counter-based substream of `seed`, so results are reproducible and
/// independent of run order.
SimStats simulate(const Policy& policy, const Scenario& scenario, const SimConfig& config);

}  // namespace mmcast

#endif  // MMCAST_SIM_HPP
