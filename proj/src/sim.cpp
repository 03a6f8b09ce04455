#include "mmcast/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "mmcast/errors.hpp"

namespace mmcast {

namespace {

// splitmix64: tiny counter-based generator, bitwise stable across platforms.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RunRng {
  std::uint64_t state;

  explicit RunRng(std::uint64_t seed, std::uint64_t run) {
    // Decorrelate the per-run substream from (seed, run) with one mix pass.
    state = seed;
    std::uint64_t a = splitmix64(state);
    state = run ^ a;
    splitmix64(state);
  }

  double uniform() {
    // 53-bit mantissa in [0, 1).
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p);
    return k;
  }
};

// Per-beam decode probabilities, memoized on (group, scheme).
class DecodeCache {
 public:
  DecodeCache(const Scenario& scenario) : scenario_(scenario) {}

  // p for every member of the group, in group order.
  const std::vector<double>& probs(const std::vector<int>& group, int scheme) {
    auto key = std::make_pair(group, scheme);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    BeamGroup beam = beam_for(scenario_.users, group, scenario_.phy.min_beamwidth_rad());
    // decode_probs returns one entry per beam member, already in group order.
    std::vector<double> out = decode_probs(scenario_.modulations.at(scheme), beam,
                                           scenario_.users, scenario_.phy,
                                           scenario_.packet_bits());
    return cache_.emplace(std::move(key), std::move(out)).first->second;
  }

 private:
  const Scenario& scenario_;
  std::map<std::pair<std::vector<int>, int>, std::vector<double>> cache_;
};

}  // namespace

SimStats simulate(const Policy& policy, const Scenario& scenario, const SimConfig& config) {
  scenario.validate();
  if (config.n_runs <= 0) throw validation_error("n_runs must be positive");

  const int n = scenario.n_users();
  std::vector<int> pos_of(n);
  std::map<int, int> pos_of_id;
  for (int i = 0; i < n; ++i) pos_of_id[scenario.users[i].id] = i;

  std::vector<double> tau(scenario.modulations.size());
  for (std::size_t s = 0; s < tau.size(); ++s)
    tau[s] = packet_duration_s(scenario.modulations[s], scenario.phy.bandwidth_hz,
                               scenario.packet_bits());

  DecodeCache cache(scenario);

  double sum_d = 0.0, sum_d2 = 0.0;
  double sum_f = 0.0, sum_f2 = 0.0;
  double sum_c = 0.0, sum_c2 = 0.0;

  for (long run = 0; run < config.n_runs; ++run) {
    RunRng rng(config.seed, static_cast<std::uint64_t>(run));
    std::vector<int> residuals(n, scenario.m);
    double duration = 0.0;

    for (int t = 0; t <= scenario.r_max; ++t) {
      ActionSet as = policy.actions(t, residuals);
      for (const BeamAction& b : as.beams) {
        duration += b.packets * tau.at(b.scheme);
        const std::vector<double>& p = cache.probs(b.group, b.scheme);
        if (config.mode == ReceptionMode::worst_user) {
          double worst = *std::min_element(p.begin(), p.end());
          int y = rng.binomial(b.packets, worst);
          for (int id : b.group) {
            int& r = residuals[pos_of_id.at(id)];
            r = std::max(0, r - y);
          }
        } else {
          for (std::size_t i = 0; i < b.group.size(); ++i) {
            int y = rng.binomial(b.packets, p[i]);
            int& r = residuals[pos_of_id.at(b.group[i])];
            r = std::max(0, r - y);
          }
        }
      }
    }

    int failures = 0;
    for (int r : residuals) failures += (r > 0);
    double cost = duration + config.epsilon * failures;

    sum_d += duration;
    sum_d2 += duration * duration;
    sum_f += failures;
    sum_f2 += static_cast<double>(failures) * failures;
    sum_c += cost;
    sum_c2 += cost * cost;
  }

  const double nr = static_cast<double>(config.n_runs);
  auto finish = [&](double sum, double sum2, double& mean, double& half, double z) {
    mean = sum / nr;
    double var = std::max(0.0, (sum2 - nr * mean * mean) / std::max(1.0, nr - 1.0));
    half = z * std::sqrt(var / nr);
  };

  SimStats st;
  finish(sum_d, sum_d2, st.mean_duration_s, st.ci95_duration_s, 1.96);
  finish(sum_f, sum_f2, st.mean_failures, st.ci95_failures, 1.96);
  finish(sum_c, sum_c2, st.mean_cost, st.se_cost, 1.0);
  st.n_runs = config.n_runs;
  st.seed = config.seed;
  return st;
}

}  // namespace mmcast
