// Shared scenario builders for the test suites.
#ifndef MMCAST_TESTS_HELPERS_HPP
#define MMCAST_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "mmcast/scenario.hpp"

#ifndef MMCAST_DATA_DIR
#define MMCAST_DATA_DIR "data"
#endif

namespace testutil {

inline std::string data_path(const std::string& file) {
  return std::string(MMCAST_DATA_DIR) + "/" + file;
}

/// Small scenario with explicit user geometry; defaults mirror the bundled
/// configs (m=5, r_max=2, x_cap=2m) unless overridden.
inline mmcast::Scenario make_scenario(const std::vector<mmcast::User>& users, int m = 5,
                                      int r_max = 2, int x_cap = 0) {
  mmcast::Scenario s;
  s.name = "test";
  s.users = users;
  s.modulations = mmcast::default_modulations();
  s.m = m;
  s.r_max = r_max;
  s.x_cap = x_cap;
  return s;
}

inline mmcast::Scenario two_user(double theta_deg = 8.0, double radius2 = 50.0, int m = 5,
                                 int r_max = 2, int x_cap = 0) {
  return make_scenario({{1, 80.0, 0.0}, {2, radius2, theta_deg}}, m, r_max, x_cap);
}

}  // namespace testutil

#endif  // MMCAST_TESTS_HELPERS_HPP
