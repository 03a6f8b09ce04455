#ifndef MMCAST_SCENARIO_HPP
#define MMCAST_SCENARIO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "mmcast/phy.hpp"

namespace mmcast {

enum class ReceptionMode { worst_user, per_user };

std::string to_string(ReceptionMode mode);
ReceptionMode reception_mode_from_string(const std::string& s);

/// A fully parameterized experiment instance. Angles are degrees in the JSON
/// schema and in the stored fields; radians are derived where needed.
struct Scenario {
  std::string name = "scenario";
  PhyParams phy;
  std::vector<User> users;
  std::vector<ModScheme> modulations;
  int m = 0;       // MAC packets needed for decoding
  int r_max = 0;   // retransmission slots
  int x_cap = 0;   // per-beam packet cap (0 in a file means "default to 2m")
  long payload_bits = 40000;
  int overhead_bits = 100;
  nlohmann::json tree = "binary-index-order";
  ReceptionMode reception_mode = ReceptionMode::worst_user;

  int n_users() const { return static_cast<int>(users.size()); }
  int packet_bits() const { return static_cast<int>(payload_bits) + overhead_bits; }
  int effective_x_cap() const { return x_cap > 0 ? x_cap : 2 * m; }

  void validate() const;

  bool operator==(const Scenario&) const = default;
};

/// The two Reed-Solomon-coded schemes used throughout: 4-QAM 239/255 and
/// 16-QAM 223/255.
std::vector<ModScheme> default_modulations();

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace mmcast

#endif  // MMCAST_SCENARIO_HPP
