#include "mmcast/scenario.hpp"

#include <fstream>
#include <set>

#include "mmcast/errors.hpp"

namespace mmcast {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw validation_error("scenario key '" + path + "': " + what);
}

const json& require_key(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double get_number(const json& j, const std::string& key, const std::string& path,
                  double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_number(j.at(key), path + "." + key);
}

int get_int(const json& j, const std::string& key, const std::string& path, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as_int(j.at(key), path + "." + key);
}

std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string to_string(ReceptionMode mode) {
  return mode == ReceptionMode::worst_user ? "worst-user" : "per-user";
}

ReceptionMode reception_mode_from_string(const std::string& s) {
  if (s == "worst-user") return ReceptionMode::worst_user;
  if (s == "per-user") return ReceptionMode::per_user;
  throw validation_error("scenario key 'reception_mode': expected 'worst-user' or 'per-user'");
}

std::vector<ModScheme> default_modulations() {
  return {
      {"qam4", 2, 255, 239, 8},
      {"qam16", 4, 255, 223, 8},
  };
}

void Scenario::validate() const {
  phy.validate();
  if (users.empty()) throw validation_error("scenario key 'users': must be non-empty");
  std::set<int> ids;
  for (const auto& u : users) {
    u.validate();
    if (!ids.insert(u.id).second)
      throw validation_error("scenario key 'users': duplicate id " + std::to_string(u.id));
  }
  if (modulations.empty())
    throw validation_error("scenario key 'modulations': must be non-empty");
  for (const auto& mod : modulations) mod.validate();
  if (m < 1) throw validation_error("scenario key 'm': must be >= 1");
  if (r_max < 0) throw validation_error("scenario key 'r_max': must be >= 0");
  if (x_cap < 0) throw validation_error("scenario key 'x_cap': must be >= 0");
  if (payload_bits <= 0) throw validation_error("scenario key 'payload_bits': must be > 0");
  if (overhead_bits < 0) throw validation_error("scenario key 'overhead_bits': must be >= 0");
  if (!(tree.is_string() || tree.is_array()))
    throw validation_error("scenario key 'tree': expected string or nested id lists");
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw validation_error("scenario root: expected a JSON object");
  Scenario s;
  s.name = get_string(j, "name", "", "scenario");

  if (j.contains("phy")) {
    const json& p = j.at("phy");
    PhyParams d;  // defaults
    s.phy.tx_power_w = get_number(p, "tx_power_w", "phy", d.tx_power_w);
    s.phy.carrier_freq_hz = get_number(p, "carrier_freq_hz", "phy", d.carrier_freq_hz);
    s.phy.bandwidth_hz = get_number(p, "bandwidth_hz", "phy", d.bandwidth_hz);
    s.phy.noise_figure_db = get_number(p, "noise_figure_db", "phy", d.noise_figure_db);
    s.phy.pathloss_exp = get_number(p, "pathloss_exp", "phy", d.pathloss_exp);
    s.phy.rx_gain_db = get_number(p, "rx_gain_db", "phy", d.rx_gain_db);
    s.phy.sidelobe_gain = get_number(p, "sidelobe_gain", "phy", d.sidelobe_gain);
    s.phy.min_beamwidth_deg = get_number(p, "min_beamwidth_deg", "phy", d.min_beamwidth_deg);
    s.phy.nakagami_m = get_number(p, "nakagami_m", "phy", d.nakagami_m);
  }

  const json& users = require_key(j, "users", "");
  if (!users.is_array()) fail("users", "expected an array");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const json& u = users[i];
    std::string path = "users[" + std::to_string(i) + "]";
    User user;
    user.id = as_int(require_key(u, "id", path), path + ".id");
    user.radius_m = as_number(require_key(u, "radius_m", path), path + ".radius_m");
    user.angle_deg = as_number(require_key(u, "angle_deg", path), path + ".angle_deg");
    s.users.push_back(user);
  }

  if (j.contains("modulations")) {
    const json& mods = j.at("modulations");
    if (!mods.is_array()) fail("modulations", "expected an array");
    for (std::size_t i = 0; i < mods.size(); ++i) {
      const json& mj = mods[i];
      std::string path = "modulations[" + std::to_string(i) + "]";
      ModScheme mod;
      mod.name = get_string(mj, "name", path, "mod" + std::to_string(i));
      mod.bits_per_symbol =
          as_int(require_key(mj, "bits_per_symbol", path), path + ".bits_per_symbol");
      mod.code_n = as_int(require_key(mj, "code_n", path), path + ".code_n");
      mod.code_k = as_int(require_key(mj, "code_k", path), path + ".code_k");
      mod.symbol_bits = get_int(mj, "symbol_bits", path, 8);
      s.modulations.push_back(mod);
    }
  } else {
    s.modulations = default_modulations();
  }

  s.m = as_int(require_key(j, "m", ""), "m");
  s.r_max = get_int(j, "r_max", "", 2);
  s.x_cap = get_int(j, "x_cap", "", 2 * s.m);
  s.payload_bits = static_cast<long>(get_number(j, "payload_bits", "", 40000.0));
  s.overhead_bits = get_int(j, "overhead_bits", "", 100);
  s.tree = j.contains("tree") ? j.at("tree") : json("binary-index-order");
  s.reception_mode =
      reception_mode_from_string(get_string(j, "reception_mode", "", "worst-user"));

  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["phy"] = {
      {"tx_power_w", s.phy.tx_power_w},
      {"carrier_freq_hz", s.phy.carrier_freq_hz},
      {"bandwidth_hz", s.phy.bandwidth_hz},
      {"noise_figure_db", s.phy.noise_figure_db},
      {"pathloss_exp", s.phy.pathloss_exp},
      {"rx_gain_db", s.phy.rx_gain_db},
      {"sidelobe_gain", s.phy.sidelobe_gain},
      {"min_beamwidth_deg", s.phy.min_beamwidth_deg},
      {"nakagami_m", s.phy.nakagami_m},
  };
  j["users"] = json::array();
  for (const auto& u : s.users)
    j["users"].push_back(
        {{"id", u.id}, {"radius_m", u.radius_m}, {"angle_deg", u.angle_deg}});
  j["modulations"] = json::array();
  for (const auto& mod : s.modulations)
    j["modulations"].push_back({{"name", mod.name},
                                {"bits_per_symbol", mod.bits_per_symbol},
                                {"code_n", mod.code_n},
                                {"code_k", mod.code_k},
                                {"symbol_bits", mod.symbol_bits}});
  j["m"] = s.m;
  j["r_max"] = s.r_max;
  j["x_cap"] = s.x_cap;
  j["payload_bits"] = s.payload_bits;
  j["overhead_bits"] = s.overhead_bits;
  j["tree"] = s.tree;
  j["reception_mode"] = to_string(s.reception_mode);
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw validation_error("scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace mmcast
