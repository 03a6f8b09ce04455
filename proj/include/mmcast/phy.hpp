#ifndef MMCAST_PHY_HPP
#define MMCAST_PHY_HPP

#include <string>
#include <vector>

namespace mmcast {

/// Link-budget constants of the sectored-antenna mmWave model.
struct PhyParams {
  double tx_power_w = 1.0;
  double carrier_freq_hz = 28e9;
  double bandwidth_hz = 1e9;
  double noise_figure_db = 7.6;
  double pathloss_exp = 3.0;       // alpha
  double rx_gain_db = 11.83;       // G_rc
  double sidelobe_gain = 0.05;     // z, linear
  double min_beamwidth_deg = 11.25;  // psi_0 (config files carry degrees)
  double nakagami_m = 4.0;

  double min_beamwidth_rad() const;
  void validate() const;
  bool operator==(const PhyParams&) const = default;
};

struct User {
  int id = 0;
  double radius_m = 0.0;
  double angle_deg = 0.0;  // config files carry degrees

  double angle_rad() const;
  void validate() const;
  bool operator==(const User&) const = default;
};

/// Modulation + Reed-Solomon code pair.
struct ModScheme {
  std::string name;
  int bits_per_symbol = 2;  // log2 of constellation size
  int code_n = 255;         // RS block length in symbols
  int code_k = 239;         // RS information symbols
  int symbol_bits = 8;

  double code_rate() const { return static_cast<double>(code_k) / code_n; }
  void validate() const;
  bool operator==(const ModScheme&) const = default;
};

/// A directional beam toward an ordered set of users.
struct BeamGroup {
  std::vector<int> members;  // strictly increasing user ids
  double beamwidth_rad = 0.0;
  double boresight_rad = 0.0;
};

/// Sectored-antenna main-lobe gain for beamwidth psi and side-lobe gain z.
/// Satisfies the energy balance G(psi)*psi/(2pi) + z*(2pi-psi)/(2pi) = 1.
double tx_gain(double beamwidth_rad, double sidelobe_gain);

/// Minimal covering arc over the members' angles, clamped to the antenna
/// resolution; boresight at the arc midpoint. Handles wrap-around at 2pi.
BeamGroup beam_for(const std::vector<User>& users, const std::vector<int>& members,
                   double min_beamwidth_rad);

bool covers(const BeamGroup& beam, const User& user);

/// Thermal noise power N0*W in watts (-174 dBm/Hz + noise figure + bandwidth).
double noise_power_w(const PhyParams& phy);

/// Mean SNR (unit fading) of a user served by a beam of the given width.
double mean_snr(const User& user, double beamwidth_rad, const PhyParams& phy);

/// Same, but checks beam coverage first ("no coverage" -> validation error).
double mean_snr(const User& user, const BeamGroup& beam, const PhyParams& phy);

/// MAC-packet success probability on an AWGN channel at the given SNR:
/// Gray-coded square-QAM BER -> RS symbol errors -> binomial block tail,
/// all ceil(packet_bits / (k * symbol_bits)) blocks must decode.
double packet_success_awgn(const ModScheme& mod, double snr, int packet_bits);

/// Per-packet decode probability averaged over Nakagami-m power fading
/// (Gamma-distributed power gain), by adaptive quadrature over the gain.
double decode_prob(const ModScheme& mod, double mean_snr_value, const PhyParams& phy,
                   int packet_bits);

/// Decode probability of every member of a beam, in member order.
std::vector<double> decode_probs(const ModScheme& mod, const BeamGroup& beam,
                                 const std::vector<User>& users, const PhyParams& phy,
                                 int packet_bits);

/// Airtime of one MAC packet: packet_bits / (W * bits_per_symbol * k/n).
double packet_duration_s(const ModScheme& mod, double bandwidth_hz, int packet_bits);

}  // namespace mmcast

#endif  // MMCAST_PHY_HPP
