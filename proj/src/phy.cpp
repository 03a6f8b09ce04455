#include "mmcast/phy.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "mmcast/errors.hpp"

namespace mmcast {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSpeedOfLight = 299792458.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

// Shortest circular distance between two angles.
double angular_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

const User& find_user(const std::vector<User>& users, int id) {
  for (const auto& u : users) {
    if (u.id == id) return u;
  }
  throw validation_error("unknown user id " + std::to_string(id));
}

}  // namespace

void PhyParams::validate() const {
  if (tx_power_w <= 0.0) throw validation_error("phy.tx_power_w must be > 0");
  if (carrier_freq_hz <= 0.0) throw validation_error("phy.carrier_freq_hz must be > 0");
  if (bandwidth_hz <= 0.0) throw validation_error("phy.bandwidth_hz must be > 0");
  if (pathloss_exp <= 0.0) throw validation_error("phy.pathloss_exp must be > 0");
  if (sidelobe_gain < 0.0 || sidelobe_gain >= 1.0)
    throw validation_error("phy.sidelobe_gain must be in [0,1)");
  if (min_beamwidth_deg <= 0.0 || min_beamwidth_deg > 360.0)
    throw validation_error("phy.min_beamwidth_deg must be in (0,360]");
  if (nakagami_m < 0.5) throw validation_error("phy.nakagami_m must be >= 0.5");
}

double PhyParams::min_beamwidth_rad() const {
  return min_beamwidth_deg * std::numbers::pi / 180.0;
}

double User::angle_rad() const { return angle_deg * std::numbers::pi / 180.0; }

void User::validate() const {
  if (radius_m <= 0.0) throw validation_error("user radius must be > 0");
  if (angle_deg < 0.0 || angle_deg >= 360.0)
    throw validation_error("user angle must be in [0,360)");
}

void ModScheme::validate() const {
  if (symbol_bits <= 0) throw validation_error("modulation symbol_bits must be > 0");
  if (!(0 < code_k && code_k < code_n && code_n <= (1 << symbol_bits) - 1))
    throw validation_error("modulation requires 0 < code_k < code_n <= 2^symbol_bits - 1");
  if (bits_per_symbol != 1 && bits_per_symbol != 2 && bits_per_symbol != 4 &&
      bits_per_symbol != 6)
    throw validation_error("modulation bits_per_symbol must be one of {1,2,4,6}");
}

double tx_gain(double beamwidth_rad, double sidelobe_gain) {
  if (!(beamwidth_rad > 0.0) || beamwidth_rad > kTwoPi)
    throw std::domain_error("beamwidth out of (0, 2pi]");
  if (sidelobe_gain < 0.0 || sidelobe_gain >= 1.0)
    throw std::domain_error("side-lobe gain out of [0, 1)");
  return (kTwoPi - (kTwoPi - beamwidth_rad) * sidelobe_gain) / beamwidth_rad;
}

BeamGroup beam_for(const std::vector<User>& users, const std::vector<int>& members,
                   double min_beamwidth_rad) {
  if (members.empty()) throw validation_error("beam group must be non-empty");
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i] <= members[i - 1])
      throw validation_error("beam group ids must be strictly increasing");
  }

  std::vector<double> angles;
  angles.reserve(members.size());
  for (int id : members) angles.push_back(wrap_angle(find_user(users, id).angle_rad()));
  std::sort(angles.begin(), angles.end());

  // Minimal covering arc: the circle minus the largest gap between
  // consecutive member angles.
  double span = 0.0;
  double start = angles.front();
  if (angles.size() > 1) {
    double max_gap = kTwoPi - angles.back() + angles.front();
    std::size_t gap_after = angles.size() - 1;
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
      double gap = angles[i + 1] - angles[i];
      if (gap > max_gap) {
        max_gap = gap;
        gap_after = i;
      }
    }
    span = kTwoPi - max_gap;
    start = angles[(gap_after + 1) % angles.size()];
  }

  BeamGroup beam;
  beam.members = members;
  beam.beamwidth_rad = std::max(span, min_beamwidth_rad);
  beam.boresight_rad = wrap_angle(start + span / 2.0);
  return beam;
}

bool covers(const BeamGroup& beam, const User& user) {
  return angular_distance(user.angle_rad(), beam.boresight_rad) <=
         beam.beamwidth_rad / 2.0 + 1e-9;
}

double noise_power_w(const PhyParams& phy) {
  double noise_dbm = -174.0 + phy.noise_figure_db + 10.0 * std::log10(phy.bandwidth_hz);
  return std::pow(10.0, (noise_dbm - 30.0) / 10.0);
}

double mean_snr(const User& user, double beamwidth_rad, const PhyParams& phy) {
  double lambda = kSpeedOfLight / phy.carrier_freq_hz;
  double pl0 = std::pow(lambda / (4.0 * std::numbers::pi), 2.0);
  double rx_power = phy.tx_power_w * tx_gain(beamwidth_rad, phy.sidelobe_gain) *
                    db_to_linear(phy.rx_gain_db) * pl0 *
                    std::pow(user.radius_m, -phy.pathloss_exp);
  return rx_power / noise_power_w(phy);
}

double mean_snr(const User& user, const BeamGroup& beam, const PhyParams& phy) {
  if (!covers(beam, user))
    throw validation_error("user " + std::to_string(user.id) + " outside beam: no coverage");
  return mean_snr(user, beam.beamwidth_rad, phy);
}

double packet_success_awgn(const ModScheme& mod, double snr, int packet_bits) {
  if (packet_bits <= 0) throw validation_error("packet_bits must be > 0");
  if (snr < 0.0) snr = 0.0;

  double ber;
  if (mod.bits_per_symbol == 1) {
    ber = q_function(std::sqrt(2.0 * snr));
  } else {
    // Gray-coded square M-QAM approximation, SNR per symbol.
    double mconst = std::pow(2.0, mod.bits_per_symbol);
    ber = (4.0 / mod.bits_per_symbol) * (1.0 - 1.0 / std::sqrt(mconst)) *
          q_function(std::sqrt(3.0 * snr / (mconst - 1.0)));
  }
  ber = std::clamp(ber, 0.0, 0.5);

  double sym_err = 1.0 - std::pow(1.0 - ber, mod.symbol_bits);
  int n = mod.code_n;
  int t_corr = (n - mod.code_k) / 2;

  double block_ok;
  if (sym_err <= 0.0) {
    block_ok = 1.0;
  } else if (sym_err >= 1.0) {
    block_ok = 0.0;
  } else {
    // Binomial tail P(#symbol errors <= t), summed in log space per term.
    double lp = std::log(sym_err);
    double lq = std::log1p(-sym_err);
    double lgn = std::lgamma(n + 1.0);
    block_ok = 0.0;
    for (int j = 0; j <= t_corr; ++j) {
      double lterm = lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * lp +
                     (n - j) * lq;
      block_ok += std::exp(lterm);
    }
    block_ok = std::min(block_ok, 1.0);
  }

  int info_bits_per_block = mod.code_k * mod.symbol_bits;
  int blocks = (packet_bits + info_bits_per_block - 1) / info_bits_per_block;
  return std::pow(block_ok, blocks);
}

namespace {

// Integrand of the fading average: Gamma(m, 1/m) power-gain density times the
// conditional packet success at the faded SNR.
struct FadingIntegrand {
  const ModScheme* mod;
  double mean_snr;
  double nakagami_m;
  int packet_bits;
};

double fading_integrand(double x, void* params) {
  const FadingIntegrand* p = static_cast<const FadingIntegrand*>(params);
  if (x <= 0.0) return 0.0;
  double log_pdf = p->nakagami_m * std::log(p->nakagami_m) +
                   (p->nakagami_m - 1.0) * std::log(x) - p->nakagami_m * x -
                   std::lgamma(p->nakagami_m);
  return std::exp(log_pdf) * packet_success_awgn(*p->mod, p->mean_snr * x, p->packet_bits);
}

}  // namespace

double decode_prob(const ModScheme& mod, double mean_snr_value, const PhyParams& phy,
                   int packet_bits) {
  if (mean_snr_value < 0.0) throw validation_error("mean SNR must be >= 0");
  if (!std::isfinite(mean_snr_value)) return 1.0;
  if (phy.nakagami_m <= 0.0) throw validation_error("nakagami_m must be > 0");

  static std::once_flag handler_flag;
  std::call_once(handler_flag, [] { gsl_set_error_handler_off(); });

  FadingIntegrand p{&mod, mean_snr_value, phy.nakagami_m, packet_bits};
  gsl_function f{fading_integrand, &p};

  thread_local std::unique_ptr<gsl_integration_workspace,
                               decltype(&gsl_integration_workspace_free)>
      ws(gsl_integration_workspace_alloc(4000), gsl_integration_workspace_free);

  double result = 0.0, abserr = 0.0;
  int status =
      gsl_integration_qagiu(&f, 0.0, 1e-12, 1e-9, 4000, ws.get(), &result, &abserr);
  if (status != 0 || abserr > 1e-9 + 1e-6 * std::fabs(result))
    throw numerical_error("fading quadrature did not converge to 1e-6");
  return std::clamp(result, 0.0, 1.0);
}

std::vector<double> decode_probs(const ModScheme& mod, const BeamGroup& beam,
                                 const std::vector<User>& users, const PhyParams& phy,
                                 int packet_bits) {
  std::vector<double> out;
  out.reserve(beam.members.size());
  for (int id : beam.members) {
    const User& u = find_user(users, id);
    out.push_back(decode_prob(mod, mean_snr(u, beam, phy), phy, packet_bits));
  }
  return out;
}

double packet_duration_s(const ModScheme& mod, double bandwidth_hz, int packet_bits) {
  mod.validate();
  if (bandwidth_hz <= 0.0) throw validation_error("bandwidth must be > 0");
  double bit_rate = bandwidth_hz * mod.bits_per_symbol * mod.code_rate();
  return packet_bits / bit_rate;
}

}  // namespace mmcast
