#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mmcast/errors.hpp"
#include "mmcast/phy.hpp"
#include "helpers.hpp"

using namespace mmcast;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kPsi0 = 11.25 * kPi / 180.0;

// Independent fading average: composite Simpson over the Gamma(m, 1/m) power
// gain on [0, hi], a different quadrature family than the production path.
double simpson_decode_prob(const ModScheme& mod, double mean_snr, double nak_m,
                           int packet_bits) {
  const double hi = 20.0;  // Gamma(4, 1/4) tail mass beyond 20 is ~1e-27
  const int n = 20000;     // even
  const double h = hi / n;
  auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    double log_pdf = nak_m * std::log(nak_m) + (nak_m - 1.0) * std::log(x) - nak_m * x -
                     std::lgamma(nak_m);
    return std::exp(log_pdf) * packet_success_awgn(mod, mean_snr * x, packet_bits);
  };
  double acc = f(0.0) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("tx_gain matches the sectored-antenna formula") {
  CHECK(tx_gain(kTwoPi, 0.05) == 1.0);
  CHECK(tx_gain(kTwoPi, 0.3) == 1.0);
  CHECK(tx_gain(kPi, 0.05) == doctest::Approx(1.95).epsilon(1e-12));
  CHECK(tx_gain(kPsi0, 0.05) == doctest::Approx(30.449).epsilon(1e-3));
  // ~14.84 dB at the minimum beamwidth
  CHECK(10.0 * std::log10(tx_gain(kPsi0, 0.05)) == doctest::Approx(14.84).epsilon(1e-3));
}

TEST_CASE("tx_gain rejects out-of-range inputs") {
  CHECK_THROWS_AS(tx_gain(0.0, 0.05), std::domain_error);
  CHECK_THROWS_AS(tx_gain(-1.0, 0.05), std::domain_error);
  CHECK_THROWS_AS(tx_gain(kTwoPi + 1e-6, 0.05), std::domain_error);
  CHECK_THROWS_AS(tx_gain(kPi, -0.1), std::domain_error);
  CHECK_THROWS_AS(tx_gain(kPi, 1.0), std::domain_error);
}

TEST_CASE("tx_gain conserves energy and decreases in beamwidth") {
  const double z = 0.05;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    double psi = kPsi0 + (kTwoPi - kPsi0) * i / 999.0;
    double g = tx_gain(psi, z);
    double balance = g * psi / kTwoPi + z * (kTwoPi - psi) / kTwoPi;
    CHECK(std::fabs(balance - 1.0) < 1e-12);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("beam_for clamps, spans, and wraps") {
  std::vector<User> users = {{1, 100.0, 5.0},  {2, 80.0, 25.0}, {4, 45.0, 35.0},
                             {8, 70.0, 86.0},  {9, 50.0, 350.0}, {10, 50.0, 10.0}};

  SUBCASE("single user gets the minimum beamwidth") {
    BeamGroup b = beam_for(users, {1}, kPsi0);
    CHECK(b.beamwidth_rad == doctest::Approx(kPsi0));
    CHECK(b.boresight_rad == doctest::Approx(5.0 * kPi / 180.0));
  }
  SUBCASE("narrow pairs clamp to the minimum") {
    BeamGroup b = beam_for(users, {2, 4}, kPsi0);  // 10 degree span < 11.25
    CHECK(b.beamwidth_rad == doctest::Approx(kPsi0));
  }
  SUBCASE("wide pairs take the angular span") {
    BeamGroup b = beam_for(users, {1, 8}, kPsi0);  // 5..86 degrees
    CHECK(b.beamwidth_rad == doctest::Approx(81.0 * kPi / 180.0));
    CHECK(b.boresight_rad == doctest::Approx(45.5 * kPi / 180.0));
  }
  SUBCASE("wrap-around spans cross zero") {
    BeamGroup b = beam_for(users, {9, 10}, kPsi0);  // 350..10 degrees
    CHECK(b.beamwidth_rad == doctest::Approx(20.0 * kPi / 180.0));
    CHECK(covers(b, users[4]));
    CHECK(covers(b, users[5]));
    CHECK_FALSE(covers(b, users[3]));
  }
}

TEST_CASE("noise power matches the thermal budget") {
  PhyParams phy;  // W = 1 GHz, NF = 7.6 dB
  double dbm = 10.0 * std::log10(noise_power_w(phy) * 1000.0);
  CHECK(dbm == doctest::Approx(-76.4).epsilon(1e-9));
}

TEST_CASE("mean SNR follows the power-law link budget") {
  PhyParams phy;
  User near{5, 30.0, 45.0};
  User far{1, 100.0, 45.0};
  User twice{2, 60.0, 45.0};
  double psi = kPsi0;
  // doubling the distance (30 m -> 60 m) divides the SNR by 2^alpha = 8
  CHECK(mean_snr(near, psi, phy) / mean_snr(twice, psi, phy) ==
        doctest::Approx(8.0).epsilon(1e-12));
  // Table I users 5 (30 m) and 1 (100 m): ratio (100/30)^3
  CHECK(mean_snr(near, psi, phy) / mean_snr(far, psi, phy) ==
        doctest::Approx(std::pow(100.0 / 30.0, 3.0)).epsilon(1e-12));
}

TEST_CASE("beam-checked SNR rejects uncovered users") {
  PhyParams phy;
  std::vector<User> users = {{1, 80.0, 0.0}, {2, 50.0, 90.0}};
  BeamGroup b = beam_for(users, {1}, phy.min_beamwidth_rad());
  CHECK(mean_snr(users[0], b, phy) > 0.0);
  CHECK_THROWS_AS(mean_snr(users[1], b, phy), validation_error);
}

TEST_CASE("packet success has the right limits and scheme ordering") {
  auto mods = default_modulations();
  for (const auto& mod : mods) {
    CHECK(packet_success_awgn(mod, 0.0, 40100) == doctest::Approx(0.0));
    CHECK(packet_success_awgn(mod, 1e6, 40100) == doctest::Approx(1.0));
  }
  // 16-QAM never beats 4-QAM at equal SNR
  for (double db = -10.0; db <= 50.0; db += 1.0) {
    double snr = std::pow(10.0, db / 10.0);
    CHECK(packet_success_awgn(mods[1], snr, 40100) <=
          packet_success_awgn(mods[0], snr, 40100) + 1e-12);
  }
}

TEST_CASE("fading-averaged decode probability: limits and monotonicity") {
  PhyParams phy;
  auto mods = default_modulations();
  CHECK(decode_prob(mods[0], 0.0, phy, 40100) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(decode_prob(mods[0], 1e12, phy, 40100) == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& mod : mods) {
    double prev = -1.0;
    for (double db = -20.0; db <= 40.0; db += 2.0) {
      double p = decode_prob(mod, std::pow(10.0, db / 10.0), phy, 40100);
      CHECK(p >= prev - 1e-12);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      prev = p;
    }
  }
}

TEST_CASE("decode probability agrees with an independent Simpson quadrature") {
  PhyParams phy;
  auto mods = default_modulations();
  for (const auto& mod : mods) {
    for (double db : {10.0, 14.0, 18.0, 22.0, 26.0}) {
      double snr = std::pow(10.0, db / 10.0);
      double fast = decode_prob(mod, snr, phy, 40100);
      double ref = simpson_decode_prob(mod, snr, phy.nakagami_m, 40100);
      CHECK(fast == doctest::Approx(ref).epsilon(1e-5));
    }
  }
}

TEST_CASE("decode probability is non-increasing in beamwidth") {
  PhyParams phy;
  auto mods = default_modulations();
  User u{1, 80.0, 0.0};
  double prev = 2.0;
  for (double psi = kPsi0; psi <= kTwoPi; psi += (kTwoPi - kPsi0) / 16.0) {
    double p = decode_prob(mods[0], mean_snr(u, psi, phy), phy, 40100);
    CHECK(p <= prev + 1e-12);
    prev = p;
  }
}

TEST_CASE("packet airtime arithmetic") {
  auto mods = default_modulations();
  // 16-QAM, 223/255, 40100 bits at 1 GHz
  double tau16 = packet_duration_s(mods[1], 1e9, 40100);
  CHECK(tau16 == doctest::Approx(40100.0 * 255.0 / (1e9 * 4.0 * 223.0)).epsilon(1e-15));
  CHECK(tau16 == doctest::Approx(11.46e-6).epsilon(1e-3));
  double tau4 = packet_duration_s(mods[0], 1e9, 40100);
  CHECK(tau4 / tau16 == doctest::Approx((4.0 * 223.0 / 255.0) / (2.0 * 239.0 / 255.0))
                            .epsilon(1e-12));
  CHECK(tau4 / tau16 == doctest::Approx(1.866).epsilon(1e-3));
  CHECK(packet_duration_s(mods[0], 1e9, 80200) == doctest::Approx(2.0 * tau4));
}
