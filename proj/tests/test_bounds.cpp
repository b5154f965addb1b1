#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <boost/random/binomial_distribution.hpp>

#include "snm/bounds.hpp"
#include "snm/model.hpp"
#include "snm/rng.hpp"

using namespace snm;
using doctest::Approx;

// Reference numbers below come from a 50-digit evaluation
// (tests/oracle/values.py).

TEST_CASE("gaussian tail") {
  CHECK(gaussian_tail(0.0) == 0.5);
  CHECK(gaussian_tail(1.0) == Approx(0.15865525393145705).epsilon(1e-13));
  CHECK(gaussian_tail(5.0) == Approx(2.8665157187919391e-7).epsilon(1e-12));
  CHECK(gaussian_tail(std::sqrt(2.0 * std::log(1000.0))) ==
        Approx(0.00010083225935770045).epsilon(1e-12));
  const auto b = lemma1_bounds(1.0);
  CHECK(b.lower == Approx(0.12098536225957167).epsilon(1e-13));
  CHECK(b.upper == Approx(0.24197072451914335).epsilon(1e-13));
  CHECK_THROWS_AS(lemma1_bounds(0.0), std::invalid_argument);
  CHECK_THROWS_AS(lemma1_lower_unit(0.5), std::invalid_argument);
}

TEST_CASE("binomial tails against exact sums") {
  CHECK(binomial_cdf(5, 100, 0.03) == Approx(0.91916287109862663).epsilon(1e-12));
  CHECK(binomial_cdf(10, 64, 0.2) == Approx(0.24103762906214711).epsilon(1e-12));
  CHECK(binomial_cdf(3, 32767, 1e-4) == Approx(0.58548770448171409).epsilon(1e-11));
  CHECK(binomial_sf(44, 100, 0.3) == Approx(0.0010857460646854371).epsilon(1e-11));
  CHECK(binomial_sf(60, 1000, 0.01) == Approx(2.86103889507e-28).epsilon(1e-9));
  CHECK(binomial_cdf(-1, 10, 0.5) == 0.0);
  CHECK(binomial_cdf(10, 10, 0.5) == 1.0);
  CHECK(binomial_cdf(0, 10, 0.0) == 1.0);
  CHECK(binomial_cdf(9, 10, 1.0) == 0.0);
  CHECK(binomial_sf(-1, 10, 0.5) == 1.0);
  CHECK_THROWS_AS(binomial_cdf(1, 10, 1.5), std::invalid_argument);
}

TEST_CASE("binomial cdf agrees with sampling") {
  PhiloxEngine rng(SeedSpec{2024, 0, 1});
  for (int inst = 0; inst < 5; ++inst) {
    const auto n = static_cast<std::int64_t>(10 + rng() % 190);
    const double p = 0.05 + 0.9 * static_cast<double>(rng() >> 11) * 0x1p-53;
    const auto k = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
    boost::random::binomial_distribution<std::int64_t> draw(n, p);
    const int draws = 200000;
    int below = 0;
    for (int i = 0; i < draws; ++i) below += draw(rng) <= k;
    const double exact = binomial_cdf(k, n, p);
    const double se = std::sqrt(exact * (1 - exact) / draws) + 1e-9;
    CHECK(std::abs(below / static_cast<double>(draws) - exact) < 4 * se);
  }
}

TEST_CASE("chernoff bounds") {
  CHECK(chernoff_bound(100, 0.3, 0.0, TailDirection::Upper) == 1.0);
  CHECK(chernoff_bound(100, 0.3, 0.5, TailDirection::Upper) == Approx(std::exp(-3.0)));
  CHECK(binomial_sf(44, 100, 0.3) <= chernoff_bound(100, 0.3, 0.5, TailDirection::Upper));
  CHECK(std::pow(0.7, 100) <= chernoff_bound(100, 0.3, 1.0, TailDirection::Lower));
  CHECK(chernoff_bound(100, 0.3, 1.0, TailDirection::Lower) == Approx(std::exp(-15.0)));
  CHECK_THROWS_AS(chernoff_bound(10, 0.5, 1.5, TailDirection::Lower), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_bound(10, 0.5, -0.1, TailDirection::Upper), std::invalid_argument);
}

TEST_CASE("m0") {
  CHECK(m0(4096, 0.6).machines == 1389);
  CHECK(m0(4096, 0.5).machines == 1881);
  CHECK(m0(4096, 0.7).machines == 1227);
  CHECK(m0(1 << 15, 0.5).machines == 2883);
  CHECK(m0(4096, 0.7).machines < m0(4096, 0.5).machines);
  CHECK(m0(4096, 0.999).machines > m0(4096, 0.99).machines);
  CHECK(m0(4096, 0.9999).machines > 1000000);
  CHECK(m0(4096, 1.0).single_machine_regime);
  CHECK_THROWS_AS(m0(1, 0.5), std::invalid_argument);
}

TEST_CASE("Top-L quantities") {
  CHECK(a_quantity(1, 1, 17) == Approx(2.3548200450309494).epsilon(1e-14));
  CHECK(a_quantity(1, 10, 1 << 15) == Approx(4.0235785309501139).epsilon(1e-14));
  CHECK(b_quantity(1, 10, 1 << 15, 0.3) == Approx(1.525918363070338).epsilon(1e-13));
  for (double r : {0.1, 0.4, 0.8}) {
    CHECK(b_quantity(1, 1, 1000, r) ==
          Approx((1 - std::sqrt(r)) * std::sqrt(2 * std::log(999.0))).epsilon(1e-13));
  }
  CHECK(m_kl(1 << 15, 0.5, 1, 10).machines == 2354);
  CHECK(m_kl(4096, 0.6, 1, 1).machines == 2044);
  CHECK(m_kl(1024, 0.5, 2, 5).machines == 1512);
  CHECK(m_kl(1024, 1.0, 2, 5).single_machine_regime);
  // b <= 0: the max{} term is its floor, 8 * 8 ln d
  CHECK(m_kl(1 << 15, 0.99, 1, 10).machines == static_cast<std::int64_t>(std::ceil(64 * std::log(32768.0))));
  CHECK_THROWS_AS(m_kl(100, 0.5, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(m_kl(100, 0.5, 1, 50), std::invalid_argument);
}

TEST_CASE("threshold_small") {
  const auto p = threshold_small(1024, 2, 0.5);
  CHECK(p.m_eff == 111);
  CHECK(*p.threshold == Approx(2.632397532813699).epsilon(1e-14));
  CHECK(*p.threshold == mu_min(1024, 2, 0.5));
  CHECK(p.feasible);
  CHECK(p.encoding == Precision{1, 10});
  CHECK_FALSE(threshold_small(16, 1, 0.2).feasible);
  CHECK(threshold_small(16, 1, 0.6).feasible);
  CHECK(threshold_small(1024, 2, 0.5, ThresholdEncoding::AppendixB).encoding == Precision{2, 3});
}

TEST_CASE("threshold_mid") {
  const std::int64_t d = 1 << 15;
  const auto p = threshold_mid(d, 1, 0.5, 8192);
  CHECK(p.m_eff == 8192);
  CHECK(*p.threshold == Approx(4.9335625888886144).epsilon(1e-13));
  CHECK(p.feasible);
  const double r_low = threshold_mid_min_snr(d, 1, 8192);
  CHECK(r_low == Approx(0.1468382670701605).epsilon(1e-12));
  CHECK(threshold_mid(d, 1, r_low + 1e-9, 8192).feasible);
  CHECK_FALSE(threshold_mid(d, 1, r_low, 8192).feasible);
  // 32 sqrt(e pi) ln^1.5 d = 3135.07 > 2^10
  const auto small_m = threshold_mid(d, 1, 0.5, 1024);
  CHECK_FALSE(small_m.feasible);
  CHECK_FALSE(small_m.threshold.has_value());
  CHECK_FALSE(threshold_mid(d, 1, 0.5, 3135).feasible);
  CHECK(threshold_mid(d, 1, 0.5, 3136).feasible);
}

TEST_CASE("m_eff_large") {
  const auto p = m_eff_large(1024, 1, 0.5);
  CHECK(p.m_eff == 506);
  CHECK(*p.threshold == Approx(std::sqrt(2 * std::log(1023.0))));
  CHECK(m_eff_large(1001, 1, 0.36).m_eff == 904);
  CHECK(m_eff_large(1001, 1, 0.49).m_eff == 520);
  CHECK(m_eff_large(1001, 1, 0.64).m_eff == 382);
  std::int64_t previous = m_eff_large(1024, 1, 0.3).m_eff;
  // decreasing until the 1 / (1 - sqrt r) factor takes over near r = 0.7
  for (double r = 0.4; r < 0.75; r += 0.1) {
    const auto q = m_eff_large(1024, 1, r);
    CHECK(q.m_eff < previous);
    CHECK(*q.threshold == *p.threshold);
    previous = q.m_eff;
  }
  CHECK(m_eff_large(1024, 1, 0.8).m_eff > m_eff_large(1024, 1, 0.7).m_eff);
  CHECK_FALSE(m_eff_large(1024, 1, 0.02).feasible);
  CHECK(m_eff_large(1024, 1, 0.03).feasible);
  CHECK_FALSE(m_eff_large(20, 1, 0.5).feasible);
}

TEST_CASE("risk") {
  CHECK(oracle_risk(std::vector<double>(5, 0.0), 10) == 0.0);
  CHECK(oracle_risk(std::vector<double>{0.1, 0.0, 2.0}, 10) == Approx(0.11));
  CHECK(oracle_risk(std::vector<double>{3.0, 3.0, 0.0, 3.0}, 8) == Approx(3.0 / 8));
  CHECK(pi_risk_bound(1024, 4, 32, 0.5) == Approx(0.1792437356645889).epsilon(1e-13));
  CHECK(pi_risk_bound(1024, 5, 32, 0.5) > pi_risk_bound(1024, 4, 32, 0.5));
  CHECK(pi_risk_bound(1 << 30, 4, 32, 0.5) == Approx(0.125).epsilon(1e-6));
}

TEST_CASE("send probabilities") {
  CHECK(p_send_support_topl(1 << 15, 1, 10, 0.3) == Approx(0.063515094452562244).epsilon(1e-11));
  CHECK(p_send_support_topl(1 << 15, 5, 10, 0.5) == Approx(0.17770812471189526).epsilon(1e-11));
  // L = K: the binomial factor is Pr[Bin <= 0]
  const double a = a_quantity(2, 2, 500);
  const double lk = p_send_support_topl(500, 2, 2, 0.4) / gaussian_tail(b_quantity(2, 2, 500, 0.4));
  CHECK(lk == Approx(std::pow(1 - gaussian_tail(a), 498)).epsilon(1e-12));
  // b <= 0 gives Q(b) >= 1/2
  const double binom_factor = binomial_cdf(9, 1 << 15, gaussian_tail(a_quantity(1, 10, 1 << 15)));
  CHECK(b_quantity(1, 10, 1 << 15, 0.9) <= 0);
  CHECK(p_send_support_topl(1 << 15, 1, 10, 0.9) >= 0.5 * binom_factor);
  CHECK(p_send_nonsupport_topl(100, 1, 5, 1.0) == Approx(4.0 / 99));
  CHECK(p_send_support_th(2.0, 2.0) == 0.5);
  CHECK(p_send_nonsupport_th(std::sqrt(2 * std::log(1000.0))) == Approx(1.0083225935770045e-4));
  CHECK(p_send_support_th(3.0, 2.0) < p_send_support_th(2.5, 2.0));
}

TEST_CASE("tune_topl") {
  const std::int64_t d = 1 << 15;
  CHECK(vote_slack(d, 1) == Approx(4.44032657954432).epsilon(1e-13));
  std::int64_t previous = tune_topl(d, 1, 10, 0.05).m_eff;
  for (int i = 2; i <= 20; ++i) {
    const double r = 0.05 * i;
    const auto p = tune_topl(d, 1, 10, r);
    CHECK(p.m_eff <= previous);
    CHECK(static_cast<double>(p.m_eff) * p_send_support_topl(d, 1, 10, r) >= vote_slack(d, 1));
    CHECK(*p.L == 10);
    previous = p.m_eff;
  }
  const auto capped = tune_topl(d, 1, 10, 0.1, 64);
  CHECK(capped.m_eff == 64);
  CHECK_FALSE(capped.feasible);
  CHECK(tune_topl(d, 1, 10, 0.9, 64).feasible);
}

TEST_CASE("variant A threshold is the highest separating grid point") {
  const std::int64_t d = 1 << 15;
  const auto enc = ThresholdEncoding::AppendixB;
  // independent grid scan: 3.534 at r = 0.3, 5.115 at r = 0.8
  const auto p = tune_threshold_a(d, 1, 0.3, 64, enc);
  REQUIRE(p.feasible);
  CHECK(*p.threshold >= 3.534);
  CHECK(*p.threshold < 3.535);
  CHECK(threshold_separates(d, 1, 0.3, *p.threshold, 64, enc));
  CHECK_FALSE(threshold_separates(d, 1, 0.3, *p.threshold + kThresholdGridStep, 64, enc));
  const auto high = tune_threshold_a(d, 1, 0.8, 64, enc);
  CHECK(*high.threshold >= 5.115);
  CHECK(*high.threshold < 5.116);
  CHECK(tune_threshold_a(1 << 12, 1, 0.5, 64, enc).threshold.value() ==
        Approx(4.049).epsilon(3e-4));
}

TEST_CASE("threshold floor and fallback") {
  const std::int64_t d = 1 << 15;
  const auto enc = ThresholdEncoding::AppendixB;
  const auto floor = threshold_floor(d, 1, 64, enc);
  CHECK(floor.r_min > 0.0);
  CHECK(floor.r_min < 0.3);
  const auto below = tune_threshold_a(d, 1, floor.r_min - 2e-4, 64, enc, floor);
  CHECK_FALSE(below.feasible);
  CHECK(*below.threshold == floor.t_min);
  CHECK(tune_threshold_a(d, 1, floor.r_min, 64, enc, floor).feasible);
}

TEST_CASE("variant B") {
  const std::int64_t d = 1 << 15;
  const auto enc = ThresholdEncoding::AppendixB;
  const double cap = std::sqrt(2 * std::log(static_cast<double>(d - 1)));
  // A's threshold is below the cap: B keeps all M machines.
  const auto low = tune_threshold_b(d, 1, 0.3, 64, enc);
  CHECK(low.m_eff == 64);
  CHECK(*low.threshold == *tune_threshold_a(d, 1, 0.3, 64, enc).threshold);
  // A's threshold is above the cap: fewest machines at the cap.
  const auto high = tune_threshold_b(d, 1, 0.8, 64, enc);
  CHECK(*high.threshold == cap);
  CHECK(high.m_eff < 64);
  CHECK(threshold_separates(d, 1, 0.8, cap, high.m_eff, enc));
  CHECK_FALSE(threshold_separates(d, 1, 0.8, cap, high.m_eff - 1, enc));
}

TEST_CASE("regime lines") {
  const std::int64_t d = 1 << 15;
  CHECK(necessary_snr(d, 64) == 0.015625);
  CHECK(necessary_snr(d, 1 << 20) == Approx(0.00088971280212056458).epsilon(1e-12));
  const double topl_64 = sufficient_snr_topl(d, 1, 10, 64);
  const double topl_1024 = sufficient_snr_topl(d, 1, 10, 1024);
  CHECK(topl_1024 <= topl_64);
  for (std::int64_t M : {64, 1024}) {
    const double n = necessary_snr(d, M);
    CHECK(sufficient_snr_topl(d, 1, 1, M) >= n);
    CHECK(sufficient_snr_topl(d, 1, 10, M) >= n);
    CHECK(sufficient_snr(Algorithm::ThresholdA, d, 1, 10, M) >= n);
    CHECK(sufficient_snr_topl(d, 5, 10, M) >= necessary_snr(d, M));
  }
  // the defining inequality holds just above the line and fails just below
  auto expects_two = [&](double r) {
    const double ps = p_send_support_topl(d, 1, 10, r);
    return std::min(std::ceil(vote_slack(d, 1) / ps), 64.0) * ps >= 2.0;
  };
  CHECK(expects_two(topl_64));
  CHECK_FALSE(expects_two(topl_64 - 1e-4));
  CHECK(sufficient_snr(Algorithm::ThresholdSmall, 1024, 2, 2, 128) ==
        Approx(std::log(5.0) / std::log(1022.0)));
  CHECK(sufficient_snr(Algorithm::ThresholdSmall, 1024, 2, 2, 64) == 1.0);
  CHECK(sufficient_snr(Algorithm::ThresholdMid, d, 1, 1, 64) == 1.0);
  const double large = sufficient_snr(Algorithm::ThresholdLarge, 1024, 1, 1, 512);
  CHECK(m_eff_large(1024, 1, large).m_eff <= 512);
  CHECK(m_eff_large(1024, 1, large - 1e-4).m_eff > 512);
  const double r0 = sufficient_snr_m0(4096, 1389);
  CHECK(r0 <= 0.6);
  CHECK(m0(4096, r0).machines <= 1389);
  CHECK(m0(4096, r0 - 1e-4).machines > 1389);
}
