#include "snm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "snm/model.hpp"

namespace snm {
namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;  // sqrt(2 pi)
constexpr double kSnrTol = 1e-4;

double ln(double x) { return std::log(x); }
double lnd(std::int64_t x) { return std::log(static_cast<double>(x)); }

std::int64_t ceil_count(double x, const char* what) {
  const double c = std::ceil(x);
  if (!(c < 9.0e18)) {
    throw std::overflow_error(std::string(what) + ": machine count overflows");
  }
  return static_cast<std::int64_t>(c);
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_topl_range(std::int64_t d, std::int64_t K, std::int64_t L) {
  if (K < 1 || L < K || 2 * L >= d - K) {
    throw std::invalid_argument("Top-L quantities require 1 <= K <= L < (d - K) / 2");
  }
}

void check_unit_r(double r, const char* what) {
  if (!(r >= 0.0)) throw std::invalid_argument(std::string(what) + ": requires r >= 0");
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

/// Highest grid threshold that separates, refined by bisection against the
/// next grid point.
std::optional<double> highest_separating(std::int64_t d, std::int64_t K, double r,
                                         std::int64_t m, ThresholdEncoding enc) {
  const double t_max = mu_min(d, K, r) + std::sqrt(2.0 * lnd(d - K));
  const auto top = static_cast<std::int64_t>(std::floor(t_max / kThresholdGridStep));
  for (std::int64_t k = top; k >= 0; --k) {
    const double t = static_cast<double>(k) * kThresholdGridStep;
    if (!threshold_separates(d, K, r, t, m, enc)) continue;
    double lo = t;
    double hi = static_cast<double>(k + 1) * kThresholdGridStep;
    while (hi - lo > kThresholdRefineTol) {
      const double mid = 0.5 * (lo + hi);
      (threshold_separates(d, K, r, mid, m, enc) ? lo : hi) = mid;
    }
    return lo;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

double gaussian_tail(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

TailBounds lemma1_bounds(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("lemma1_bounds: requires t > 0");
  const double density = std::exp(-0.5 * t * t) / kSqrt2Pi;
  return {t / (t * t + 1.0) * density, density / t};
}

double lemma1_lower_unit(double t) {
  if (!(t >= 1.0)) throw std::invalid_argument("lemma1_lower_unit: requires t >= 1");
  return std::exp(-0.5 * t * t) / (2.0 * kSqrt2Pi * t);
}

double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial_cdf: requires n >= 0 and p in [0, 1]");
  }
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double log_q = std::log1p(-p);
  const double log_odds = std::log(p) - log_q;
  double log_term = static_cast<double>(n) * log_q;
  double log_sum = log_term;
  for (std::int64_t j = 0; j < k; ++j) {
    log_term += std::log(static_cast<double>(n - j) / static_cast<double>(j + 1)) + log_odds;
    log_sum = log_add(log_sum, log_term);
  }
  return std::min(1.0, std::exp(log_sum));
}

double binomial_sf(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial_sf: requires n >= 0 and p in [0, 1]");
  }
  if (k < 0) return 1.0;
  if (k >= n) return 0.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double nn = static_cast<double>(n);
  const double log_q = std::log1p(-p);
  const double log_odds = std::log(p) - log_q;
  std::int64_t j = k + 1;
  double log_term = std::lgamma(nn + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
                    std::lgamma(nn - static_cast<double>(j) + 1.0) +
                    static_cast<double>(j) * std::log(p) + (nn - static_cast<double>(j)) * log_q;
  double log_sum = log_term;
  const double mode = std::floor((nn + 1.0) * p);
  for (; j < n; ++j) {
    log_term += std::log(static_cast<double>(n - j) / static_cast<double>(j + 1)) + log_odds;
    log_sum = log_add(log_sum, log_term);
    if (static_cast<double>(j) > mode && log_term < log_sum - 40.0) break;
  }
  return std::min(1.0, std::exp(log_sum));
}

double chernoff_bound(std::int64_t n, double p, double delta, TailDirection dir) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("chernoff_bound: requires n >= 0 and p in [0, 1]");
  }
  const double mean = static_cast<double>(n) * p;
  if (dir == TailDirection::Upper) {
    if (!(delta >= 0.0)) throw std::invalid_argument("chernoff_bound: upper tail needs delta >= 0");
    return std::exp(-delta * delta * mean / (2.0 + delta));
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("chernoff_bound: lower tail needs 0 <= delta <= 1");
  }
  return std::exp(-delta * delta * mean / 2.0);
}

// ---------------------------------------------------------------------------

MachineBound m0(std::int64_t d, double r) {
  if (d < 2) throw std::invalid_argument("m0: requires d >= 2");
  check_unit_r(r, "m0");
  if (r >= 1.0) return {0, true};
  const double log_d = lnd(d);
  const double gap = 1.0 - std::sqrt(r);
  const double ratio = kSqrt2Pi * std::numbers::e * (2.0 * gap * gap * log_d + 1.0) /
                       (gap * std::sqrt(2.0 * log_d)) *
                       std::pow(static_cast<double>(d), gap * gap);
  return {ceil_count(std::max(1.0, ratio) * 8.0 * log_d, "m0"), false};
}

double a_quantity(std::int64_t K, std::int64_t L, std::int64_t d) {
  check_topl_range(d, K, L);
  return std::sqrt(2.0 * ln(static_cast<double>(d - K) / static_cast<double>(L - K + 1)));
}

double b_quantity(std::int64_t K, std::int64_t L, std::int64_t d, double r) {
  check_unit_r(r, "b_quantity");
  return a_quantity(K, L, d) - std::sqrt(2.0 * r * lnd(d - K));
}

MachineBound m_kl(std::int64_t d, double r, std::int64_t K, std::int64_t L) {
  check_topl_range(d, K, L);
  check_unit_r(r, "m_kl");
  if (r >= 1.0) return {0, true};
  const double b = b_quantity(K, L, d, r);
  const double root = std::sqrt(1.0 - lnd(L - K + 1) / lnd(d - K)) - std::sqrt(r);
  double term = 8.0;
  if (b > 0.0) {
    term = std::max(term, 4.0 * kSqrt2Pi * (b * b + 1.0) / b *
                              std::pow(static_cast<double>(d - K), root * root));
  }
  return {ceil_count(term * 8.0 * lnd(d), "m_kl"), false};
}

// ---------------------------------------------------------------------------

bool is_threshold(Algorithm alg) { return alg != Algorithm::TopL; }

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::TopL: return "top-l";
    case Algorithm::ThresholdA: return "threshold-a";
    case Algorithm::ThresholdB: return "threshold-b";
    case Algorithm::ThresholdSmall: return "threshold-small";
    case Algorithm::ThresholdMid: return "threshold-mid";
    case Algorithm::ThresholdLarge: return "threshold-large";
  }
  return "unknown";
}

std::string to_string(ThresholdEncoding enc) {
  return enc == ThresholdEncoding::Paper ? "paper" : "appendixB";
}

ThresholdEncoding parse_threshold_encoding(const std::string& text) {
  if (text == "paper") return ThresholdEncoding::Paper;
  if (text == "appendixB") return ThresholdEncoding::AppendixB;
  throw std::invalid_argument("unknown encoding: " + text + " (expected paper|appendixB)");
}

Precision threshold_precision(double tau, std::int64_t d, ThresholdEncoding enc) {
  if (enc == ThresholdEncoding::AppendixB) return {2, 3};
  const int upper = tau > 0.0 ? std::max(0, static_cast<int>(std::floor(std::log2(tau)))) : 0;
  return {upper, index_bits(d)};
}

double truncated_threshold(double tau, Precision prec) {
  return approx(trunc(tau, prec), prec);
}

TunedParams threshold_small(std::int64_t d, std::int64_t K, double r, ThresholdEncoding enc) {
  TunedParams p;
  p.algorithm = Algorithm::ThresholdSmall;
  p.m_eff = ceil_count(16.0 * lnd(d), "threshold_small");
  p.threshold = mu_min(d, K, r);
  p.encoding = threshold_precision(*p.threshold, d, enc);
  const double r_low = std::log(5.0) / lnd(d - K);
  if (d < 16) {
    p.feasible = false;
    p.reason = "requires d >= 16";
  } else if (!(r > r_low && r < 1.0)) {
    p.feasible = false;
    p.reason = fmt("requires ln5/ln(d-K) = %.6g < r < 1", r_low);
  }
  return p;
}

double threshold_mid_min_snr(std::int64_t d, std::int64_t K, std::int64_t M) {
  const double log_d = lnd(d);
  const double mm = static_cast<double>(M);
  const double lower_m = 32.0 * std::sqrt(std::numbers::e * std::numbers::pi) * std::pow(log_d, 1.5);
  if (mm < lower_m) {
    throw std::invalid_argument("threshold_mid_min_snr: requires M >= 32 sqrt(e pi) ln^1.5 d");
  }
  const double nonsupport = std::sqrt(2.0 * ln(5.0 * mm / (kSqrt2Pi * 4.0 * log_d)));
  const double shift = std::sqrt(2.0 * ln(mm / (32.0 * std::sqrt(std::numbers::pi) * std::pow(log_d, 1.5))));
  const double gap = nonsupport - shift + 1.0 / static_cast<double>(d);
  return gap * gap / (2.0 * lnd(d - K));
}

TunedParams threshold_mid(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                          ThresholdEncoding enc) {
  TunedParams p;
  p.algorithm = Algorithm::ThresholdMid;
  p.m_eff = std::max<std::int64_t>(M, 1);
  const double log_d = lnd(d);
  const double mm = static_cast<double>(M);
  const double scale = mm / (32.0 * std::sqrt(std::numbers::pi) * std::pow(log_d, 1.5));
  if (scale >= 1.0) {
    p.threshold = std::sqrt(2.0 * r * lnd(d - K)) + std::sqrt(2.0 * ln(scale));
    p.encoding = threshold_precision(*p.threshold, d, enc);
  }
  const double lower_m = 32.0 * std::sqrt(std::numbers::e * std::numbers::pi) * std::pow(log_d, 1.5);
  if (d < 15) {
    p.feasible = false;
    p.reason = "requires d >= 15";
  } else if (!(mm >= lower_m && M <= d)) {
    p.feasible = false;
    p.reason = fmt("requires 32 sqrt(e pi) ln^1.5 d = %.6g <= M <= d", lower_m);
  } else {
    const double r_low = threshold_mid_min_snr(d, K, M);
    if (!(r > r_low && r < 1.0)) {
      p.feasible = false;
      p.reason = fmt("requires %.9g < r < 1", r_low);
    }
  }
  return p;
}

TunedParams m_eff_large(std::int64_t d, std::int64_t K, double r, ThresholdEncoding enc) {
  check_unit_r(r, "m_eff_large");
  TunedParams p;
  p.algorithm = Algorithm::ThresholdLarge;
  const double log_rest = lnd(d - K);
  p.threshold = std::sqrt(2.0 * log_rest);
  p.encoding = threshold_precision(*p.threshold, d, enc);
  const double r_low = std::pow(std::log(10.0) / (2.0 * log_rest), 2.0);
  if (r >= 1.0) {
    p.m_eff = 1;
    p.feasible = false;
    p.reason = "single-machine regime (r >= 1)";
    return p;
  }
  const double gap = 1.0 - std::sqrt(r);
  p.m_eff = ceil_count(8.0 * kSqrt2Pi * (gap * gap * 2.0 * log_rest + 1.0) /
                           (gap * std::sqrt(2.0 * log_rest)) *
                           std::pow(static_cast<double>(d - K), gap * gap) * lnd(d),
                       "m_eff_large");
  if (d - K < 20) {
    p.feasible = false;
    p.reason = "requires d - K >= 20";
  } else if (!(r > r_low)) {
    p.feasible = false;
    p.reason = fmt("requires (ln10 / (2 ln(d-K)))^2 = %.6g < r < 1", r_low);
  }
  return p;
}

// ---------------------------------------------------------------------------

double oracle_risk(std::span<const double> mu, std::int64_t M, double sigma2) {
  if (M < 1) throw std::invalid_argument("oracle_risk: requires M >= 1");
  const double floor_risk = sigma2 / static_cast<double>(M);
  double risk = 0.0;
  for (double v : mu) risk += std::min(floor_risk, v * v);
  return risk;
}

double pi_risk_bound(std::int64_t d, std::int64_t K, std::int64_t M, double r) {
  if (d < 5) throw std::invalid_argument("pi_risk_bound: requires d >= 5");
  if (M < 1) throw std::invalid_argument("pi_risk_bound: requires M >= 1");
  const double dd = static_cast<double>(d);
  const double floor_sq = 2.0 * r * lnd(d - K);
  return static_cast<double>(K) / static_cast<double>(M) * (1.0 + 1.0 / dd + 1.0 / (dd * dd)) +
         2.0 * static_cast<double>(K) * floor_sq / dd;
}

// ---------------------------------------------------------------------------

double p_send_support_topl(std::int64_t d, std::int64_t K, std::int64_t L, double r) {
  const double a = a_quantity(K, L, d);
  const double b = b_quantity(K, L, d, r);
  return gaussian_tail(b) * binomial_cdf(L - K, d - K, gaussian_tail(a));
}

double p_send_nonsupport_topl(std::int64_t d, std::int64_t K, std::int64_t L, double p_s) {
  check_topl_range(d, K, L);
  return (static_cast<double>(L) - static_cast<double>(K) * p_s) / static_cast<double>(d - K);
}

double p_send_support_th(double tau, double mu_k) { return gaussian_tail(tau - mu_k); }

double p_send_nonsupport_th(double tau_hat) { return gaussian_tail(tau_hat); }

// ---------------------------------------------------------------------------

double vote_slack(std::int64_t d, std::int64_t K) {
  const double log_rest = lnd(d - K);
  if (!(log_rest > 1.0)) throw std::invalid_argument("vote_slack: requires d - K > e");
  return log_rest / std::log(log_rest);
}

TunedParams tune_topl(std::int64_t d, std::int64_t K, std::int64_t L, double r,
                      std::optional<std::int64_t> M) {
  TunedParams p;
  p.algorithm = Algorithm::TopL;
  p.L = L;
  const double p_s = p_send_support_topl(d, K, L, r);
  if (!(p_s > 0.0)) {
    p.m_eff = M.value_or(1);
    p.feasible = false;
    p.reason = "support send probability is zero";
    return p;
  }
  p.m_eff = std::max<std::int64_t>(ceil_count(vote_slack(d, K) / p_s, "tune_topl"), 1);
  if (M && p.m_eff > *M) {
    p.reason = fmt("needs %.0f machines, %.0f available", static_cast<double>(p.m_eff),
                   static_cast<double>(*M));
    p.m_eff = *M;
    p.feasible = false;
  }
  return p;
}

bool threshold_separates(std::int64_t d, std::int64_t K, double r, double t,
                         std::int64_t m, ThresholdEncoding enc) {
  if (m < 1) return false;
  const double t_hat = truncated_threshold(t, threshold_precision(t, d, enc));
  const double p_s = p_send_support_th(t, mu_min(d, K, r));
  const double p_n = p_send_nonsupport_th(t_hat);
  const double expected_noise = static_cast<double>(m) * p_n * vote_slack(d, K);
  const auto cutoff = static_cast<std::int64_t>(std::ceil(expected_noise)) - 1;
  return binomial_cdf(cutoff, m, p_s) < 1.0 / static_cast<double>(d);
}

ThresholdFloor threshold_floor(std::int64_t d, std::int64_t K, std::int64_t M,
                               ThresholdEncoding enc) {
  if (auto t = highest_separating(d, K, 0.0, M, enc)) return {0.0, *t};
  if (!highest_separating(d, K, 1.0, M, enc)) {
    return {1.0, std::sqrt(2.0 * lnd(d - K))};
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kSnrTol) {
    const double mid = 0.5 * (lo + hi);
    (highest_separating(d, K, mid, M, enc) ? hi : lo) = mid;
  }
  return {hi, *highest_separating(d, K, hi, M, enc)};
}

TunedParams tune_threshold_a(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                             ThresholdEncoding enc, std::optional<ThresholdFloor> floor) {
  if (M < 1) throw std::invalid_argument("tune_threshold_a: requires M >= 1");
  TunedParams p;
  p.algorithm = Algorithm::ThresholdA;
  p.m_eff = M;
  if (auto t = highest_separating(d, K, r, M, enc)) {
    p.threshold = *t;
  } else {
    const ThresholdFloor fl = floor ? *floor : threshold_floor(d, K, M, enc);
    p.threshold = fl.t_min;
    p.feasible = false;
    p.reason = fmt("no separating threshold below r_min = %.6g; using t_min = %.6g", fl.r_min, fl.t_min);
  }
  p.encoding = threshold_precision(*p.threshold, d, enc);
  return p;
}

TunedParams tune_threshold_b(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                             ThresholdEncoding enc, std::optional<ThresholdFloor> floor) {
  TunedParams p = tune_threshold_a(d, K, r, M, enc, floor);
  p.algorithm = Algorithm::ThresholdB;
  const double cap = std::sqrt(2.0 * ln(static_cast<double>(d - K) / static_cast<double>(K)));
  if (!p.feasible || *p.threshold < cap) return p;
  if (!threshold_separates(d, K, r, cap, M, enc)) {
    p.reason = "capped threshold does not separate with M machines; kept variant A";
    return p;
  }
  std::int64_t lo = 0;  // never separates
  std::int64_t hi = M;  // separates
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (threshold_separates(d, K, r, cap, mid, enc) ? hi : lo) = mid;
  }
  p.m_eff = hi;
  p.threshold = cap;
  p.encoding = threshold_precision(cap, d, enc);
  return p;
}

// ---------------------------------------------------------------------------

double necessary_snr(std::int64_t d, std::int64_t M) {
  if (d < 2 || M < 1) throw std::invalid_argument("necessary_snr: requires d >= 2, M >= 1");
  return std::max(1.0 / static_cast<double>(M), std::pow(lnd(d), -3.0));
}

double sufficient_snr_topl(std::int64_t d, std::int64_t K, std::int64_t L, std::int64_t M) {
  const double slack = vote_slack(d, K);
  auto expects_two = [&](double r) {
    const double p_s = p_send_support_topl(d, K, L, r);
    if (!(p_s > 0.0)) return false;
    const double machines = std::min(std::ceil(slack / p_s), static_cast<double>(M));
    return std::max(machines, 1.0) * p_s >= 2.0;
  };
  if (expects_two(0.0)) return 0.0;
  if (!expects_two(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kSnrTol) {
    const double mid = 0.5 * (lo + hi);
    (expects_two(mid) ? hi : lo) = mid;
  }
  return hi;
}

double sufficient_snr_m0(std::int64_t d, std::int64_t M) {
  const std::int64_t cap = std::min(M, d);
  for (int i = 0; i < 10000; ++i) {
    const double r = i * kSnrTol;
    if (m0(d, r).machines <= cap) return r;
  }
  return 1.0;
}

double sufficient_snr_m_kl(std::int64_t d, std::int64_t K, std::int64_t L, std::int64_t M) {
  const std::int64_t cap = std::min(M, (d - K) / L);
  for (int i = 0; i < 10000; ++i) {
    const double r = i * kSnrTol;
    if (m_kl(d, r, K, L).machines <= cap) return r;
  }
  return 1.0;
}

double sufficient_snr(Algorithm alg, std::int64_t d, std::int64_t K, std::int64_t L,
                      std::int64_t M, ThresholdEncoding enc) {
  switch (alg) {
    case Algorithm::TopL:
      return sufficient_snr_topl(d, K, L, M);
    case Algorithm::ThresholdA:
    case Algorithm::ThresholdB:
      return threshold_floor(d, K, M, enc).r_min;
    case Algorithm::ThresholdSmall:
      if (d < 16 || static_cast<double>(M) < 16.0 * lnd(d)) return 1.0;
      return std::min(1.0, std::log(5.0) / lnd(d - K));
    case Algorithm::ThresholdMid: {
      const double lower_m =
          32.0 * std::sqrt(std::numbers::e * std::numbers::pi) * std::pow(lnd(d), 1.5);
      if (d < 15 || static_cast<double>(M) < lower_m || M > d) return 1.0;
      return std::clamp(threshold_mid_min_snr(d, K, M), 0.0, 1.0);
    }
    case Algorithm::ThresholdLarge: {
      if (d - K < 20) return 1.0;
      const double r_low = std::pow(std::log(10.0) / (2.0 * lnd(d - K)), 2.0);
      for (int i = 0; i < 10000; ++i) {
        const double r = i * kSnrTol;
        if (r <= r_low) continue;
        if (m_eff_large(d, K, r).m_eff <= M) return r;
      }
      return 1.0;
    }
  }
  return 1.0;
}

}  // namespace snm
