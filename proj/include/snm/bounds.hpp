#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "snm/codec.hpp"

namespace snm {

// ---------------------------------------------------------------------------
// Gaussian and binomial tails
// ---------------------------------------------------------------------------

/// Q(t) = Pr[Z > t] for a standard normal Z.
double gaussian_tail(double t);

struct TailBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Mills-ratio sandwich t/(sqrt(2 pi)(t^2+1)) e^{-t^2/2} <= Q(t) <=
/// 1/(sqrt(2 pi) t) e^{-t^2/2}. Requires t > 0.
TailBounds lemma1_bounds(double t);

/// The weaker lower bound 1/(2 sqrt(2 pi) t) e^{-t^2/2}, valid for t >= 1.
double lemma1_lower_unit(double t);

/// Pr[Bin(n, p) <= k], summed exactly in log space.
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

/// Pr[Bin(n, p) > k], summed from the upper end so small tails keep their
/// relative accuracy.
double binomial_sf(std::int64_t k, std::int64_t n, double p);

enum class TailDirection { Upper, Lower };

/// Chernoff bounds for a sum of n Bernoulli(p):
/// Upper: Pr[X >= (1+delta) np] <= exp(-delta^2 np / (2 + delta)), delta >= 0.
/// Lower: Pr[X <= (1-delta) np] <= exp(-delta^2 np / 2), 0 <= delta <= 1.
double chernoff_bound(std::int64_t n, double p, double delta, TailDirection dir);

// ---------------------------------------------------------------------------
// Machine counts prescribed by the recovery guarantees
// ---------------------------------------------------------------------------

/// A machine count, or the flag that r >= 1 where one machine suffices and
/// the closed forms have a vanishing denominator.
struct MachineBound {
  std::int64_t machines = 0;
  bool single_machine_regime = false;
};

/// Top-1 machine count for a 1-sparse vector.
MachineBound m0(std::int64_t d, double r);

double a_quantity(std::int64_t K, std::int64_t L, std::int64_t d);
double b_quantity(std::int64_t K, std::int64_t L, std::int64_t d, double r);

/// Top-L machine count for a K-sparse vector, K <= L < (d - K) / 2.
/// When b <= 0 the max{} term is taken as its floor of 8.
MachineBound m_kl(std::int64_t d, double r, std::int64_t K, std::int64_t L);

// ---------------------------------------------------------------------------
// Tuned configurations
// ---------------------------------------------------------------------------

enum class Algorithm {
  TopL,
  ThresholdA,
  ThresholdB,
  ThresholdSmall,
  ThresholdMid,
  ThresholdLarge,
};

bool is_threshold(Algorithm alg);
std::string to_string(Algorithm alg);

/// How the threshold is quantized in the setup message.
///  Paper:     U = floor(log2 tau) (clamped at 0), P = ceil(log2 d).
///  AppendixB: U = 2, P = 3, the fixed simulation encoding.
enum class ThresholdEncoding { Paper, AppendixB };

std::string to_string(ThresholdEncoding enc);
ThresholdEncoding parse_threshold_encoding(const std::string& text);

Precision threshold_precision(double tau, std::int64_t d, ThresholdEncoding enc);

/// The value machines compare against: approx(trunc(tau)).
double truncated_threshold(double tau, Precision prec);

struct TunedParams {
  Algorithm algorithm = Algorithm::TopL;
  std::int64_t m_eff = 1;
  /// Set for thresholding variants whenever the prescribed tau is defined.
  std::optional<double> threshold;
  /// Set for Top-L.
  std::optional<std::int64_t> L;
  /// Precision of the threshold setup message.
  Precision encoding{};
  bool feasible = true;
  std::string reason;
};

/// Threshold = mu_min, m_eff = ceil(16 ln d). The caller checks M >= 16 ln d.
TunedParams threshold_small(std::int64_t d, std::int64_t K, double r,
                            ThresholdEncoding enc = ThresholdEncoding::Paper);

/// Lower SNR limit for the intermediate-M thresholding guarantee.
/// Requires 32 sqrt(e pi) ln^{1.5} d <= M.
double threshold_mid_min_snr(std::int64_t d, std::int64_t K, std::int64_t M);

TunedParams threshold_mid(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                          ThresholdEncoding enc = ThresholdEncoding::Paper);

TunedParams m_eff_large(std::int64_t d, std::int64_t K, double r,
                        ThresholdEncoding enc = ThresholdEncoding::Paper);

// ---------------------------------------------------------------------------
// Risk
// ---------------------------------------------------------------------------

/// sum_j min{sigma2 / M, mu_j^2}.
double oracle_risk(std::span<const double> mu, std::int64_t M, double sigma2 = 1.0);

/// Risk bound of the estimation round with P = ceil(log2 d).
double pi_risk_bound(std::int64_t d, std::int64_t K, std::int64_t M, double r);

// ---------------------------------------------------------------------------
// Per-machine send probabilities
// ---------------------------------------------------------------------------

/// Lower bound on the probability that a support index is among a
/// machine's top L: Q(b) * Pr[Bin(d - K, Q(a)) <= L - K].
double p_send_support_topl(std::int64_t d, std::int64_t K, std::int64_t L, double r);
double p_send_nonsupport_topl(std::int64_t d, std::int64_t K, std::int64_t L, double p_s);

double p_send_support_th(double tau, double mu_k);
double p_send_nonsupport_th(double tau_hat);

// ---------------------------------------------------------------------------
// Simulation tuning
// ---------------------------------------------------------------------------

/// ln(d - K) / ln ln(d - K): multiplicative slack on the non-support votes.
double vote_slack(std::int64_t d, std::int64_t K);

/// m_eff = max{ceil(slack / p_s), 1}. With `M` the count is capped at M and
/// the result is flagged infeasible when the formula asks for more.
TunedParams tune_topl(std::int64_t d, std::int64_t K, std::int64_t L, double r,
                      std::optional<std::int64_t> M = std::nullopt);

/// The vote-separation predicate used to tune thresholds:
/// Pr[Y_s <= ceil(E[Y_n] slack) - 1] < 1/d with Y_s ~ Bin(m, Q(t - mu_min))
/// and Y_n ~ Bin(m, Q(t_hat)), t_hat the quantized threshold.
bool threshold_separates(std::int64_t d, std::int64_t K, double r, double t,
                         std::int64_t m, ThresholdEncoding enc);

/// Step of the threshold search grid and the width of its final refinement.
inline constexpr double kThresholdGridStep = 1e-3;
inline constexpr double kThresholdRefineTol = 1e-6;

/// Smallest SNR at which some threshold separates, and that threshold.
/// r_min is 1 when no r < 1 works.
struct ThresholdFloor {
  double r_min = 1.0;
  double t_min = 0.0;
};

ThresholdFloor threshold_floor(std::int64_t d, std::int64_t K, std::int64_t M,
                               ThresholdEncoding enc);

/// Variant A: all M machines, highest separating threshold. Falls back to
/// t_min (flagged infeasible) below r_min. `floor` may carry a precomputed
/// threshold_floor() result for the same (d, K, M, enc).
TunedParams tune_threshold_a(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                             ThresholdEncoding enc,
                             std::optional<ThresholdFloor> floor = std::nullopt);

/// Variant B: as A while A's threshold stays below sqrt(2 ln((d-K)/K));
/// otherwise fixes that threshold and binary-searches the fewest machines.
TunedParams tune_threshold_b(std::int64_t d, std::int64_t K, double r, std::int64_t M,
                             ThresholdEncoding enc,
                             std::optional<ThresholdFloor> floor = std::nullopt);

// ---------------------------------------------------------------------------
// Regime lines
// ---------------------------------------------------------------------------

/// max{1/M, ln^{-3} d}.
double necessary_snr(std::int64_t d, std::int64_t M);

/// Smallest r (to 1e-4) where a Top-L run capped at M machines expects at
/// least two votes per support index.
double sufficient_snr_topl(std::int64_t d, std::int64_t K, std::int64_t L, std::int64_t M);

/// Dispatches on the algorithm. Threshold variants A and B share r_min; the
/// theorem variants report the smallest r at which their guarantee applies
/// with M machines. 1 means no r < 1 qualifies.
double sufficient_snr(Algorithm alg, std::int64_t d, std::int64_t K, std::int64_t L,
                      std::int64_t M, ThresholdEncoding enc = ThresholdEncoding::AppendixB);

/// Smallest r on a 1e-4 grid with m0(d, r) <= min{M, d}; 1 if none.
double sufficient_snr_m0(std::int64_t d, std::int64_t M);

/// Smallest r on a 1e-4 grid with m_kl(d, r) <= min{M, (d-K)/L}; 1 if none.
double sufficient_snr_m_kl(std::int64_t d, std::int64_t K, std::int64_t L, std::int64_t M);

}  // namespace snm
